#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace socnav::geom {

template <typename Scalar>
using Vec2T = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Rot2T = Eigen::Matrix<Scalar, 2, 2>;

/// Wraps an angle into (-pi, pi].
template <typename Scalar>
Scalar normalize_angle(Scalar angle) {
  constexpr Scalar kPi = std::numbers::pi_v<Scalar>;
  constexpr Scalar kTwoPi = 2 * kPi;
  Scalar wrapped = std::fmod(angle, kTwoPi);
  if (wrapped <= -kPi) wrapped += kTwoPi;
  if (wrapped > kPi) wrapped -= kTwoPi;
  return wrapped;
}

template <typename Scalar>
Rot2T<Scalar> rotation(Scalar angle) {
  const Scalar c = std::cos(angle);
  const Scalar s = std::sin(angle);
  Rot2T<Scalar> r;
  r << c, -s, s, c;
  return r;
}

template <typename Scalar>
Scalar cross(const Vec2T<Scalar>& a, const Vec2T<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

template <typename Scalar>
struct Pose2T {
  Vec2T<Scalar> position = Vec2T<Scalar>::Zero();
  Scalar heading = 0;

  Pose2T() = default;
  Pose2T(const Vec2T<Scalar>& p, Scalar theta)
      : position(p), heading(normalize_angle(theta)) {}
  Pose2T(Scalar x, Scalar y, Scalar theta)
      : position(x, y), heading(normalize_angle(theta)) {}

  Vec2T<Scalar> forward() const {
    return {std::cos(heading), std::sin(heading)};
  }
};

template <typename Scalar>
struct SegmentT {
  Vec2T<Scalar> a = Vec2T<Scalar>::Zero();
  Vec2T<Scalar> b = Vec2T<Scalar>::Zero();

  SegmentT() = default;
  SegmentT(const Vec2T<Scalar>& a_, const Vec2T<Scalar>& b_) : a(a_), b(b_) {}
  SegmentT(Scalar x1, Scalar y1, Scalar x2, Scalar y2) : a(x1, y1), b(x2, y2) {}

  Scalar length() const { return (b - a).norm(); }
  bool degenerate() const { return a == b; }
};

using Vec2 = Vec2T<double>;
using Pose2 = Pose2T<double>;
using Segment = SegmentT<double>;

/// Expresses world point p in the coordinates of frame: R(-theta) (p - origin).
template <typename Scalar>
Vec2T<Scalar> transform_to_frame(const Vec2T<Scalar>& p, const Pose2T<Scalar>& frame) {
  return rotation(-frame.heading) * (p - frame.position);
}

/// Inverse of transform_to_frame.
template <typename Scalar>
Vec2T<Scalar> transform_from_frame(const Vec2T<Scalar>& p, const Pose2T<Scalar>& frame) {
  return rotation(frame.heading) * p + frame.position;
}

/// Rotates a free vector (velocity, direction) into the frame; no translation.
template <typename Scalar>
Vec2T<Scalar> rotate_to_frame(const Vec2T<Scalar>& v, const Pose2T<Scalar>& frame) {
  return rotation(-frame.heading) * v;
}

template <typename Scalar>
Vec2T<Scalar> closest_point_on_segment(const Vec2T<Scalar>& p, const SegmentT<Scalar>& seg) {
  const Vec2T<Scalar> ab = seg.b - seg.a;
  const Scalar len2 = ab.squaredNorm();
  if (len2 == Scalar(0)) return seg.a;
  const Scalar t = std::clamp((p - seg.a).dot(ab) / len2, Scalar(0), Scalar(1));
  return seg.a + t * ab;
}

template <typename Scalar>
Scalar point_segment_distance(const Vec2T<Scalar>& p, const SegmentT<Scalar>& seg) {
  return (p - closest_point_on_segment(p, seg)).norm();
}

/// Smallest t >= 0 with origin + t*dir on seg. dir must be unit length.
/// A ray collinear with the segment reports the nearest point of the overlap.
template <typename Scalar>
std::optional<Scalar> ray_segment_intersect(const Vec2T<Scalar>& origin, const Vec2T<Scalar>& dir,
                                            const SegmentT<Scalar>& seg) {
  const Vec2T<Scalar> e = seg.b - seg.a;
  const Vec2T<Scalar> w = seg.a - origin;
  const Scalar denom = cross(dir, e);
  const Scalar scale = std::max<Scalar>(e.norm(), 1);
  if (std::abs(denom) <= Scalar(1e-12) * scale) {
    if (std::abs(cross(w, dir)) > Scalar(1e-12) * std::max<Scalar>(w.norm(), 1)) return std::nullopt;
    const Scalar ta = w.dot(dir);
    const Scalar tb = (seg.b - origin).dot(dir);
    if (ta < 0 && tb < 0) return std::nullopt;
    if ((ta <= 0) != (tb <= 0)) return Scalar(0);
    return std::min(ta, tb);
  }
  const Scalar t = cross(w, e) / denom;
  const Scalar u = cross(w, dir) / denom;
  if (t < 0 || u < 0 || u > 1) return std::nullopt;
  return t;
}

/// Smallest t >= 0 where the ray meets the closed disc. Origin inside gives 0.
template <typename Scalar>
std::optional<Scalar> ray_circle_intersect(const Vec2T<Scalar>& origin, const Vec2T<Scalar>& dir,
                                           const Vec2T<Scalar>& center, Scalar radius) {
  const Vec2T<Scalar> oc = origin - center;
  const Scalar c = oc.squaredNorm() - radius * radius;
  if (c <= 0) return Scalar(0);
  const Scalar b = oc.dot(dir);
  if (b >= 0) return std::nullopt;
  const Scalar disc = b * b - c;
  if (disc < 0) return std::nullopt;
  return -b - std::sqrt(disc);
}

/// Closed-segment intersection test (touching counts).
template <typename Scalar>
bool segments_intersect(const SegmentT<Scalar>& s1, const SegmentT<Scalar>& s2) {
  auto orient = [](const Vec2T<Scalar>& a, const Vec2T<Scalar>& b, const Vec2T<Scalar>& c) {
    const Scalar v = cross<Scalar>(b - a, c - a);
    return (v > 0) - (v < 0);
  };
  auto on_segment = [](const Vec2T<Scalar>& a, const Vec2T<Scalar>& b, const Vec2T<Scalar>& p) {
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
  };
  const int o1 = orient(s1.a, s1.b, s2.a);
  const int o2 = orient(s1.a, s1.b, s2.b);
  const int o3 = orient(s2.a, s2.b, s1.a);
  const int o4 = orient(s2.a, s2.b, s1.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(s1.a, s1.b, s2.a)) return true;
  if (o2 == 0 && on_segment(s1.a, s1.b, s2.b)) return true;
  if (o3 == 0 && on_segment(s2.a, s2.b, s1.a)) return true;
  if (o4 == 0 && on_segment(s2.a, s2.b, s1.b)) return true;
  return false;
}

/// Minimum distance between two closed segments.
template <typename Scalar>
Scalar segment_segment_distance(const SegmentT<Scalar>& s1, const SegmentT<Scalar>& s2) {
  if (segments_intersect(s1, s2)) return 0;
  return std::min({point_segment_distance(s1.a, s2), point_segment_distance(s1.b, s2),
                   point_segment_distance(s2.a, s1), point_segment_distance(s2.b, s1)});
}

template <typename Scalar>
bool all_finite(const Vec2T<Scalar>& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y());
}

}  // namespace socnav::geom
