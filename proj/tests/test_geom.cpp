#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "socnav/geom.hpp"

using namespace socnav::geom;

namespace {

constexpr double kPi = std::numbers::pi;

TEST(Geom, TransformExamples) {
  EXPECT_TRUE(transform_to_frame(Vec2(1, 0), Pose2(0, 0, 0)).isApprox(Vec2(1, 0)));
  const Vec2 q = transform_to_frame(Vec2(0, 1), Pose2(0, 0, kPi / 2));
  EXPECT_NEAR(q.x(), 1.0, 1e-12);
  EXPECT_NEAR(q.y(), 0.0, 1e-12);
  EXPECT_TRUE(transform_to_frame(Vec2(2, 2), Pose2(1, 1, 0)).isApprox(Vec2(1, 1)));
}

TEST(Geom, HeadingNormalizedToHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(Pose2(0, 0, -kPi).heading, kPi);
  EXPECT_DOUBLE_EQ(Pose2(0, 0, kPi).heading, kPi);
  EXPECT_NEAR(Pose2(0, 0, 3 * kPi / 2).heading, -kPi / 2, 1e-12);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> a(-50, 50);
  for (int i = 0; i < 10000; ++i) {
    const double h = normalize_angle(a(gen));
    EXPECT_GT(h, -kPi);
    EXPECT_LE(h, kPi);
  }
}

TEST(Geom, TransformRoundTripAndIsometry) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 10000; ++i) {
    const Pose2 frame(u(gen), u(gen), u(gen));
    const Vec2 p(u(gen), u(gen));
    const Vec2 q(u(gen), u(gen));
    const Vec2 back = transform_from_frame(transform_to_frame(p, frame), frame);
    ASSERT_LT((back - p).norm(), 1e-9);
    ASSERT_NEAR((transform_to_frame(p, frame) - transform_to_frame(q, frame)).norm(), (p - q).norm(), 1e-9);
  }
}

TEST(Geom, RayExamples) {
  const Segment wall(0, -1, 0, 1);
  auto t = ray_segment_intersect(Vec2(-1, 0), Vec2(1, 0), wall);
  ASSERT_TRUE(t);
  EXPECT_DOUBLE_EQ(*t, 1.0);
  EXPECT_FALSE(ray_segment_intersect(Vec2(-1, 0), Vec2(-1, 0), wall));
  EXPECT_FALSE(ray_segment_intersect(Vec2(0, 0), Vec2(1, 0), Segment(2, 1, 2, 3)));
}

TEST(Geom, RayCollinearOverlapHitsNearestPoint) {
  const Segment seg(2, 0, 4, 0);
  EXPECT_DOUBLE_EQ(*ray_segment_intersect(Vec2(0, 0), Vec2(1, 0), seg), 2.0);
  EXPECT_DOUBLE_EQ(*ray_segment_intersect(Vec2(3, 0), Vec2(1, 0), seg), 0.0);
  EXPECT_DOUBLE_EQ(*ray_segment_intersect(Vec2(6, 0), Vec2(-1, 0), seg), 2.0);
  EXPECT_FALSE(ray_segment_intersect(Vec2(5, 0), Vec2(1, 0), seg));
}

TEST(Geom, RayHitLiesOnSegment) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-5, 5);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  int hits = 0;
  for (int i = 0; i < 10000; ++i) {
    const Segment seg(u(gen), u(gen), u(gen), u(gen));
    const Vec2 o(u(gen), u(gen));
    const double a = ang(gen);
    const Vec2 dir(std::cos(a), std::sin(a));
    if (auto t = ray_segment_intersect(o, dir, seg)) {
      ++hits;
      ASSERT_GE(*t, 0.0);
      const Vec2 hit = o + *t * dir;
      ASSERT_LT((hit - closest_point_on_segment(hit, seg)).norm(), 1e-7);
    }
  }
  EXPECT_GT(hits, 1000);
}

TEST(Geom, PointSegmentExamples) {
  const Segment seg(-1, 0, 1, 0);
  EXPECT_DOUBLE_EQ(point_segment_distance(Vec2(0, 1), seg), 1.0);
  EXPECT_DOUBLE_EQ(point_segment_distance(Vec2(2, 0), seg), 1.0);
  EXPECT_DOUBLE_EQ(point_segment_distance(Vec2(0.5, 0), seg), 0.0);
}

TEST(Geom, PointSegmentMatchesSampledOracle) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const Segment seg(u(gen), u(gen), u(gen), u(gen));
    const Vec2 p(u(gen), u(gen));
    double brute = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 10000; ++k) {
      const double s = k / 10000.0;
      brute = std::min(brute, (p - (seg.a + s * (seg.b - seg.a))).norm());
    }
    const double d = point_segment_distance(p, seg);
    ASSERT_LE(d, brute + 1e-12);
    ASSERT_NEAR(d, brute, 1e-4);
  }
}

TEST(Geom, DeterministicBitIdentical) {
  const Vec2 p(0.123456789, -3.3);
  const Pose2 f(1.1, 2.2, 0.7);
  const Segment s(-1.5, 0.25, 2.5, 3.75);
  EXPECT_EQ(point_segment_distance(p, s), point_segment_distance(p, s));
  EXPECT_EQ(transform_to_frame(p, f), transform_to_frame(p, f));
}

TEST(Geom, RayCircle) {
  EXPECT_DOUBLE_EQ(*ray_circle_intersect(Vec2(0, 0), Vec2(1, 0), Vec2(2, 0), 0.5), 1.5);
  EXPECT_FALSE(ray_circle_intersect(Vec2(0, 0), Vec2(-1, 0), Vec2(2, 0), 0.5));
  EXPECT_FALSE(ray_circle_intersect(Vec2(0, 0), Vec2(1, 0), Vec2(2, 1), 0.5));
  EXPECT_DOUBLE_EQ(*ray_circle_intersect(Vec2(2, 0.1), Vec2(1, 0), Vec2(2, 0), 0.5), 0.0);
}

TEST(Geom, SegmentsIntersectAndDistance) {
  EXPECT_TRUE(segments_intersect(Segment(0, 0, 2, 2), Segment(0, 2, 2, 0)));
  EXPECT_TRUE(segments_intersect(Segment(0, 0, 1, 0), Segment(1, 0, 1, 1)));  // touching
  EXPECT_FALSE(segments_intersect(Segment(0, 0, 1, 0), Segment(0, 1, 1, 1)));
  EXPECT_DOUBLE_EQ(segment_segment_distance(Segment(0, 0, 1, 0), Segment(0, 1, 1, 1)), 1.0);
  EXPECT_DOUBLE_EQ(segment_segment_distance(Segment(0, 0, 2, 2), Segment(0, 2, 2, 0)), 0.0);
}

TEST(Geom, FloatInstantiation) {
  const Vec2T<float> p(1.0f, 0.0f);
  const Pose2T<float> frame(Vec2T<float>(0.0f, 0.0f), 0.0f);
  EXPECT_FLOAT_EQ(transform_to_frame(p, frame).x(), 1.0f);
  EXPECT_FLOAT_EQ(point_segment_distance(Vec2T<float>(0, 1), SegmentT<float>(-1, 0, 1, 0)), 1.0f);
}

}  // namespace
