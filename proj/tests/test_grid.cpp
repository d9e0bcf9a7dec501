#include <gtest/gtest.h>

#include <random>

#include "gnnlab/grid.hpp"

using namespace gnnlab;

TEST(Grid, SmallestGridNodes) {
  const DiskGrid g = build_grid(3, 8);
  EXPECT_EQ(g.r(0), 0.0);
  EXPECT_EQ(g.r(1), 0.5);
  EXPECT_EQ(g.r(2), 1.0);
  for (int j = 0; j < 8; ++j) EXPECT_NEAR(g.theta(j), j * std::numbers::pi / 4, 1e-15);
  EXPECT_EQ(g.node_count(), 1u + 2u * 8u);
  EXPECT_NEAR(g.point(2, 2).x(), 0.0, 1e-16);
  EXPECT_EQ(g.point(2, 2).y(), 1.0);
}

TEST(Grid, DefaultExperimentGrid) {
  const DiskGrid g = build_grid(129, 256);
  EXPECT_EQ(g.r(128), 1.0);
  EXPECT_DOUBLE_EQ(g.dr(), 1.0 / 128);
  // antipodal node exists for every node
  for (int j = 0; j < 256; ++j) {
    const Vec2 p = g.point(64, j), q = g.point(64, g.wrap(j + 128));
    EXPECT_NEAR((p + q).norm(), 0.0, 1e-15);
  }
}

TEST(Grid, RejectsBadCounts) {
  EXPECT_THROW(build_grid(2, 8), ValidationError);
  EXPECT_THROW(build_grid(3, 9), ValidationError);
  EXPECT_THROW(build_grid(3, 6), ValidationError);
}

TEST(Grid, NodeIterationCoversStorageOnce) {
  const DiskGrid g(5, 12);
  std::vector<int> hits(g.node_count(), 0);
  g.for_each_node([&](int, int, std::size_t k) { ++hits[k]; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(Interpolate, ExactAtNodes) {
  const DiskGrid g(17, 32);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  ScalarField f(g);
  for (double& v : f.values()) v = u(rng);
  g.for_each_node([&](int i, int j, std::size_t k) { EXPECT_EQ(interpolate(f, g.point(i, j)), f.values()[k]); });
}

TEST(Interpolate, LinearInRadiusIsExact) {
  const DiskGrid g(33, 64);
  const ScalarField f = ScalarField::sample(g, [](const Vec2& x) { return x.norm(); });
  for (double th : {0.0, 0.3, 1.7, 4.0}) {
    const Vec2 x = 0.37 * Vec2(std::cos(th), std::sin(th));
    EXPECT_NEAR(interpolate(f, x), 0.37, 1e-14);
  }
}

TEST(Interpolate, OutOfDomain) {
  const DiskGrid g(9, 16);
  const ScalarField f(g, 1.0);
  EXPECT_THROW(interpolate(f, Vec2(1.5, 0.0)), OutOfDomain);
  EXPECT_THROW(interpolate(f, Vec2(0.0, 1.0 + 1e-9)), OutOfDomain);
  EXPECT_NO_THROW(interpolate(f, Vec2(0.0, 1.0 + 1e-13)));
}

TEST(Interpolate, OriginUsesSharedValue) {
  const DiskGrid g(9, 16);
  ScalarField f(g, 0.0);
  f.at(0, 0) = 2.5;
  EXPECT_EQ(interpolate(f, Vec2::Zero()), 2.5);
  EXPECT_EQ(f.at(0, 7), 2.5);
}

TEST(Interpolate, ThetaShiftEquivariance) {
  const DiskGrid g(17, 32);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1), rad(0, 1), ang(0, kTwoPi);
  ScalarField f(g);
  for (double& v : f.values()) v = u(rng);
  const int k = 5;
  const ScalarField s = f.shifted(k);
  for (int t = 0; t < 200; ++t) {
    const double r = rad(rng), th = ang(rng);
    const Vec2 x = r * Vec2(std::cos(th), std::sin(th));
    const double th2 = th + k * g.dtheta();
    const Vec2 xr = r * Vec2(std::cos(th2), std::sin(th2));
    EXPECT_NEAR(interpolate(s, xr), interpolate(f, x), 1e-12);
  }
}

TEST(Reflections, PlaneExamples) {
  const Vec2 p = reflect_plane(Vec2(0.3, 0.2), 0.5);
  EXPECT_DOUBLE_EQ(p.x(), 0.3);
  EXPECT_DOUBLE_EQ(p.y(), 0.8);
  EXPECT_EQ(reflect_plane(Vec2(0.1, 0.4), 0.4), Vec2(0.1, 0.4));
}

TEST(Reflections, DirectionExamples) {
  const Vec2 p = reflect_direction(Vec2(0.3, 0.2), Vec2(0, 1));
  EXPECT_DOUBLE_EQ(p.x(), 0.3);
  EXPECT_DOUBLE_EQ(p.y(), -0.2);
  const Vec2 e = Vec2(1, 1).normalized();
  const Vec2 on_plane = Vec2(-0.2, 0.2);
  EXPECT_NEAR((reflect_direction(on_plane, e) - on_plane).norm(), 0.0, 1e-16);
  EXPECT_THROW(reflect_direction(p, Vec2(1, 1)), ValidationError);
}

TEST(Reflections, InvolutionIsometryAndCapShrink) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1), lam(0.01, 0.99);
  for (int t = 0; t < 1000; ++t) {
    const Vec2 x(u(rng), u(rng));
    const double l = lam(rng);
    EXPECT_NEAR((reflect_plane(reflect_plane(x, l), l) - x).norm(), 0.0, 1e-15);
    const double a = u(rng) * std::numbers::pi;
    const Vec2 e(std::cos(a), std::sin(a));
    EXPECT_NEAR((reflect_direction(reflect_direction(x, e), e) - x).norm(), 0.0, 1e-15);
    EXPECT_NEAR(reflect_direction(x, e).norm(), x.norm(), 1e-15);
    const Dome cap{l, 0.0};
    if (cap.contains(x)) {
      EXPECT_LT(reflect_plane(x, l).norm(), x.norm());
    }
  }
}

TEST(DomeTest, Membership) {
  const Dome cap{0.5, 0.0};
  EXPECT_TRUE(cap.contains(Vec2(0.0, 0.7)));
  EXPECT_FALSE(cap.contains(Vec2(0.0, 0.5)));
  EXPECT_FALSE(cap.contains(Vec2(0.0, 1.0)));
  const Dome inner{0.5, 0.1};
  EXPECT_TRUE(inner.contains(Vec2(0.0, 0.7)));
  EXPECT_FALSE(inner.contains(Vec2(0.0, 0.55)));
  EXPECT_FALSE(inner.contains(Vec2(0.0, 0.95)));
}
