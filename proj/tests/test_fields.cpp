#include <gtest/gtest.h>

#include <random>

#include "gnnlab/fields.hpp"

using namespace gnnlab;

namespace {

std::vector<FieldSpec> families() {
  return {FieldSpec::constant(1.3),
          FieldSpec::radial_polynomial({1.0, 0.0, -1.0}),
          FieldSpec::radial_polynomial({0.5, 0.2, 0.3, -0.1}),
          FieldSpec::axial_linear(0.1),
          FieldSpec::axial_linear(-0.3, 2.0, 0.7),
          FieldSpec::angular_harmonic(0.2, 2.0, 3),
          FieldSpec::angular_harmonic(0.05, 1.0, 1, 1.0, 0.4),
          FieldSpec::angular_harmonic(0.1, 3.5, 0),
          FieldSpec::sum({FieldSpec::axial_linear(0.1), FieldSpec::angular_harmonic(0.2, 2.0, 2, 0.0)})};
}

Vec2 random_interior(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> r(0.05, 0.95), a(0, kTwoPi);
  const double rr = r(rng), th = a(rng);
  return rr * Vec2(std::cos(th), std::sin(th));
}

}  // namespace

TEST(FieldSpecTest, EvalExamples) {
  EXPECT_EQ(eval_kappa(FieldSpec::constant(1.0), Vec2(0.3, -0.4)), 1.0);
  EXPECT_DOUBLE_EQ(eval_kappa(FieldSpec::axial_linear(0.1), Vec2(0.0, 0.5)), 1.05);
  EXPECT_DOUBLE_EQ(eval_kappa(FieldSpec::radial_polynomial({1.0, 0.0, -1.0}), Vec2(0.3, 0.4)), 0.75);
}

TEST(FieldSpecTest, NonnegFlagRejectsNegativeValues) {
  FieldSpec k = FieldSpec::axial_linear(2.0);
  k.set_nonneg(true);
  EXPECT_THROW(eval_kappa(k, Vec2(0.0, -0.9)), ValidationError);
  EXPECT_NO_THROW(eval_kappa(k, Vec2(0.0, 0.9)));
}

TEST(FieldSpecTest, GradientSplittingIdentity) {
  std::mt19937_64 rng(17);
  for (const auto& spec : families()) {
    for (int t = 0; t < 100; ++t) {
      const Vec2 x = random_interior(rng);
      const double g2 = spec.gradient(x).squaredNorm();
      const double dr = spec.radial_derivative(x), dt = spec.angular_gradient_norm(x);
      EXPECT_NEAR(g2, dr * dr + dt * dt, 1e-10) << spec.family_name();
    }
  }
}

TEST(FieldSpecTest, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(23);
  const double h = 1e-5;
  for (const auto& spec : families()) {
    for (int t = 0; t < 100; ++t) {
      const Vec2 x = random_interior(rng);
      const Vec2 g = spec.gradient(x);
      for (int c = 0; c < 2; ++c) {
        Vec2 e = Vec2::Zero();
        e[c] = h;
        const double fd = (spec.value(x + e) - spec.value(x - e)) / (2 * h);
        EXPECT_NEAR(g[c], fd, 1e-6) << spec.family_name();
      }
    }
  }
}

TEST(FieldSpecTest, HarmonicPhasePeriodicity) {
  std::mt19937_64 rng(29);
  for (int k : {1, 2, 5}) {
    const FieldSpec a = FieldSpec::angular_harmonic(0.3, 2.0, k, 1.0, 0.2);
    const FieldSpec b = FieldSpec::angular_harmonic(0.3, 2.0, k, 1.0, 0.2 + kTwoPi / k);
    for (int t = 0; t < 100; ++t) {
      const Vec2 x = random_interior(rng);
      EXPECT_NEAR(a.value(x), b.value(x), 1e-13);
    }
  }
}

TEST(FieldSpecTest, RotationMovesValues) {
  const FieldSpec k = FieldSpec::axial_linear(0.2);
  const FieldSpec r = k.rotated(0.5);
  const Vec2 x(0.3, 0.4);
  const Vec2 xr(std::cos(0.5) * x.x() - std::sin(0.5) * x.y(), std::sin(0.5) * x.x() + std::cos(0.5) * x.y());
  EXPECT_NEAR(r.value(xr), k.value(x), 1e-14);
}

TEST(FieldSpecTest, RadialDetection) {
  EXPECT_TRUE(FieldSpec::constant(2).is_radial());
  EXPECT_TRUE(FieldSpec::radial_polynomial({1, 0, -1}).is_radial());
  EXPECT_FALSE(FieldSpec::axial_linear(0.1).is_radial());
  EXPECT_TRUE(FieldSpec::axial_linear(0.0).is_radial());
}

TEST(FieldSpecTest, JsonRoundTrip) {
  for (const auto& spec : families()) {
    const json j = spec;
    const FieldSpec back = j.get<FieldSpec>();
    EXPECT_EQ(json(back).dump(), j.dump());
    const Vec2 x(0.2, -0.5);
    EXPECT_EQ(back.value(x), spec.value(x));
  }
  EXPECT_THROW(json({{"family", "spline"}}).get<FieldSpec>(), ValidationError);
  EXPECT_THROW(json::parse(R"({"family":"radial-polynomial","params":{}})").get<FieldSpec>(), ValidationError);
}

TEST(Nonlinearity, ValuesAndDerivatives) {
  const auto p = NonlinearitySpec::power(2.0, 3.0);
  EXPECT_DOUBLE_EQ(p.value(0.5), 0.25);
  EXPECT_DOUBLE_EQ(p.derivative(0.5), 1.5);
  const auto ap = NonlinearitySpec::affine_power(1.0, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(ap.value(2.0), 5.0);
  const auto t = NonlinearitySpec::table({0.0, 1.0, 2.0}, {1.0, 3.0, 2.0});
  EXPECT_DOUBLE_EQ(t.value(0.5), 2.0);
  EXPECT_DOUBLE_EQ(t.derivative(1.5), -1.0);
  // central differences
  for (const auto& f : {p, ap, NonlinearitySpec::power(1.0, 1.5)}) {
    for (double s : {0.2, 0.7, 1.3}) {
      EXPECT_NEAR(f.derivative(s), (f.value(s + 1e-6) - f.value(s - 1e-6)) / 2e-6, 1e-6);
    }
  }
}

TEST(Nonlinearity, LipschitzConstants) {
  EXPECT_EQ(NonlinearitySpec::constant(3.0).lipschitz(10.0), 0.0);
  EXPECT_NEAR(NonlinearitySpec::power(2.0, 3.0).lipschitz(2.0), 2.0 * 3.0 * 4.0, 1e-12);
  EXPECT_NEAR(NonlinearitySpec::affine_power(1.0, 0.5, 2.0).lipschitz(3.0), 3.0, 1e-12);
  EXPECT_NEAR(NonlinearitySpec::table({0, 1, 2}, {0, 3, 2}).lipschitz(2.0), 3.0, 1e-9);
}

TEST(Nonlinearity, JsonRoundTrip) {
  for (const auto& f : {NonlinearitySpec::constant(1.0), NonlinearitySpec::power(1.0, 2.0),
                        NonlinearitySpec::affine_power(1.0, 1.0, 2.0), NonlinearitySpec::table({0, 1}, {1, 2})}) {
    const json j = f;
    EXPECT_EQ(json(j.get<NonlinearitySpec>()).dump(), j.dump());
  }
  EXPECT_THROW(json({{"family", "exp"}}).get<NonlinearitySpec>(), ValidationError);
}

TEST(Hypotheses, ExamplesFromTheDocs) {
  const auto ok = check_hypotheses(FieldSpec::constant(1.0), NonlinearitySpec::constant(1.0), 1.0);
  EXPECT_TRUE(ok.ok());
  EXPECT_EQ(ok.kappa_min, 1.0);

  auto f = NonlinearitySpec::affine_power(-1.0, 1.0, 1.0);
  f.set_nonneg(true);
  EXPECT_FALSE(check_hypotheses(FieldSpec::constant(1.0), f, 2.0).ok());

  // sampled inf over the grid: the oracle is a direct scan of the boundary ring
  const auto r = check_hypotheses(FieldSpec::axial_linear(0.1), NonlinearitySpec::constant(1.0), 1.0);
  const DiskGrid g(129, 256);
  double best = 1e9;
  for (int j = 0; j < 256; ++j) best = std::min(best, 1.0 + 0.1 * g.point(128, j).y());
  EXPECT_DOUBLE_EQ(r.kappa_min, best);
  EXPECT_NEAR(r.kappa_min, 0.9, 1e-15);
  EXPECT_THROW(check_hypotheses(FieldSpec::constant(1.0), NonlinearitySpec::constant(1.0), 0.0), ValidationError);
}

TEST(RhsSpecTest, ProductSplitting) {
  const RHSSpec g = RHSSpec::product(FieldSpec::axial_linear(0.2), NonlinearitySpec::power(1.0, 2.0));
  const Vec2 x(0.3, 0.4);
  EXPECT_DOUBLE_EQ(g.value(x, 2.0), (1.0 + 0.2 * 0.4) * 4.0);
  EXPECT_DOUBLE_EQ(g.ds(x, 2.0), (1.0 + 0.2 * 0.4) * 4.0);
  EXPECT_NEAR(g.grad_x(x, 2.0).y(), 0.8, 1e-15);
  EXPECT_NEAR(g.radial_derivative(x, 2.0), 0.8 * 0.8, 1e-15);
  EXPECT_NEAR(g.angular_gradient_norm(x, 2.0), 0.8 * 0.6, 1e-15);
}
