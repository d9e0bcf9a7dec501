#include <gtest/gtest.h>

#include "gnnlab/deficits.hpp"
#include "gnnlab/domains.hpp"

using namespace gnnlab;

namespace {
// Brute-force maximization of the deficit terms on a dense polar grid, written
// directly from the definitions with finite-difference derivatives.
std::pair<double, double> brute_deficit(const FieldSpec& k, int nr, int nt) {
  double ang = 0, rad = 0;
  const double h = 1e-6;
  for (int i = 1; i < nr; ++i) {
    const double r = static_cast<double>(i) / (nr - 1);
    for (int j = 0; j < nt; ++j) {
      const double t = kTwoPi * j / nt;
      const double rr = std::max(r - h, 0.0);
      const double dr = (k.value(r * Vec2(std::cos(t), std::sin(t))) - k.value(rr * Vec2(std::cos(t), std::sin(t)))) / (r - rr);
      const double dt = (k.value(r * Vec2(std::cos(t + h), std::sin(t + h))) - k.value(r * Vec2(std::cos(t - h), std::sin(t - h)))) /
                        (2 * h * r);
      ang = std::max(ang, std::abs(dt));
      rad = std::max(rad, dr);
    }
  }
  return {ang, rad};
}
}  // namespace

TEST(DeficitKappa, RadialNonincreasingIsZero) {
  EXPECT_EQ(deficit_kappa(FieldSpec::constant(1.0)).total, 0.0);
  const auto d = deficit_kappa(FieldSpec::radial_polynomial({1.0, 0.0, -1.0}));
  EXPECT_NEAR(d.total, 0.0, 1e-14);
  EXPECT_EQ(d.method, "sampled");
}

TEST(DeficitKappa, AxialLinearIsTwoEps) {
  for (double eps : {0.0025, 0.1, 0.3}) {
    const auto d = deficit_kappa(FieldSpec::axial_linear(eps));
    EXPECT_DOUBLE_EQ(d.angular_term, eps);
    EXPECT_DOUBLE_EQ(d.radial_term, eps);
    EXPECT_DOUBLE_EQ(d.total, 2 * eps);
    const auto [ang, rad] = brute_deficit(FieldSpec::axial_linear(eps), 257, 512);
    EXPECT_NEAR(ang, eps, 1e-6 * (1 + eps));
    EXPECT_NEAR(rad, eps, 1e-6 * (1 + eps));
  }
}

TEST(DeficitKappa, AngularIdentityForAxialLinear) {
  // |grad^T kappa|^2 = eps^2 (1 - x_n^2 / |x|^2)
  const FieldSpec k = FieldSpec::axial_linear(0.2);
  for (const Vec2 x : {Vec2(0.3, 0.4), Vec2(-0.7, 0.1), Vec2(0.05, -0.5)}) {
    const double g = k.angular_gradient_norm(x);
    EXPECT_NEAR(g * g, 0.04 * (1 - x.y() * x.y() / x.squaredNorm()), 1e-15);
  }
}

TEST(DeficitKappa, SampledAgreesWithClosedFormWithinTwoPercent) {
  for (const auto& k : {FieldSpec::axial_linear(0.1), FieldSpec::axial_linear(0.2, 1.0, 0.3),
                        FieldSpec::angular_harmonic(0.1, 2.0, 3), FieldSpec::angular_harmonic(0.05, 1.0, 1, 1.0, 0.4),
                        FieldSpec::angular_harmonic(0.1, 2.0, 0)}) {
    const auto a = deficit_kappa(k);
    const auto s = deficit_kappa(k, {}, DeficitMethod::sampled);
    EXPECT_EQ(a.method, "analytic");
    EXPECT_EQ(s.method, "sampled");
    EXPECT_NEAR(s.total, a.total, 0.02 * a.total) << k.family_name();
  }
}

TEST(DeficitKappa, HomogeneousOfDegreeOne) {
  const Resolution res{128, 256};
  for (bool sampled : {false, true}) {
    const auto m = sampled ? DeficitMethod::sampled : DeficitMethod::automatic;
    const double d1 = deficit_kappa(FieldSpec::angular_harmonic(0.05, 2.0, 2), res, m).total;
    for (double t : {2.0, 4.0}) {
      const double dt = deficit_kappa(FieldSpec::angular_harmonic(0.05 * t, 2.0, 2), res, m).total;
      EXPECT_NEAR(dt / d1, t, 1e-9);
    }
  }
}

TEST(DeficitKappa, RotationInvariant) {
  const FieldSpec k = FieldSpec::sum({FieldSpec::axial_linear(0.1), FieldSpec::angular_harmonic(0.05, 2.0, 2, 0.0)});
  const Resolution res{256, 512};
  const double base = deficit_kappa(k, res).total;
  // rotations by whole angular steps map the sample set onto itself
  for (int s : {3, 17, 100}) EXPECT_NEAR(deficit_kappa(k.rotated(s * kTwoPi / 512), res).total, base, 1e-6);
}

TEST(DeficitZeroth, Examples) {
  EXPECT_NEAR(deficit_zeroth(FieldSpec::radial_polynomial({1.0, 0.0, -1.0})), 0.0, 1e-14);
  EXPECT_NEAR(deficit_zeroth(FieldSpec::axial_linear(0.1)), 0.3, 1e-12);
  const double d = deficit_zeroth(FieldSpec::radial_polynomial({1.0, 0.0, 0.1}));
  EXPECT_NEAR(d, 0.1, 1e-12);
}

TEST(DeficitGeneral, TrivialAndEllipsoidCases) {
  const Resolution res{128, 256};
  const auto r0 = deficit_general(OperatorSpec::laplacian(), RHSSpec::of(NonlinearitySpec::power(1.0, 2.0)), 1.0, res);
  EXPECT_EQ(r0.total, 0.0);
  for (double eps : {0.01, 0.1}) {
    const double a = 1 + eps;
    const auto r = deficit_general(
        OperatorSpec::constant(Mat2{{1.0, 0.0}, {0.0, 1 / (a * a)}}, Vec2::Zero(), a * a),
        RHSSpec::of(NonlinearitySpec::constant(1.0)), 1.0, res);
    EXPECT_NEAR(r.A_term, 1 - 1 / (a * a), 1e-15);
    EXPECT_EQ(r.A_lip, 0.0);
    EXPECT_EQ(r.total, r.A_term);
  }
  EXPECT_THROW(deficit_general(OperatorSpec::laplacian(), RHSSpec::of(NonlinearitySpec::constant(1)), 0.0), ValidationError);
}

TEST(DeficitGeneral, RadialDecreasingRhsHasZeroTotal) {
  const auto r = deficit_general(OperatorSpec::laplacian(),
                                 RHSSpec::product(FieldSpec::radial_polynomial({1.0, 0.0, -1.0}), NonlinearitySpec::affine_power(1.0, 1.0, 2.0)),
                                 2.0, {128, 256});
  EXPECT_NEAR(r.total, 0.0, 1e-13);
}

TEST(DeficitGeneral, GTermForLinearXDependence) {
  const double eps = 0.1, U = 1.5;
  const auto r = deficit_general(OperatorSpec::laplacian(),
                                 RHSSpec::product(FieldSpec::axial_linear(eps), NonlinearitySpec::power(1.0, 1.0)), U, {256, 512});
  // sup over s in [0, U] of the deficit split of kappa, scaled by s
  const auto dk = deficit_kappa(FieldSpec::axial_linear(eps), {256, 512}, DeficitMethod::sampled);
  EXPECT_NEAR(r.G_angular, dk.angular_term * U, 1e-12);
  EXPECT_NEAR(r.G_radial, dk.radial_term * U, 1e-12);
  EXPECT_NEAR(r.G_term, 2 * eps * U, 1e-3 * eps * U);
}

TEST(DeficitGeneral, LipschitzSeminormOfVariableCoefficients) {
  // A = (1 + 0.1 x_1) I: seminorm 0.1 in the max-entry norm.
  OperatorSpec op;
  op.A = [](const Vec2& x) -> Mat2 { return (1 + 0.1 * x.x()) * Mat2::Identity(); };
  op.b = [](const Vec2& x) -> Vec2 { return Vec2(0.2 * x.y(), 0.0); };
  op.ellipticity = 1.2;
  const auto r = deficit_general(op, RHSSpec::of(NonlinearitySpec::constant(1)), 1.0, {128, 256});
  EXPECT_NEAR(r.A_sup, 0.1, 1e-12);
  EXPECT_NEAR(r.A_lip, 0.1, 1e-3);
  EXPECT_NEAR(r.b_sup, 0.2, 1e-12);
  EXPECT_NEAR(r.b_lip, 0.2, 2e-3);
}

TEST(DeficitReportJson, Schema) {
  const json j = deficit_kappa(FieldSpec::axial_linear(0.1));
  for (const char* k : {"angular", "radial", "total", "method"}) EXPECT_TRUE(j.contains(k)) << k;
}
