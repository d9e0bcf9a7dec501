#pragma once

/// \file
/// Perturbed domains Omega_eps = Psi_eps(B_1) and the pulled-back problem on
/// the unit disk. For v = u o Psi, with Phi = Psi^{-1}:
///   A_ij = sum_k (d_k Phi^i o Psi)(d_k Phi^j o Psi),  b_i = -(Lap Phi^i) o Psi.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gnnlab/errors.hpp"
#include "gnnlab/fields.hpp"
#include "gnnlab/grid.hpp"
#include "gnnlab/operator.hpp"
#include "gnnlab/symmetry.hpp"

namespace gnnlab {

enum class MapKind { ellipsoid, normal_perturbation };

inline const char* to_string(MapKind k) { return k == MapKind::ellipsoid ? "ellipsoid" : "normal-perturbation"; }

/// phi(theta) = sum amp cos(k (theta - phase)) on the unit circle.
struct BoundaryProfile {
  struct Mode {
    double amp = 1.0;
    int k = 0;
    double phase = 0.0;
  };
  std::vector<Mode> modes;

  static BoundaryProfile harmonic(double amp, int k, double phase = 0.0) { return {{{amp, k, phase}}}; }

  /// n-th derivative in theta, n in {0, 1, 2, 3}.
  double derivative(double theta, int n) const {
    double acc = 0.0;
    for (const auto& m : modes) {
      const double arg = m.k * (theta - m.phase);
      const double kn = std::pow(static_cast<double>(m.k), n);
      switch (n % 4) {
        case 0: acc += m.amp * kn * std::cos(arg); break;
        case 1: acc -= m.amp * kn * std::sin(arg); break;
        case 2: acc -= m.amp * kn * std::cos(arg); break;
        default: acc += m.amp * kn * std::sin(arg); break;
      }
    }
    return acc;
  }
  double value(double theta) const { return derivative(theta, 0); }

  /// max_{n <= 3} sup |phi^(n)|, sampled on 4096 angles.
  double c3_norm() const {
    double best = 0.0;
    constexpr int kSamples = 4096;
    for (int q = 0; q < kSamples; ++q) {
      const double th = kTwoPi * q / kSamples;
      for (int n = 0; n <= 3; ++n) best = std::max(best, std::abs(derivative(th, n)));
    }
    return best;
  }
  double min_value() const {
    double best = std::numeric_limits<double>::infinity();
    for (int q = 0; q < 4096; ++q) best = std::min(best, value(kTwoPi * q / 4096));
    return best;
  }
  double max_value() const {
    double best = -std::numeric_limits<double>::infinity();
    for (int q = 0; q < 4096; ++q) best = std::max(best, value(kTwoPi * q / 4096));
    return best;
  }
};

/// Cutoff eta: 0 on [0, 1/4], 1 on [1/2, inf), quintic smoothstep in between.
inline double cutoff(double r) {
  const double t = std::clamp(4.0 * r - 1.0, 0.0, 1.0);
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}
inline double cutoff_derivative(double r) {
  const double t = 4.0 * r - 1.0;
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 4.0 * 30.0 * t * t * (1.0 - t) * (1.0 - t);
}

class DomainMap {
 public:
  MapKind kind() const { return kind_; }
  double eps() const { return eps_; }
  const BoundaryProfile& profile() const { return profile_; }
  /// Semi-axis along e_n for the ellipsoid.
  double axis() const { return 1.0 + eps_; }

  Vec2 forward(const Vec2& y) const {
    if (eps_ == 0.0) return y;
    if (kind_ == MapKind::ellipsoid) return {y.x(), axis() * y.y()};
    const double r = y.norm();
    if (r == 0.0) return y;
    return (1.0 + eps_ * cutoff(r) * profile_.value(std::atan2(y.y(), y.x()))) * y;
  }

  /// Per-ray scalar Newton for the normal perturbation: the direction is kept
  /// and r -> (1 + eps eta(r) phi) r is strictly increasing.
  Vec2 inverse(const Vec2& x) const {
    if (eps_ == 0.0) return x;
    if (kind_ == MapKind::ellipsoid) return {x.x(), x.y() / axis()};
    const double rho = x.norm();
    if (rho == 0.0) return x;
    const double phi = profile_.value(std::atan2(x.y(), x.x()));
    double r = rho / (1.0 + eps_ * phi);
    for (int it = 0; it < 60; ++it) {
      const double eta = cutoff(r);
      const double F = (1.0 + eps_ * eta * phi) * r - rho;
      const double dF = 1.0 + eps_ * phi * (eta + r * cutoff_derivative(r));
      const double step = F / dF;
      r -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, r)) break;
    }
    return (r / rho) * x;
  }

  /// D Psi(y), analytic.
  Mat2 jacobian(const Vec2& y) const {
    if (eps_ == 0.0) return Mat2::Identity();
    if (kind_ == MapKind::ellipsoid) return Mat2{{1.0, 0.0}, {0.0, axis()}};
    const double r = y.norm();
    if (r == 0.0) return Mat2::Identity();
    const double th = std::atan2(y.y(), y.x());
    const double eta = cutoff(r), phi = profile_.value(th);
    const Vec2 er = y / r, et(-er.y(), er.x());
    const Vec2 grad_s = eps_ * (cutoff_derivative(r) * phi * er + eta * profile_.derivative(th, 1) / r * et);
    return (1.0 + eps_ * eta * phi) * Mat2::Identity() + y * grad_s.transpose();
  }

  friend DomainMap make_map(MapKind kind, double eps, BoundaryProfile profile);

 private:
  MapKind kind_ = MapKind::ellipsoid;
  double eps_ = 0.0;
  BoundaryProfile profile_;
};

/// Ellipsoid: Psi(y) = (y', (1 + eps) y_n). Normal perturbation:
/// Psi(y) = (1 + eps eta(|y|) phi(y/|y|)) y, accepted when eps ||phi||_{C^3} <= 1/2
/// and the radial profile stays strictly increasing.
inline DomainMap make_map(MapKind kind, double eps, BoundaryProfile profile = {}) {
  if (!(eps >= 0.0 && eps <= 0.5)) throw ValidationError("make_map: eps must lie in [0, 1/2]");
  DomainMap m;
  m.kind_ = kind;
  m.eps_ = eps;
  if (kind == MapKind::normal_perturbation) {
    const double norm = profile.c3_norm();
    if (eps * norm > 0.5 + 1e-12)
      throw ValidationError("make_map: eps * ||phi||_C3 = " + std::to_string(eps * norm) + " exceeds 1/2");
    double growth = 0.0;  // max_r (eta + r eta')
    for (int q = 0; q <= 4000; ++q) {
      const double r = 0.25 + 0.25 * q / 4000.0;
      growth = std::max(growth, cutoff(r) + r * cutoff_derivative(r));
    }
    const double worst = 1.0 + eps * std::min({0.0, profile.min_value() * growth, profile.max_value() * growth});
    if (!(worst > 0.0)) throw ValidationError("make_map: radial profile is not monotone; map not invertible");
    m.profile_ = std::move(profile);
  }
  return m;
}

inline void to_json(json& j, const DomainMap& m) {
  json modes = json::array();
  for (const auto& md : m.profile().modes) modes.push_back({{"amp", md.amp}, {"k", md.k}, {"phase", md.phase}});
  j = {{"kind", to_string(m.kind())}, {"eps", m.eps()}, {"profile", modes}};
}

inline MapKind parse_map_kind(const std::string& s) {
  if (s == "ellipsoid") return MapKind::ellipsoid;
  if (s == "normal-perturbation") return MapKind::normal_perturbation;
  throw ValidationError("map: unknown kind \"" + s + "\"");
}

inline BoundaryProfile profile_from_json(const json& j) {
  BoundaryProfile p;
  if (j.is_null()) return p;
  for (const auto& md : j) p.modes.push_back({md.value("amp", 1.0), md.value("k", 0), md.value("phase", 0.0)});
  return p;
}

inline DomainMap map_from_json(const json& j) {
  try {
    return make_map(parse_map_kind(j.at("kind").get<std::string>()), j.value("eps", 0.0),
                    profile_from_json(j.value("profile", json::array())));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("map: ") + e.what());
  }
}

struct PullbackCoefficients {
  Mat2 A;
  Vec2 b;
};

/// Coefficients of the pulled-back operator at y. Ellipsoid: closed form.
/// Normal perturbation: fourth-order central differences of Phi at Psi(y),
/// step 1e-4.
inline PullbackCoefficients pullback_coefficients(const DomainMap& map, const Vec2& y) {
  if (map.eps() == 0.0) return {Mat2::Identity(), Vec2::Zero()};
  if (map.kind() == MapKind::ellipsoid) {
    const double ia = 1.0 / map.axis();
    return {Mat2{{1.0, 0.0}, {0.0, ia * ia}}, Vec2::Zero()};
  }
  constexpr double h = 1e-4;
  const Vec2 x = map.forward(y);
  const Vec2 phi0 = map.inverse(x);
  Mat2 D;       // D(i, k) = d_k Phi^i
  Vec2 lap = Vec2::Zero();
  for (int k = 0; k < 2; ++k) {
    Vec2 e = Vec2::Zero();
    e[k] = h;
    const Vec2 p1 = map.inverse(x + e), m1 = map.inverse(x - e);
    const Vec2 p2 = map.inverse(x + 2.0 * e), m2 = map.inverse(x - 2.0 * e);
    D.col(k) = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    lap += (-p2 + 16.0 * p1 - 30.0 * phi0 + 16.0 * m1 - m2) / (12.0 * h * h);
  }
  return {D * D.transpose(), -lap};
}

struct PullbackProblem {
  OperatorSpec op;
  RHSSpec rhs;
  EllipticitySample ellipticity;
};

/// The operator L and right-hand side f(v) of the problem solved by
/// v = u o Psi on the unit disk.
inline PullbackProblem pullback(const DomainMap& map, const NonlinearitySpec& f) {
  PullbackProblem out;
  out.op.A = [map](const Vec2& y) { return pullback_coefficients(map, y).A; };
  out.op.b = [map](const Vec2& y) { return pullback_coefficients(map, y).b; };
  out.op.label = std::string("pullback:") + to_string(map.kind());
  out.ellipticity = sample_ellipticity(out.op.A, DiskGrid(65, 128));
  if (!(out.ellipticity.min_eigenvalue > 0.0))
    throw ValidationError("pullback: loss of ellipticity (eps too large)");
  // Sampled estimate, padded so that finer solve grids still pass validation.
  out.op.ellipticity = out.ellipticity.lambda_estimate() * 1.05;
  out.rhs = RHSSpec::of(f);
  return out;
}

struct MappedAsymmetry {
  std::vector<double> osc_profile;  ///< osc of u over each ring |y| = r_i
  double sup = 0.0;
};

/// Oscillation of the ball-coordinate solution over the rings |y| = r, which
/// the map sends onto the level curves {|Psi^{-1}(x)| = r}.
inline MappedAsymmetry mapped_asymmetry(const ScalarField& u_on_ball, const DomainMap& map) {
  (void)map;
  MappedAsymmetry out;
  out.osc_profile = ring_oscillation(u_on_ball);
  out.sup = *std::max_element(out.osc_profile.begin(), out.osc_profile.end());
  return out;
}

}  // namespace gnnlab
