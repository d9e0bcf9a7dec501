#pragma once

// Independent reference computations used only by tests. None of these share
// code paths with the library's polar discretization.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Radial shooting for u'' + u'/r = -k(r) f(u), u'(0) = 0, u(1) = 0.

struct RadialOde {
  std::function<double(double)> k;  // kappa(r)
  std::function<double(double)> f;
};

// Integrates from r = 0 with value u0 and returns u(r_end). A two-term series
// handles the regular singular point.
inline double shoot(const RadialOde& ode, double u0, double r_end = 1.0, int steps = 20000,
                    std::vector<double>* profile = nullptr) {
  const double r0 = 1e-6;
  const double c = ode.k(0.0) * ode.f(u0);
  double u = u0 - c * r0 * r0 / 4.0, v = -c * r0 / 2.0;
  const double h = (r_end - r0) / steps;
  auto rhs = [&](double r, double uu, double vv, double& du, double& dv) {
    du = vv;
    dv = -vv / r - ode.k(r) * ode.f(uu);
  };
  if (profile) profile->assign(1, u0);
  double r = r0;
  for (int s = 0; s < steps; ++s) {
    double a1, b1, a2, b2, a3, b3, a4, b4;
    rhs(r, u, v, a1, b1);
    rhs(r + h / 2, u + h / 2 * a1, v + h / 2 * b1, a2, b2);
    rhs(r + h / 2, u + h / 2 * a2, v + h / 2 * b2, a3, b3);
    rhs(r + h, u + h * a3, v + h * b3, a4, b4);
    u += h / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
    v += h / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
    r += h;
    if (profile) profile->push_back(u);
  }
  return u;
}

// Secant iteration on u(0) so that u(1) = 0, from two starting guesses.
inline double shoot_center_value(const RadialOde& ode, double g0, double g1) {
  double f0 = shoot(ode, g0), f1 = shoot(ode, g1);
  for (int it = 0; it < 60 && std::abs(f1) > 1e-14; ++it) {
    const double g2 = g1 - f1 * (g1 - g0) / (f1 - f0);
    g0 = g1, f0 = f1;
    g1 = g2, f1 = shoot(ode, g1);
  }
  return g1;
}

// First zero R of w'' + w'/r + w^p = 0, w(0) = 1. Then u(x) = R^{2/(p-1)} w(R|x|)
// solves -Lap u = u^p on the unit disk.
inline double lane_emden_first_zero(double p) {
  const double r0 = 1e-6, h = 1e-5;
  double w = 1.0 - r0 * r0 / 4.0, v = -r0 / 2.0, r = r0;
  auto acc = [p](double rr, double ww, double vv) { return -vv / rr - std::pow(std::max(ww, 0.0), p); };
  while (true) {
    const double a1 = v, b1 = acc(r, w, v);
    const double a2 = v + h / 2 * b1, b2 = acc(r + h / 2, w + h / 2 * a1, v + h / 2 * b1);
    const double a3 = v + h / 2 * b2, b3 = acc(r + h / 2, w + h / 2 * a2, v + h / 2 * b2);
    const double a4 = v + h * b3, b4 = acc(r + h, w + h * a3, v + h * b3);
    const double wn = w + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
    const double vn = v + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
    if (wn <= 0.0) return r + h * w / (w - wn);  // linear crossing; error O(h^2)
    w = wn, v = vn, r += h;
  }
}

// ---------------------------------------------------------------------------
// Shortley-Weller embedded-boundary solve of -Lap w = 1 on the star-shaped
// domain {rho < R(theta)} with w = 0 on its boundary, Cartesian spacing h.
// Boundary crossings along grid lines are located by bisection.

struct CartesianSolution {
  double h = 0.0;
  int nx = 0, ny = 0;
  std::vector<int> id;  // -1 outside
  std::vector<double> x, y, value;
};

inline CartesianSolution star_torsion_reference(const std::function<double(double)>& R, double h) {
  CartesianSolution out;
  out.h = h;
  double rmax = 0.0;
  for (int q = 0; q < 4096; ++q) rmax = std::max(rmax, R(2 * std::numbers::pi * q / 4096));
  const int half = static_cast<int>(std::ceil(rmax * 1.01 / h)) + 1;
  out.nx = out.ny = 2 * half + 1;
  auto inside = [&R](double x, double y) { return std::hypot(x, y) < R(std::atan2(y, x)); };
  // distance from (x, y) to the boundary along (dx, dy), known to lie in (0, h]
  auto crossing = [&](double x, double y, double dx, double dy) {
    double lo = 0.0, hi = h;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (inside(x + mid * dx, y + mid * dy) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto at = [&](int i, int j) { return out.id[static_cast<std::size_t>(j) * out.nx + i]; };
  out.id.assign(static_cast<std::size_t>(out.nx) * out.ny, -1);
  for (int j = 0; j < out.ny; ++j)
    for (int i = 0; i < out.nx; ++i) {
      const double x = (i - half) * h, y = (j - half) * h;
      if (inside(x, y)) {
        out.id[static_cast<std::size_t>(j) * out.nx + i] = static_cast<int>(out.x.size());
        out.x.push_back(x);
        out.y.push_back(y);
      }
    }
  const int n = static_cast<int>(out.x.size());
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(n);
  for (int j = 1; j + 1 < out.ny; ++j)
    for (int i = 1; i + 1 < out.nx; ++i) {
      const int k = at(i, j);
      if (k < 0) continue;
      const double x = out.x[k], y = out.y[k];
      const bool e = at(i + 1, j) >= 0, w = at(i - 1, j) >= 0, nn = at(i, j + 1) >= 0, s = at(i, j - 1) >= 0;
      const double dE = e ? h : crossing(x, y, 1, 0), dW = w ? h : crossing(x, y, -1, 0);
      const double dN = nn ? h : crossing(x, y, 0, 1), dS = s ? h : crossing(x, y, 0, -1);
      const double cx = 2.0 / (dE + dW), cy = 2.0 / (dN + dS);
      trip.emplace_back(k, k, cx * (1 / dE + 1 / dW) + cy * (1 / dN + 1 / dS));
      if (e) trip.emplace_back(k, at(i + 1, j), -cx / h);
      if (w) trip.emplace_back(k, at(i - 1, j), -cx / h);
      if (nn) trip.emplace_back(k, at(i, j + 1), -cy / h);
      if (s) trip.emplace_back(k, at(i, j - 1), -cy / h);
    }
  Eigen::SparseMatrix<double> M(n, n);
  M.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(M);
  const Eigen::VectorXd sol = lu.solve(rhs);
  out.value.assign(sol.data(), sol.data() + n);
  return out;
}

// Ellipse x^2 + y^2/a^2 < 1 in polar form.
inline CartesianSolution ellipse_torsion_reference(double a, double h) {
  return star_torsion_reference(
      [a](double t) { return 1.0 / std::sqrt(std::cos(t) * std::cos(t) + std::sin(t) * std::sin(t) / (a * a)); }, h);
}

// ---------------------------------------------------------------------------
// Area of the intersection of two discs with radii R1, R2 and center
// distance d.
inline double lens_area(double R1, double R2, double d) {
  if (d >= R1 + R2) return 0.0;
  if (d <= std::abs(R1 - R2)) return std::numbers::pi * std::min(R1, R2) * std::min(R1, R2);
  const double a1 = std::acos((d * d + R1 * R1 - R2 * R2) / (2 * d * R1));
  const double a2 = std::acos((d * d + R2 * R2 - R1 * R1) / (2 * d * R2));
  return R1 * R1 * (a1 - std::sin(2 * a1) / 2) + R2 * R2 * (a2 - std::sin(2 * a2) / 2);
}

}  // namespace oracle
