#pragma once

/// \file
/// Deficit functionals measuring how far the data of the problem are from
/// being radial and radially non-increasing.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gnnlab/fields.hpp"
#include "gnnlab/grid.hpp"
#include "gnnlab/operator.hpp"

namespace gnnlab {

/// Polar sampling density for suprema over the disk.
struct Resolution {
  int n_r = 512;
  int n_theta = 1024;
  DiskGrid grid() const { return DiskGrid(n_r, n_theta); }
};

enum class DeficitMethod { automatic, sampled };

struct DeficitReport {
  double angular_term = 0.0;  ///< sup |grad^T kappa|
  double radial_term = 0.0;   ///< sup (d_r kappa)_+
  double total = 0.0;
  std::string method = "analytic";
};

inline void to_json(json& j, const DeficitReport& d) {
  j = {{"angular", d.angular_term}, {"radial", d.radial_term}, {"total", d.total}, {"method", d.method}};
}

namespace detail {

// Closed-form suprema for the families where they are elementary.
inline std::optional<DeficitReport> analytic_deficit(const FieldSpec& spec) {
  using namespace family;
  DeficitReport rep;
  if (std::holds_alternative<Constant>(spec.family())) {
    return rep;
  }
  if (const auto* a = std::get_if<AxialLinear>(&spec.family())) {
    rep.angular_term = std::abs(a->eps);
    rep.radial_term = std::abs(a->eps);
  } else if (const auto* h = std::get_if<AngularHarmonic>(&spec.family())) {
    if (h->eps == 0.0 || (h->k == 0 && h->m == 0.0)) return rep;
    if (h->m < 1.0) return std::nullopt;
    rep.angular_term = std::abs(h->eps) * h->k;
    // cos(k(theta - phase)) reaches +-1 when k >= 1, its sign when k = 0.
    rep.radial_term = h->k == 0 ? std::max(0.0, h->eps) * h->m : std::abs(h->eps) * h->m;
  } else {
    return std::nullopt;
  }
  rep.total = rep.angular_term + rep.radial_term;
  return rep;
}

}  // namespace detail

/// def(kappa) = sup |grad^T kappa| + sup (d_r kappa)_+ over the unit disk.
inline DeficitReport deficit_kappa(const FieldSpec& spec, const Resolution& res = {},
                                   DeficitMethod method = DeficitMethod::automatic) {
  if (method == DeficitMethod::automatic)
    if (auto rep = detail::analytic_deficit(spec)) return *rep;
  const DiskGrid g = res.grid();
  DeficitReport rep;
  rep.method = "sampled";
  for (int i = 1; i < g.n_r(); ++i) {
    for (int j = 0; j < g.n_theta(); ++j) {
      const Vec2 x = g.point(i, j);
      rep.angular_term = std::max(rep.angular_term, spec.angular_gradient_norm(x));
      rep.radial_term = std::max(rep.radial_term, spec.radial_derivative(x));
    }
  }
  rep.total = rep.angular_term + rep.radial_term;
  return rep;
}

/// sup_r osc_{|x| = r} kappa + sup_e sup_{rho < r} (kappa(r e) - kappa(rho e))_+,
/// both by sampling.
inline double deficit_zeroth(const FieldSpec& spec, const Resolution& res = {}) {
  const DiskGrid g = res.grid();
  const int nr = g.n_r(), nt = g.n_theta();
  std::vector<double> vals(static_cast<std::size_t>(nr) * nt);
  const double v0 = spec.value(Vec2::Zero());
  for (int i = 1; i < nr; ++i)
    for (int j = 0; j < nt; ++j) vals[static_cast<std::size_t>(i) * nt + j] = spec.value(g.point(i, j));
  for (int j = 0; j < nt; ++j) vals[j] = v0;

  double osc = 0.0;
  for (int i = 1; i < nr; ++i) {
    const auto first = vals.begin() + static_cast<std::ptrdiff_t>(i) * nt;
    const auto [lo, hi] = std::minmax_element(first, first + nt);
    osc = std::max(osc, *hi - *lo);
  }
  double ray = 0.0;
  for (int j = 0; j < nt; ++j) {
    double running_min = vals[j];
    for (int i = 1; i < nr; ++i) {
      const double v = vals[static_cast<std::size_t>(i) * nt + j];
      ray = std::max(ray, v - running_min);
      running_min = std::min(running_min, v);
    }
  }
  return osc + ray;
}

struct GeneralDeficitReport {
  double A_term = 0.0;  ///< ||A - I||_{C^{0,1}}: sup of entries plus sampled Lipschitz seminorm
  double b_term = 0.0;  ///< ||b||_{C^{0,1}}
  double G_term = 0.0;  ///< G(g, U)
  double total = 0.0;
  double A_sup = 0.0, A_lip = 0.0, b_sup = 0.0, b_lip = 0.0;
  double G_angular = 0.0, G_radial = 0.0;
};

inline void to_json(json& j, const GeneralDeficitReport& d) {
  j = {{"A_term", d.A_term}, {"b_term", d.b_term},   {"G_term", d.G_term},   {"total", d.total},
       {"A_sup", d.A_sup},   {"A_lip", d.A_lip},     {"b_sup", d.b_sup},     {"b_lip", d.b_lip},
       {"G_angular", d.G_angular}, {"G_radial", d.G_radial}};
}

namespace detail {
inline double max_entry(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

/// Visits node pairs (p, q) that are grid neighbours (radial, angular,
/// diagonal) and lie within max_dist of each other.
template <class F>
void for_each_near_pair(const DiskGrid& g, double max_dist, F&& fn) {
  const int nr = g.n_r(), nt = g.n_theta();
  for (int j = 0; j < nt; ++j) fn(g.index(0, 0), g.index(1, j), g.r(1));
  for (int i = 1; i < nr; ++i) {
    for (int j = 0; j < nt; ++j) {
      const Vec2 p = g.point(i, j);
      auto try_pair = [&](int ii, int jj) {
        const double d = (g.point(ii, jj) - p).norm();
        if (d > 0.0 && d <= max_dist) fn(g.index(i, j), g.index(ii, jj), d);
      };
      try_pair(i, g.wrap(j + 1));
      if (i + 1 < nr) {
        try_pair(i + 1, j);
        try_pair(i + 1, g.wrap(j + 1));
        try_pair(i + 1, g.wrap(j - 1));
      }
    }
  }
}
}  // namespace detail

/// def(L, g, U) = ||A - I||_{C^{0,1}} + ||b||_{C^{0,1}} + G(g, U). Seminorms use
/// neighbour pairs at distance <= 2h; the s-supremum uses 64 uniform values.
inline GeneralDeficitReport deficit_general(const OperatorSpec& op, const RHSSpec& g, double U,
                                            const Resolution& res = {}) {
  if (!(U > 0)) throw ValidationError("deficit_general: U must be positive");
  const DiskGrid grid = res.grid();
  const std::size_t n = grid.node_count();
  std::vector<Mat2> A(n);
  std::vector<Vec2> b(n);
  std::vector<Vec2> pts(n);
  grid.for_each_node([&](int i, int j, std::size_t k) {
    pts[k] = grid.point(i, j);
    A[k] = op.A(pts[k]) - Mat2::Identity();
    b[k] = op.b(pts[k]);
  });

  GeneralDeficitReport rep;
  for (std::size_t k = 0; k < n; ++k) {
    rep.A_sup = std::max(rep.A_sup, detail::max_entry(A[k]));
    rep.b_sup = std::max(rep.b_sup, b[k].norm());
  }
  detail::for_each_near_pair(grid, 2.0 * grid.dr(), [&](std::size_t p, std::size_t q, double d) {
    rep.A_lip = std::max(rep.A_lip, detail::max_entry(A[p] - A[q]) / d);
    rep.b_lip = std::max(rep.b_lip, (b[p] - b[q]).norm() / d);
  });

  // grad_x g(x, s) = sum_i grad kappa_i(x) f_i(s): gradients are cached per node.
  const auto& terms = g.terms();
  std::vector<std::vector<Vec2>> grads(terms.size(), std::vector<Vec2>(n));
  for (std::size_t t = 0; t < terms.size(); ++t)
    for (std::size_t k = 1; k < n; ++k) grads[t][k] = terms[t].kappa.gradient(pts[k]);
  constexpr int kSGrid = 64;
  std::vector<double> fvals(terms.size());
  for (int q = 0; q < kSGrid; ++q) {
    const double s = U * q / (kSGrid - 1);
    for (std::size_t t = 0; t < terms.size(); ++t) fvals[t] = terms[t].f.value(s);
    for (std::size_t k = 1; k < n; ++k) {
      Vec2 grad = Vec2::Zero();
      for (std::size_t t = 0; t < terms.size(); ++t) grad += grads[t][k] * fvals[t];
      const double r = pts[k].norm();
      const Vec2 er = pts[k] / r;
      rep.G_radial = std::max(rep.G_radial, grad.dot(er));
      rep.G_angular = std::max(rep.G_angular, std::abs(grad.dot(Vec2(-er.y(), er.x()))));
    }
  }
  rep.A_term = rep.A_sup + rep.A_lip;
  rep.b_term = rep.b_sup + rep.b_lip;
  rep.G_term = rep.G_angular + rep.G_radial;
  rep.total = rep.A_term + rep.b_term + rep.G_term;
  return rep;
}

}  // namespace gnnlab
