#pragma once

/// \file
/// Distance of a nodal field from radial symmetry and from radial monotonicity.

#include <algorithm>
#include <cmath>
#include <vector>

#include "gnnlab/fields.hpp"
#include "gnnlab/grid.hpp"

namespace gnnlab {

struct DirectionalValue {
  Vec2 e;
  double value = 0.0;
};

struct SymmetryReport {
  double asymmetry = 0.0;            ///< max of osc_profile
  double monotonicity_defect = 0.0;  ///< sup over interior nodes x != 0 of (d_r u)_+
  std::vector<DirectionalValue> directional;
  std::vector<double> osc_profile;   ///< osc of u over each ring, origin first
};

inline void to_json(json& j, const SymmetryReport& s) {
  json dirs = json::array();
  for (const auto& d : s.directional) dirs.push_back({{"e", {d.e.x(), d.e.y()}}, {"value", d.value}});
  j = {{"asymmetry", s.asymmetry},
       {"monotonicity_defect", s.monotonicity_defect},
       {"directional", dirs},
       {"osc_profile", s.osc_profile}};
}

/// Oscillation of the field over each ring of exact theta-nodes.
inline std::vector<double> ring_oscillation(const ScalarField& u) {
  const DiskGrid& g = u.grid();
  std::vector<double> out(g.n_r(), 0.0);
  for (int i = 1; i < g.n_r(); ++i) {
    const auto first = u.values().begin() + static_cast<std::ptrdiff_t>(g.index(i, 0));
    const auto [lo, hi] = std::minmax_element(first, first + g.n_theta());
    out[i] = *hi - *lo;
  }
  return out;
}

/// Discrete d_r u at ring i >= 1: second-order one-sided forward difference on
/// the first ring, centered elsewhere, second-order backward on the boundary.
inline double radial_derivative(const ScalarField& u, int i, int j) {
  const DiskGrid& g = u.grid();
  const double h = g.dr();
  if (i == 1 && g.n_r() >= 4) return (-3.0 * u.at(1, j) + 4.0 * u.at(2, j) - u.at(3, j)) / (2.0 * h);
  if (i == g.n_r() - 1) return (3.0 * u.at(i, j) - 4.0 * u.at(i - 1, j) + u.at(i - 2, j)) / (2.0 * h);
  return (u.at(i + 1, j) - u.at(i - 1, j)) / (2.0 * h);
}

/// sup over nodes with x.e > 0 of u(x) - u(x^(e)); signed.
inline double directional_asymmetry(const ScalarField& u, const Vec2& e) {
  if (std::abs(e.norm() - 1.0) > 1e-12) throw ValidationError("directional_asymmetry: e is not a unit vector");
  const DiskGrid& g = u.grid();
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < g.n_r(); ++i) {
    for (int j = 0; j < g.n_theta(); ++j) {
      const Vec2 x = g.point(i, j);
      if (!(x.dot(e) > 1e-14)) continue;
      best = std::max(best, u.at(i, j) - interpolate(u, reflect_direction(x, e)));
    }
  }
  return best;
}

/// Ring oscillation, monotonicity defect and, for each listed direction, the
/// directional asymmetry.
inline SymmetryReport asymmetry(const ScalarField& u, const std::vector<Vec2>& directions = {}) {
  const DiskGrid& g = u.grid();
  SymmetryReport rep;
  rep.osc_profile = ring_oscillation(u);
  rep.asymmetry = *std::max_element(rep.osc_profile.begin(), rep.osc_profile.end());
  for (int i = 1; i <= g.n_r() - 2; ++i)
    for (int j = 0; j < g.n_theta(); ++j)
      rep.monotonicity_defect = std::max(rep.monotonicity_defect, radial_derivative(u, i, j));
  for (const Vec2& e : directions) rep.directional.push_back({e, directional_asymmetry(u, e)});
  return rep;
}

/// The two coordinate directions e_1, e_n.
inline std::vector<Vec2> axis_directions() { return {Vec2(1.0, 0.0), Vec2(0.0, 1.0)}; }

}  // namespace gnnlab
