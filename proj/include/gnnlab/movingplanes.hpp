#pragma once

/// \file
/// Moving-planes diagnostics: w_lambda(x) = u(x^lambda) - u(x) on the cap
/// Sigma_lambda, the deficit-relaxed comparison and the critical position
/// lambda_star = inf of the admissible upper tail.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gnnlab/fields.hpp"
#include "gnnlab/grid.hpp"

namespace gnnlab {

/// Strict margin for Sigma_lambda membership (x_n > lambda + margin).
inline constexpr double kPlaneMargin = 1e-14;
/// Rounding allowance in min w >= -(slack + kComparisonFloor).
inline constexpr double kComparisonFloor = 1e-12;

/// w_lambda on the nodes of Sigma_lambda; other nodes carry NaN.
struct WLambda {
  ScalarField values;
  double lambda = 0.0;
  double min = std::numeric_limits<double>::infinity();
  std::size_t inside = 0;  ///< number of nodes in Sigma_lambda
  bool empty() const { return inside == 0; }
};

inline WLambda w_lambda(const ScalarField& u, double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw ValidationError("w_lambda: lambda must lie in [0, 1)");
  const DiskGrid& g = u.grid();
  WLambda out{ScalarField(g, std::numeric_limits<double>::quiet_NaN()), lambda};
  for (int i = 1; i <= g.n_r() - 2; ++i) {
    for (int j = 0; j < g.n_theta(); ++j) {
      const Vec2 x = g.point(i, j);
      if (!(x.y() > lambda + kPlaneMargin)) continue;
      const double w = interpolate(u, reflect_plane(x, lambda)) - u.at(i, j);
      out.values.at(i, j) = w;
      out.min = std::min(out.min, w);
      ++out.inside;
    }
  }
  return out;
}

namespace detail {
// min of w_lambda and the node count of Sigma_lambda, without storing the field.
inline std::pair<double, std::size_t> w_lambda_min(const ScalarField& u, double lambda) {
  const DiskGrid& g = u.grid();
  double best = std::numeric_limits<double>::infinity();
  std::size_t inside = 0;
  const int first_ring = std::max(1, static_cast<int>(std::floor(lambda * (g.n_r() - 1))));
  for (int i = first_ring; i <= g.n_r() - 2; ++i) {
    for (int j = 0; j < g.n_theta(); ++j) {
      const Vec2 x = g.point(i, j);
      if (!(x.y() > lambda + kPlaneMargin)) continue;
      best = std::min(best, interpolate(u, reflect_plane(x, lambda)) - u.at(i, j));
      ++inside;
    }
  }
  return {best, inside};
}
}  // namespace detail

struct PlaneScan {
  std::vector<double> lambdas;
  std::vector<double> min_w;        ///< min of w_lambda over the nodes of Sigma_lambda
  std::vector<bool> admissible;     ///< whole upper tail satisfies min_w >= -slack
  double lambda_star = 0.0;
  double slack = 0.0;
  bool flag = false;                ///< no admissible tail among nonempty caps
};

inline void to_json(json& j, const PlaneScan& p) {
  json mins = json::array();
  for (double m : p.min_w) mins.push_back(std::isfinite(m) ? json(m) : json(nullptr));
  j = {{"lambdas", p.lambdas}, {"min_w", mins}, {"lambda_star", p.lambda_star}, {"slack", p.slack}, {"flag", p.flag}};
}

/// Scans lambda over {0, step, 2 step, ...} and returns the smallest ladder
/// value whose whole upper tail passes min_w >= -slack. Ladder values with an
/// empty cap are dropped from the scan.
inline PlaneScan lambda_star(const ScalarField& u, double slack, double scan_step) {
  if (!(slack >= 0.0)) throw ValidationError("lambda_star: slack must be nonnegative");
  const DiskGrid& g = u.grid();
  if (!(scan_step > 0.0) || scan_step > g.dr() * (1.0 + 1e-12))
    throw ValidationError("lambda_star: scan_step must be in (0, radial spacing]");

  PlaneScan scan;
  scan.slack = slack;
  for (int k = 0;; ++k) {
    const double lambda = k * scan_step;
    if (lambda >= 1.0) break;
    const auto [min_w, inside] = detail::w_lambda_min(u, lambda);
    if (inside == 0) break;
    scan.lambdas.push_back(lambda);
    scan.min_w.push_back(min_w);
  }
  const std::size_t n = scan.lambdas.size();
  scan.admissible.assign(n, false);
  bool tail_ok = true;
  for (std::size_t k = n; k-- > 0;) {
    tail_ok = tail_ok && scan.min_w[k] >= -(slack + kComparisonFloor);
    scan.admissible[k] = tail_ok;
  }
  const auto first = std::find(scan.admissible.begin(), scan.admissible.end(), true);
  if (first == scan.admissible.end()) {
    scan.flag = true;
    scan.lambda_star = n ? scan.lambdas.back() : 0.0;
  } else {
    scan.lambda_star = scan.lambdas[static_cast<std::size_t>(first - scan.admissible.begin())];
  }
  return scan;
}

}  // namespace gnnlab
