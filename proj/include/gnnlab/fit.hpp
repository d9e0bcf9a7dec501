#pragma once

/// \file
/// Power-law fit y = C x^alpha by least squares in log-log coordinates.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "gnnlab/errors.hpp"

namespace gnnlab {

struct PowerFit {
  double slope = 0.0;      ///< alpha
  double intercept = 0.0;  ///< log C
  double residual = 0.0;   ///< root-mean-square of the log-log residuals
  std::size_t points = 0;
};

inline PowerFit fit_alpha(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw ValidationError("fit_alpha: at least 3 points required, got " + std::to_string(points.size()));
  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
      throw ValidationError("fit_alpha: values must be positive and finite");
    sx += std::log(x);
    sy += std::log(y);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("fit_alpha: abscissae must not all coincide");
  PowerFit fit;
  fit.points = points.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (const auto& [x, y] : points) {
    const double e = std::log(y) - (fit.intercept + fit.slope * std::log(x));
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace gnnlab
