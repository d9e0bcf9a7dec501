#pragma once

/// \file
/// Second-order operators L[v] = -Tr(A D^2 v) + b . grad v with closed-form
/// coefficient maps, and the sampled symmetry/ellipticity validation.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "gnnlab/errors.hpp"
#include "gnnlab/grid.hpp"

namespace gnnlab {

struct OperatorSpec {
  std::function<Mat2(const Vec2&)> A;
  std::function<Vec2(const Vec2&)> b;
  /// Lambda >= 1 with xi^T A xi >= |xi|^2 / Lambda.
  double ellipticity = 1.0;
  std::string label = "custom";

  static OperatorSpec laplacian() {
    return {[](const Vec2&) -> Mat2 { return Mat2::Identity(); }, [](const Vec2&) -> Vec2 { return Vec2::Zero(); },
            1.0, "laplacian"};
  }
  static OperatorSpec constant(const Mat2& a, const Vec2& drift = Vec2::Zero(), double lambda = 1.0,
                               std::string label = "constant") {
    return {[a](const Vec2&) -> Mat2 { return a; }, [drift](const Vec2&) -> Vec2 { return drift; }, lambda,
            std::move(label)};
  }
};

struct EllipticitySample {
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  double max_eigenvalue = 0.0;
  double max_asymmetry = 0.0;
  /// Smallest Lambda >= 1 consistent with the sampled minimum eigenvalue.
  double lambda_estimate() const { return min_eigenvalue > 0 ? std::max(1.0, 1.0 / min_eigenvalue) : std::numeric_limits<double>::infinity(); }
};

inline EllipticitySample sample_ellipticity(const std::function<Mat2(const Vec2&)>& A, const DiskGrid& grid) {
  EllipticitySample out;
  grid.for_each_node([&](int i, int j, std::size_t) {
    const Mat2 a = A(grid.point(i, j));
    out.max_asymmetry = std::max(out.max_asymmetry, std::abs(a(0, 1) - a(1, 0)));
    const Mat2 sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Mat2> es(sym, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = std::min(out.min_eigenvalue, es.eigenvalues()(0));
    out.max_eigenvalue = std::max(out.max_eigenvalue, es.eigenvalues()(1));
  });
  return out;
}

/// Rejects operators whose sampled A(x) is not symmetric (1e-12) or whose
/// smallest eigenvalue falls below 1/Lambda - 1e-9.
inline void validate_operator(const OperatorSpec& op, const DiskGrid& grid) {
  if (!op.A || !op.b) throw ValidationError("operator: coefficient maps are not set");
  if (!(op.ellipticity >= 1.0)) throw ValidationError("operator: ellipticity constant must be >= 1");
  const EllipticitySample s = sample_ellipticity(op.A, grid);
  if (s.max_asymmetry > 1e-12)
    throw ValidationError("operator: A(x) is not symmetric (defect " + std::to_string(s.max_asymmetry) + ")");
  if (!(s.min_eigenvalue > 0.0) || s.min_eigenvalue < 1.0 / op.ellipticity - 1e-9)
    throw ValidationError("operator: not elliptic, sampled min eigenvalue " + std::to_string(s.min_eigenvalue) +
                          " with Lambda " + std::to_string(op.ellipticity));
}

}  // namespace gnnlab
