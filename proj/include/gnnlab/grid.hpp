#pragma once

/// \file
/// Polar grid on the closed unit disk, nodal scalar fields, bilinear (r, theta)
/// interpolation and the reflections used by the moving-planes diagnostics.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "gnnlab/errors.hpp"

namespace gnnlab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// Radius slack for queries on the boundary circle.
inline constexpr double kBoundaryClamp = 1e-12;

/// Nodes r_i = i/(n_r-1), theta_j = 2 pi j / n_theta. The origin is a single
/// node; the outer ring i = n_r-1 is the boundary circle.
class DiskGrid {
 public:
  DiskGrid(int n_r, int n_theta) : n_r_(n_r), n_theta_(n_theta) {
    if (n_r < 3) throw ValidationError("DiskGrid: n_r must be >= 3, got " + std::to_string(n_r));
    if (n_theta < 8) throw ValidationError("DiskGrid: n_theta must be >= 8, got " + std::to_string(n_theta));
    if (n_theta % 2 != 0) throw ValidationError("DiskGrid: n_theta must be even, got " + std::to_string(n_theta));
    cos_.resize(n_theta);
    sin_.resize(n_theta);
    for (int j = 0; j < n_theta; ++j) {
      // Quarter-turn nodes get exact trig values so that axis points are exact.
      if ((4 * j) % n_theta == 0) {
        const int q = 4 * j / n_theta;
        static constexpr double c[4] = {1.0, 0.0, -1.0, 0.0};
        static constexpr double s[4] = {0.0, 1.0, 0.0, -1.0};
        cos_[j] = c[q];
        sin_[j] = s[q];
      } else {
        cos_[j] = std::cos(theta(j));
        sin_[j] = std::sin(theta(j));
      }
    }
  }

  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  double dr() const { return 1.0 / (n_r_ - 1); }
  double dtheta() const { return kTwoPi / n_theta_; }
  double r(int i) const { return static_cast<double>(i) / (n_r_ - 1); }
  double theta(int j) const { return kTwoPi * j / n_theta_; }
  double cos_theta(int j) const { return cos_[j]; }
  double sin_theta(int j) const { return sin_[j]; }

  Vec2 point(int i, int j) const {
    const double rad = r(i);
    return {rad * cos_[j], rad * sin_[j]};
  }

  /// Storage size: one origin value plus n_theta values per ring i >= 1.
  std::size_t node_count() const { return 1 + static_cast<std::size_t>(n_r_ - 1) * n_theta_; }
  std::size_t index(int i, int j) const {
    return i == 0 ? 0 : 1 + static_cast<std::size_t>(i - 1) * n_theta_ + static_cast<std::size_t>(wrap(j));
  }
  int wrap(int j) const { return ((j % n_theta_) + n_theta_) % n_theta_; }

  /// Visit every stored node once: (i, j, storage index). The origin is
  /// visited as (0, 0).
  template <class F>
  void for_each_node(F&& fn) const {
    fn(0, 0, std::size_t{0});
    for (int i = 1; i < n_r_; ++i)
      for (int j = 0; j < n_theta_; ++j) fn(i, j, index(i, j));
  }

  friend bool operator==(const DiskGrid& a, const DiskGrid& b) {
    return a.n_r_ == b.n_r_ && a.n_theta_ == b.n_theta_;
  }

 private:
  int n_r_;
  int n_theta_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

inline DiskGrid build_grid(int n_r, int n_theta) { return DiskGrid(n_r, n_theta); }

/// Grid-sampled function. The origin value is stored once and shared by all
/// angular indices.
class ScalarField {
 public:
  explicit ScalarField(DiskGrid grid, double fill = 0.0)
      : grid_(std::move(grid)), values_(grid_.node_count(), fill) {}
  ScalarField(DiskGrid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.node_count()) throw ValidationError("ScalarField: value count does not match grid");
  }

  static ScalarField sample(const DiskGrid& grid, const std::function<double(const Vec2&)>& fn) {
    ScalarField out(grid);
    grid.for_each_node([&](int i, int j, std::size_t k) { out.values_[k] = fn(grid.point(i, j)); });
    return out;
  }

  const DiskGrid& grid() const { return grid_; }
  double at(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& at(int i, int j) { return values_[grid_.index(i, j)]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Values rotated by k angular steps: out(i, j + k) = this(i, j).
  ScalarField shifted(int k) const {
    ScalarField out(grid_);
    out.values_[0] = values_[0];
    for (int i = 1; i < grid_.n_r(); ++i)
      for (int j = 0; j < grid_.n_theta(); ++j) out.at(i, j + k) = at(i, j);
    return out;
  }

 private:
  DiskGrid grid_;
  std::vector<double> values_;
};

namespace detail {
// Snap a fractional cell coordinate onto a node when it is within rounding.
inline std::pair<int, double> split_coordinate(double q) {
  const double nearest = std::round(q);
  if (std::abs(q - nearest) < 1e-9) return {static_cast<int>(nearest), 0.0};
  const double base = std::floor(q);
  return {static_cast<int>(base), q - base};
}
}  // namespace detail

/// Bilinear interpolation in (r, theta), periodic in theta.
inline double interpolate(const ScalarField& field, const Vec2& x) {
  const DiskGrid& g = field.grid();
  double rad = x.norm();
  if (!(rad <= 1.0 + kBoundaryClamp))
    throw OutOfDomain("interpolate: |x| = " + std::to_string(rad) + " is outside the unit disk");
  rad = std::min(rad, 1.0);

  auto [i0, t] = detail::split_coordinate(rad * (g.n_r() - 1));
  if (i0 >= g.n_r() - 1) {
    i0 = g.n_r() - 1;
    t = 0.0;
  }
  if (i0 == 0 && t == 0.0) return field.at(0, 0);

  double th = std::atan2(x.y(), x.x());
  if (th < 0) th += kTwoPi;
  auto [j0, w] = detail::split_coordinate(th / g.dtheta());
  j0 = g.wrap(j0);
  const int j1 = g.wrap(j0 + 1);

  auto ring = [&](int i) {
    if (w == 0.0) return field.at(i, j0);
    return (1.0 - w) * field.at(i, j0) + w * field.at(i, j1);
  };
  if (t == 0.0) return ring(i0);
  return (1.0 - t) * ring(i0) + t * ring(i0 + 1);
}

/// Reflection across the plane {x_n = lambda}.
inline Vec2 reflect_plane(const Vec2& x, double lambda) { return {x.x(), 2.0 * lambda - x.y()}; }

/// Reflection across the hyperplane through the origin orthogonal to e.
inline Vec2 reflect_direction(const Vec2& x, const Vec2& e) {
  if (std::abs(e.norm() - 1.0) > 1e-12) throw ValidationError("reflect_direction: direction is not a unit vector");
  return x - 2.0 * x.dot(e) * e;
}

/// The cap Sigma_lambda = B_1 ∩ {x_n > lambda}, optionally shrunk to the
/// points at distance > delta from its boundary.
struct Dome {
  double lambda = 0.0;
  double delta = 0.0;

  /// Distance from an interior point to the boundary of the cap. The cap is
  /// convex, so this is the smaller of the two constraint distances.
  double boundary_distance(const Vec2& x) const { return std::min(1.0 - x.norm(), x.y() - lambda); }

  bool contains(const Vec2& x) const {
    if (!(x.norm() < 1.0 && x.y() > lambda)) return false;
    return delta <= 0.0 || boundary_distance(x) > delta;
  }
};

}  // namespace gnnlab
