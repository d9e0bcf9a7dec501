#pragma once

/// \file
/// Damped Newton solver for -Lap u = kappa f(u) and L[u] = g(x, u) on the unit
/// disk with u = 0 on the boundary circle.
///
/// Discretization: second-order centered differences in (r, theta). Interior
/// rings use u_rr, u_r, u_tt, u_rt; the general operator is rewritten in polar
/// form through the chain rule. The origin row fits the quadratic Taylor model
/// to the first ring through its discrete Fourier modes 0, 1 and 2; for the
/// Laplacian this is the averaged-neighbour stencil 4 (mean(u_1) - u_0) / r_1^2.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gnnlab/errors.hpp"
#include "gnnlab/fields.hpp"
#include "gnnlab/grid.hpp"
#include "gnnlab/operator.hpp"

namespace gnnlab {

struct SolverParams {
  double newton_tol = 1e-10;     ///< target sup-norm of the discrete residual
  int max_newton_iters = 50;
  double min_damping = 1.0 / 64; ///< smallest step after halving on residual increase
  double linear_tol = 1e-12;    ///< relative residual accepted from the inner solve
  double positivity_floor = 0.0;

  void validate() const {
    if (!(newton_tol > 0) || !(linear_tol > 0)) throw ValidationError("solver: tolerances must be positive");
    if (max_newton_iters < 1) throw ValidationError("solver: max_newton_iters must be >= 1");
    if (!(min_damping > 0 && min_damping <= 1)) throw ValidationError("solver: min_damping must be in (0, 1]");
  }
};

enum class SolveStatus { converged, max_iterations, singular_jacobian };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max-iterations";
    default: return "singular-jacobian";
  }
}

struct SolveReport {
  ScalarField field;
  double residual_sup = 0.0;
  /// Rounding level of the residual evaluation at the final iterate. On fine
  /// polar grids the angular stencil near the origin amplifies the last bit of
  /// u beyond newton_tol; the solve then counts as converged at this floor.
  double residual_floor = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::max_iterations;
  bool positive_interior = false;
  double sup_norm = 0.0;
  double inf_ratio = 0.0;  ///< min over interior nodes of u(x) / (1 - |x|)
  std::string init_hash;

  bool converged() const { return status == SolveStatus::converged; }
};

struct SemilinearProblem {
  FieldSpec kappa;
  NonlinearitySpec f;
};
struct GeneralProblem {
  OperatorSpec op;
  RHSSpec g;
};
using Problem = std::variant<SemilinearProblem, GeneralProblem>;

/// Exact torsion function (1 - |x|^2)/4 scaled by `scale`.
inline ScalarField torsion_field(const DiskGrid& grid, double scale = 1.0) {
  return ScalarField::sample(grid, [scale](const Vec2& x) { return scale * 0.25 * (1.0 - x.squaredNorm()); });
}

/// FNV-1a over the raw bytes of the values, as 16 hex digits.
inline std::string field_hash(const ScalarField& f) {
  std::uint64_t h = 1469598103934665603ull;
  for (double v : f.values()) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using ColMatrix = Eigen::SparseMatrix<double>;

/// L u = -(rr u_rr + tt u_tt + rt u_rt) + pr u_r + pt u_t at a ring node.
struct PolarCoeffs {
  double rr, tt, rt, pr, pt;
};

inline PolarCoeffs polar_coeffs(const Mat2& a, const Vec2& b, double r, double c, double s) {
  const double a11 = a(0, 0), a12 = 0.5 * (a(0, 1) + a(1, 0)), a22 = a(1, 1);
  const double cc = c * c, ss = s * s, cs = c * s;
  const double tan_part = a11 * ss - 2.0 * a12 * cs + a22 * cc;
  const double mix = 2.0 * cs * (a22 - a11) + 2.0 * a12 * (cc - ss);
  PolarCoeffs out;
  out.rr = a11 * cc + 2.0 * a12 * cs + a22 * ss;
  out.tt = tan_part / (r * r);
  out.rt = mix / r;
  const double trace_r = tan_part / r;
  const double trace_t = -mix / (r * r);
  out.pr = -trace_r + (b.x() * c + b.y() * s);
  out.pt = -trace_t + (-b.x() * s + b.y() * c) / r;
  return out;
}

/// Rows: interior unknowns (origin, rings 1..n_r-2). Columns: every stored
/// node, so boundary data enters through the trailing n_theta columns.
struct DiscreteOperator {
  RowMatrix matrix;
  int unknowns = 0;
};

inline int unknown_count(const DiskGrid& g) { return 1 + (g.n_r() - 2) * g.n_theta(); }

template <class RingCoeffs, class OriginRow>
DiscreteOperator assemble(const DiskGrid& g, RingCoeffs&& ring_coeffs, OriginRow&& origin_row) {
  const int nt = g.n_theta();
  const int m = unknown_count(g);
  const double h = g.dr(), dt = g.dtheta();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m) * 9 + nt);
  origin_row(trip);
  for (int i = 1; i <= g.n_r() - 2; ++i) {
    for (int j = 0; j < nt; ++j) {
      const int row = static_cast<int>(g.index(i, j));
      const PolarCoeffs pc = ring_coeffs(i, j);
      auto add = [&](int ii, int jj, double v) {
        if (v != 0.0) trip.emplace_back(row, static_cast<int>(g.index(ii, jj)), v);
      };
      add(i, j, 2.0 * pc.rr / (h * h) + 2.0 * pc.tt / (dt * dt));
      add(i + 1, j, -pc.rr / (h * h) + pc.pr / (2.0 * h));
      add(i - 1, j, -pc.rr / (h * h) - pc.pr / (2.0 * h));
      add(i, j + 1, -pc.tt / (dt * dt) + pc.pt / (2.0 * dt));
      add(i, j - 1, -pc.tt / (dt * dt) - pc.pt / (2.0 * dt));
      if (pc.rt != 0.0) {
        const double q = pc.rt / (4.0 * h * dt);
        add(i + 1, j + 1, -q);
        add(i + 1, j - 1, q);
        add(i - 1, j + 1, q);
        add(i - 1, j - 1, -q);
      }
    }
  }
  DiscreteOperator out;
  out.unknowns = m;
  out.matrix.resize(m, static_cast<int>(g.node_count()));
  out.matrix.setFromTriplets(trip.begin(), trip.end());  // duplicates (origin column) are summed
  out.matrix.prune(0.0);
  return out;
}

inline DiscreteOperator assemble_laplacian(const DiskGrid& g) {
  const double r1 = g.r(1);
  const int nt = g.n_theta();
  return assemble(
      g,
      [&](int i, int) {
        const double r = g.r(i);
        return PolarCoeffs{1.0, 1.0 / (r * r), 0.0, -1.0 / r, 0.0};
      },
      [&](std::vector<Eigen::Triplet<double>>& trip) {
        trip.emplace_back(0, 0, 4.0 / (r1 * r1));
        for (int j = 0; j < nt; ++j) trip.emplace_back(0, static_cast<int>(g.index(1, j)), -4.0 / (nt * r1 * r1));
      });
}

inline DiscreteOperator assemble_general(const DiskGrid& g, const OperatorSpec& op) {
  const double r1 = g.r(1);
  const int nt = g.n_theta();
  return assemble(
      g,
      [&](int i, int j) {
        const Vec2 x = g.point(i, j);
        return polar_coeffs(op.A(x), op.b(x), g.r(i), g.cos_theta(j), g.sin_theta(j));
      },
      [&](std::vector<Eigen::Triplet<double>>& trip) {
        // Quadratic model u0 + g.x + x^T H x / 2 fitted on ring 1 via Fourier modes:
        // H11 + H22 = 4 (mean - u0)/r1^2, H11 - H22 = 4 a2/r1^2, H12 = 2 b2/r1^2,
        // grad = (a1, b1)/r1.
        const Mat2 a = op.A(Vec2::Zero());
        const Vec2 b = op.b(Vec2::Zero());
        const double a11 = a(0, 0), a12 = 0.5 * (a(0, 1) + a(1, 0)), a22 = a(1, 1);
        const double r2 = r1 * r1;
        trip.emplace_back(0, 0, 2.0 * (a11 + a22) / r2);
        for (int j = 0; j < nt; ++j) {
          const double c = g.cos_theta(j), s = g.sin_theta(j);
          const double c2 = c * c - s * s, s2 = 2.0 * c * s;
          const double w = 2.0 / nt;
          const double h11 = (2.0 / nt + 2.0 * w * c2) / r2;
          const double h22 = (2.0 / nt - 2.0 * w * c2) / r2;
          const double h12 = 2.0 * w * s2 / r2;
          const double v = -(a11 * h11 + 2.0 * a12 * h12 + a22 * h22) + (b.x() * w * c + b.y() * w * s) / r1;
          trip.emplace_back(0, static_cast<int>(g.index(1, j)), v);
        }
      });
}

/// g(x_k, s) evaluator at the interior unknowns.
class NodalRhs {
 public:
  NodalRhs(const DiskGrid& g, const RHSSpec& rhs) {
    const int m = unknown_count(g);
    for (const auto& t : rhs.terms()) {
      std::vector<double> w(m);
      for (int k = 0; k < m; ++k) w[k] = t.kappa.value(node_point(g, k));
      weights_.push_back(std::move(w));
      fs_.push_back(t.f);
    }
  }
  double value(int k, double s) const {
    double acc = 0.0;
    for (std::size_t t = 0; t < fs_.size(); ++t) acc += weights_[t][k] * fs_[t].value(s);
    return acc;
  }
  double ds(int k, double s) const {
    double acc = 0.0;
    for (std::size_t t = 0; t < fs_.size(); ++t) acc += weights_[t][k] * fs_[t].derivative(s);
    return acc;
  }
  static Vec2 node_point(const DiskGrid& g, int k) {
    if (k == 0) return Vec2::Zero();
    const int i = 1 + (k - 1) / g.n_theta();
    const int j = (k - 1) % g.n_theta();
    return g.point(i, j);
  }

 private:
  std::vector<std::vector<double>> weights_;
  std::vector<NonlinearitySpec> fs_;
};

struct ResidualEval {
  Eigen::VectorXd F;  ///< L u - g(x, u) on the unknown rows
  double sup = 0.0;
  double floor = 0.0;
};

inline ResidualEval evaluate_residual(const DiscreteOperator& L, const NodalRhs& rhs, const Eigen::VectorXd& u) {
  ResidualEval out;
  out.F = L.matrix * u;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int k = 0; k < L.unknowns; ++k) {
    const double gk = rhs.value(k, u[k]);
    out.F[k] -= gk;
    double mag = std::abs(gk);
    for (RowMatrix::InnerIterator it(L.matrix, k); it; ++it) mag += std::abs(it.value() * u[it.col()]);
    out.floor = std::max(out.floor, 8.0 * eps * mag);
    out.sup = std::max(out.sup, std::abs(out.F[k]));
  }
  return out;
}

inline SolveReport finalize(SolveReport rep, const DiskGrid& g, const SolverParams& params) {
  const auto& v = rep.field.values();
  rep.sup_norm = 0.0;
  for (double x : v) rep.sup_norm = std::max(rep.sup_norm, std::abs(x));
  rep.positive_interior = true;
  rep.inf_ratio = std::numeric_limits<double>::infinity();
  const int m = unknown_count(g);
  for (int k = 0; k < m; ++k) {
    const double r = k == 0 ? 0.0 : g.r(1 + (k - 1) / g.n_theta());
    rep.inf_ratio = std::min(rep.inf_ratio, v[k] / (1.0 - r));
    if (!(v[k] > params.positivity_floor)) rep.positive_interior = false;
  }
  return rep;
}

inline SolveReport newton(const DiskGrid& g, const DiscreteOperator& L, const NodalRhs& rhs,
                          const SolverParams& params, const ScalarField& init) {
  params.validate();
  if (!(init.grid() == g)) throw ValidationError("solver: initial field lives on a different grid");
  const int m = L.unknowns;
  const int n_all = static_cast<int>(g.node_count());

  SolveReport rep{init};
  rep.init_hash = field_hash(init);

  Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(init.values().data(), n_all);
  u.tail(n_all - m).setZero();

  const ColMatrix L_int = L.matrix.leftCols(m);
  Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(L_int);

  ResidualEval cur = evaluate_residual(L, rhs, u);
  rep.status = SolveStatus::max_iterations;
  for (int it = 0;; ++it) {
    if (cur.sup <= std::max(params.newton_tol, cur.floor)) {
      rep.status = SolveStatus::converged;
      break;
    }
    if (it >= params.max_newton_iters) break;

    ColMatrix J = L_int;
    for (int k = 0; k < m; ++k) J.coeffRef(k, k) -= rhs.ds(k, u[k]);
    lu.factorize(J);
    if (lu.info() != Eigen::Success) {
      rep.status = SolveStatus::singular_jacobian;
      break;
    }
    Eigen::VectorXd delta = lu.solve(-cur.F);
    if (lu.info() != Eigen::Success || !delta.allFinite()) {
      rep.status = SolveStatus::singular_jacobian;
      break;
    }
    // One step of iterative refinement when the direct solve is loose.
    Eigen::VectorXd lin_res = J * delta + cur.F;
    if (lin_res.lpNorm<Eigen::Infinity>() > params.linear_tol * cur.F.lpNorm<Eigen::Infinity>())
      delta -= lu.solve(lin_res);

    double step = 1.0;
    Eigen::VectorXd trial = u;
    ResidualEval next;
    for (;;) {
      trial.head(m) = u.head(m) + step * delta;
      next = evaluate_residual(L, rhs, trial);
      if (next.sup < cur.sup || step <= params.min_damping) break;
      step *= 0.5;
    }
    u = trial;
    cur = std::move(next);
    rep.iterations = it + 1;
  }

  rep.field = ScalarField(g, std::vector<double>(u.data(), u.data() + n_all));
  rep.residual_sup = cur.sup;
  rep.residual_floor = cur.floor;
  return finalize(std::move(rep), g, params);
}

inline ScalarField default_init(const DiskGrid& g, const RHSSpec& rhs) {
  double scale = std::abs(rhs.value(Vec2::Zero(), 0.0));
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
  return torsion_field(g, scale);
}

}  // namespace detail

/// Solves -Lap u = kappa(x) f(u) with u = 0 on the boundary circle.
inline SolveReport solve_semilinear(const FieldSpec& kappa, const NonlinearitySpec& f, const DiskGrid& grid,
                                    const SolverParams& params = {},
                                    const std::optional<ScalarField>& init = std::nullopt) {
  const RHSSpec rhs = RHSSpec::product(kappa, f);
  const auto L = detail::assemble_laplacian(grid);
  const detail::NodalRhs nodal(grid, rhs);
  return detail::newton(grid, L, nodal, params, init ? *init : detail::default_init(grid, rhs));
}

/// Solves L[u] = g(x, u) with u = 0 on the boundary circle.
inline SolveReport solve_general(const OperatorSpec& op, const RHSSpec& g, const DiskGrid& grid,
                                 const SolverParams& params = {},
                                 const std::optional<ScalarField>& init = std::nullopt) {
  validate_operator(op, grid);
  const auto L = detail::assemble_general(grid, op);
  const detail::NodalRhs nodal(grid, g);
  return detail::newton(grid, L, nodal, params, init ? *init : detail::default_init(grid, g));
}

/// Sup-norm over interior nodes of the discrete residual; boundary values are
/// taken from the field as given.
inline double residual(const ScalarField& field, const Problem& problem) {
  const DiskGrid& g = field.grid();
  Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(field.values().data(), field.values().size());
  return std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SemilinearProblem>) {
          return detail::evaluate_residual(detail::assemble_laplacian(g), detail::NodalRhs(g, RHSSpec::product(p.kappa, p.f)), u).sup;
        } else {
          return detail::evaluate_residual(detail::assemble_general(g, p.op), detail::NodalRhs(g, p.g), u).sup;
        }
      },
      problem);
}

/// Same grid check as the solver uses, for callers that hold a field and a
/// grid separately.
inline double residual(const ScalarField& field, const DiskGrid& grid, const Problem& problem) {
  if (!(field.grid() == grid)) throw ValidationError("residual: field and problem grids differ");
  return residual(field, problem);
}

}  // namespace gnnlab
