#pragma once

/// \file
/// Perturbation sweeps: one solve plus deficit, symmetry and plane scan per
/// ladder value, run in a small thread pool, then a power-law fit of
/// asymmetry against deficit.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "gnnlab/config.hpp"
#include "gnnlab/deficits.hpp"
#include "gnnlab/domains.hpp"
#include "gnnlab/fit.hpp"
#include "gnnlab/movingplanes.hpp"
#include "gnnlab/solver.hpp"
#include "gnnlab/symmetry.hpp"

namespace gnnlab {

inline constexpr const char* kSweepSchema = "gnnlab.sweep/1";
inline constexpr const char* kVersion = "0.1.0";

struct SweepRecord {
  double eps = 0.0;
  bool ok = false;
  std::string status;     ///< solver status, or the error message
  int iterations = 0;
  double residual = 0.0;
  double deficit_total = std::numeric_limits<double>::quiet_NaN();
  double deficit_zeroth = std::numeric_limits<double>::quiet_NaN();
  double asymmetry = std::numeric_limits<double>::quiet_NaN();
  double monotonicity_defect = std::numeric_limits<double>::quiet_NaN();
  double lambda_star = std::numeric_limits<double>::quiet_NaN();
  bool planes_tail_ok = false;  ///< admissible set of the scan is an upper tail
  bool planes_flag = false;
  double sup_norm = std::numeric_limits<double>::quiet_NaN();
  double inf_ratio = std::numeric_limits<double>::quiet_NaN();
  bool in_fit = false;
};

struct FitOutcome {
  bool ok = false;
  std::string error;
  PowerFit fit;
  std::vector<std::size_t> window;  ///< record indices used
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<SweepRecord> records;  ///< sorted by eps
  SweepRecord baseline;              ///< eps = 0 solve behind the noise floor
  double noise_floor = 0.0;
  FitOutcome fit;
};

/// A solved ladder point with the field kept, for single-point commands.
struct PointSolve {
  SweepRecord record;
  std::optional<SolveReport> solve;
  std::optional<PlaneScan> planes;
  std::optional<SymmetryReport> symmetry;
};

namespace detail {

inline bool admissible_is_tail(const PlaneScan& s) {
  bool seen = false;
  for (bool a : s.admissible) {
    if (seen && !a) return false;
    seen = seen || a;
  }
  return true;
}

inline int pool_width(int requested, std::size_t jobs) {
  unsigned w = requested > 0 ? static_cast<unsigned>(requested) : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GNNLAB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) w = std::min<unsigned>(w, static_cast<unsigned>(cap));
  }
  return static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(w, jobs)));
}

}  // namespace detail

/// Solves the configured problem at one eps and measures everything. Without
/// eps the kappa spec is used as written (mapped problems then use eps = 0).
inline PointSolve solve_point(const ExperimentConfig& cfg, std::optional<double> eps_override, bool keep = false) {
  PointSolve out;
  SweepRecord& rec = out.record;
  if (cfg.problem == ProblemKind::mapped && !eps_override) eps_override = 0.0;
  const double eps = eps_override.value_or(std::numeric_limits<double>::quiet_NaN());
  rec.eps = eps;
  const DiskGrid grid = cfg.grid();
  std::optional<ScalarField> init;
  if (cfg.init_scale > 0.0) init = torsion_field(grid, cfg.init_scale);
  try {
    double deficit = 0.0, zeroth = std::numeric_limits<double>::quiet_NaN();
    std::optional<DomainMap> map;
    SolveReport rep = [&] {
      if (cfg.problem == ProblemKind::semilinear) {
        const FieldSpec kappa = eps_override ? with_eps(cfg.kappa, eps) : cfg.kappa;
        SolveReport r = solve_semilinear(kappa, cfg.f, grid, cfg.solver, init);
        deficit = deficit_kappa(kappa, cfg.resolution).total;
        zeroth = deficit_zeroth(kappa, cfg.resolution);
        return r;
      }
      map = make_map(cfg.map_kind, eps, cfg.profile);
      const PullbackProblem pb = pullback(*map, cfg.f);
      SolveReport r = solve_general(pb.op, pb.rhs, grid, cfg.solver, init);
      const double U = cfg.U ? *cfg.U : std::max(r.sup_norm, 1e-300);
      deficit = deficit_general(pb.op, pb.rhs, U, cfg.resolution).total;
      return r;
    }();
    rec.status = to_string(rep.status);
    rec.iterations = rep.iterations;
    rec.residual = rep.residual_sup;
    rec.deficit_total = deficit;
    rec.deficit_zeroth = zeroth;
    rec.sup_norm = rep.sup_norm;
    rec.inf_ratio = rep.inf_ratio;
    if (rep.converged()) {
      SymmetryReport sym = asymmetry(rep.field);
      rec.asymmetry = map ? mapped_asymmetry(rep.field, *map).sup : sym.asymmetry;
      rec.monotonicity_defect = sym.monotonicity_defect;
      const double step = cfg.scan_step > 0.0 ? cfg.scan_step : grid.dr();
      PlaneScan scan = lambda_star(rep.field, cfg.slack_from_deficit ? deficit : cfg.slack, step);
      rec.lambda_star = scan.lambda_star;
      rec.planes_flag = scan.flag;
      rec.planes_tail_ok = detail::admissible_is_tail(scan);
      rec.ok = true;
      if (keep) {
        out.planes = std::move(scan);
        out.symmetry = std::move(sym);
      }
    }
    if (keep) out.solve = std::move(rep);
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.status = std::string("error: ") + e.what();
  }
  return out;
}

/// Records are sorted by eps; fitting uses records with deficit > 0 and
/// asymmetry > 10 x noise floor, where the floor is the asymmetry at eps = 0
/// plus 10 x newton_tol.
inline SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  SweepResult res;
  res.config = cfg;
  std::vector<double> jobs = cfg.ladder;
  const bool has_zero = cfg.ladder.front() == 0.0;
  if (!has_zero) jobs.insert(jobs.begin(), 0.0);  // baseline for the noise floor
  std::vector<SweepRecord> out(jobs.size());

  const int width = detail::pool_width(cfg.threads, jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) {
      try {
        out[k] = solve_point(cfg, jobs[k]).record;
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (width == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < width; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  res.baseline = out.front();
  const SweepRecord& base = res.baseline;
  res.noise_floor = (base.ok ? base.asymmetry : 0.0) + 10.0 * cfg.solver.newton_tol;
  res.records.assign(out.begin() + (has_zero ? 0 : 1), out.end());

  const auto successes = std::count_if(res.records.begin(), res.records.end(), [](const auto& r) { return r.ok; });
  if (successes < 3)
    throw SolverFailure("sweep: only " + std::to_string(successes) + " ladder points solved; at least 3 required");

  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < res.records.size(); ++k) {
    const auto& r = res.records[k];
    if (r.ok && r.deficit_total > 0.0 && r.asymmetry > 10.0 * res.noise_floor) {
      pts.emplace_back(r.deficit_total, r.asymmetry);
      res.fit.window.push_back(k);
    }
  }
  try {
    res.fit.fit = fit_alpha(pts);
    res.fit.ok = true;
    for (std::size_t k : res.fit.window) res.records[k].in_fit = true;
  } catch (const ValidationError& e) {
    res.fit.ok = false;
    res.fit.error = std::string("fit rejected: ") + e.what();
    res.fit.window.clear();
  }
  return res;
}

}  // namespace gnnlab
