#pragma once

/// \file
/// Experiment configuration: problem family, perturbation ladder, grid and
/// solver settings. All fields have JSON round-trips; the echo written into
/// results.json is to_json of the parsed config.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gnnlab/deficits.hpp"
#include "gnnlab/domains.hpp"
#include "gnnlab/errors.hpp"
#include "gnnlab/fields.hpp"
#include "gnnlab/solver.hpp"

namespace gnnlab {

enum class ProblemKind { semilinear, mapped };

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::semilinear;
  FieldSpec kappa;  ///< its eps parameter is replaced by each ladder value
  NonlinearitySpec f;
  MapKind map_kind = MapKind::ellipsoid;
  BoundaryProfile profile;
  /// Single-point eps: top-level "eps", else map.eps. Unset means the kappa
  /// spec is used as written.
  std::optional<double> eps;
  std::vector<double> ladder;
  int n_r = 129;
  int n_theta = 256;
  SolverParams solver;
  std::uint64_t seed = 0;
  int threads = 0;          ///< 0: hardware concurrency
  double scan_step = 0.0;   ///< 0: radial spacing of the grid
  double slack = 0.0;
  bool slack_from_deficit = false;  ///< "slack": "deficit" uses def of each record
  Resolution resolution;
  std::optional<double> U;  ///< bound for G(g, U); default: sup of the solution
  double init_scale = 0.0;  ///< torsion init scale; 0: |g(0, 0)|

  DiskGrid grid() const { return DiskGrid(n_r, n_theta); }

  /// Ladder checks; the semilinear family must carry an eps parameter.
  void validate(bool need_ladder = true) const;
};

/// Returns `spec` with every eps parameter set to `eps`; families without
/// one come back unchanged.
inline FieldSpec with_eps(const FieldSpec& spec, double eps) {
  using namespace family;
  return std::visit(
      [&](const auto& f) -> FieldSpec {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, AxialLinear> || std::is_same_v<T, AngularHarmonic>) {
          T g = f;
          g.eps = eps;
          return FieldSpec(g, spec.nonneg());
        } else if constexpr (std::is_same_v<T, Sum>) {
          Sum s;
          for (const auto& t : f.terms) s.terms.push_back(with_eps(t, eps));
          return FieldSpec(s, spec.nonneg());
        } else {
          return spec;
        }
      },
      spec.family());
}

inline bool has_eps(const FieldSpec& spec) {
  using namespace family;
  return std::visit(
      [](const auto& f) -> bool {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, AxialLinear> || std::is_same_v<T, AngularHarmonic>) return true;
        else if constexpr (std::is_same_v<T, Sum>) {
          for (const auto& t : f.terms)
            if (has_eps(t)) return true;
          return false;
        } else return false;
      },
      spec.family());
}

inline void ExperimentConfig::validate(bool need_ladder) const {
  solver.validate();
  (void)grid();
  if (need_ladder) {
    if (ladder.size() < 3) throw ValidationError("config: ladder needs at least 3 values");
    for (std::size_t k = 0; k < ladder.size(); ++k) {
      if (!(ladder[k] >= 0.0) || !std::isfinite(ladder[k])) throw ValidationError("config: ladder values must be >= 0");
      if (k > 0 && !(ladder[k] > ladder[k - 1])) throw ValidationError("config: ladder must be strictly increasing");
    }
    if (problem == ProblemKind::semilinear && !has_eps(kappa) && ladder.back() > 0.0)
      throw ValidationError("config: kappa family \"" + kappa.family_name() + "\" has no eps parameter to sweep");
    if (problem == ProblemKind::mapped)
      for (double e : ladder) (void)make_map(map_kind, e, profile);
  }
  if (threads < 0) throw ValidationError("config: threads must be >= 0");
  if (!(scan_step >= 0.0)) throw ValidationError("config: scan_step must be >= 0");
  if (!(slack >= 0.0)) throw ValidationError("config: slack must be >= 0");
  if (resolution.n_r < 3 || resolution.n_theta < 8) throw ValidationError("config: resolution too coarse");
  if (U && !(*U > 0.0)) throw ValidationError("config: U must be positive");
  if (!(init_scale >= 0.0)) throw ValidationError("config: init.scale must be >= 0");
}

inline void to_json(json& j, const SolverParams& p) {
  j = {{"newton_tol", p.newton_tol},
       {"max_newton_iters", p.max_newton_iters},
       {"min_damping", p.min_damping},
       {"linear_tol", p.linear_tol},
       {"positivity_floor", p.positivity_floor}};
}

inline SolverParams solver_params_from_json(const json& j) {
  SolverParams p;
  p.newton_tol = j.value("newton_tol", p.newton_tol);
  p.max_newton_iters = j.value("max_newton_iters", p.max_newton_iters);
  p.min_damping = j.value("min_damping", p.min_damping);
  p.linear_tol = j.value("linear_tol", p.linear_tol);
  p.positivity_floor = j.value("positivity_floor", p.positivity_floor);
  return p;
}

inline void to_json(json& j, const ExperimentConfig& c) {
  json modes = json::array();
  for (const auto& m : c.profile.modes) modes.push_back({{"amp", m.amp}, {"k", m.k}, {"phase", m.phase}});
  j = {{"problem", c.problem == ProblemKind::semilinear ? "semilinear" : "mapped"},
       {"f", c.f},
       {"eps", c.eps ? json(*c.eps) : json(nullptr)},
       {"ladder", c.ladder},
       {"grid", {c.n_r, c.n_theta}},
       {"solver", c.solver},
       {"seed", c.seed},
       {"threads", c.threads},
       {"scan_step", c.scan_step},
       {"slack", c.slack_from_deficit ? json("deficit") : json(c.slack)},
       {"resolution", {c.resolution.n_r, c.resolution.n_theta}},
       {"U", c.U ? json(*c.U) : json(nullptr)},
       {"init", {{"kind", "torsion"}, {"scale", c.init_scale}}}};
  if (c.problem == ProblemKind::semilinear) j["kappa"] = c.kappa;
  else j["map"] = {{"kind", to_string(c.map_kind)}, {"profile", modes}};
}

inline std::pair<int, int> parse_pair(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) throw ValidationError(std::string("config: ") + what + " must be [n_r, n_theta]");
  return {j[0].get<int>(), j[1].get<int>()};
}

inline ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  ExperimentConfig c;
  try {
    const std::string kind = j.value("problem", std::string("semilinear"));
    if (kind == "semilinear") c.problem = ProblemKind::semilinear;
    else if (kind == "mapped") c.problem = ProblemKind::mapped;
    else throw ValidationError("config: unknown problem \"" + kind + "\"");
    if (j.contains("kappa")) c.kappa = j.at("kappa").get<FieldSpec>();
    if (j.contains("f")) c.f = j.at("f").get<NonlinearitySpec>();
    if (j.contains("map")) {
      const json& m = j.at("map");
      c.map_kind = parse_map_kind(m.value("kind", std::string("ellipsoid")));
      c.profile = profile_from_json(m.value("profile", json::array()));
      if (m.contains("eps") && !m.at("eps").is_null()) c.eps = m.at("eps").get<double>();
    }
    if (j.contains("eps") && !j.at("eps").is_null()) c.eps = j.at("eps").get<double>();
    if (j.contains("ladder")) c.ladder = j.at("ladder").get<std::vector<double>>();
    if (j.contains("grid")) std::tie(c.n_r, c.n_theta) = parse_pair(j.at("grid"), "grid");
    if (j.contains("solver")) c.solver = solver_params_from_json(j.at("solver"));
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.scan_step = j.value("scan_step", c.scan_step);
    if (j.contains("slack")) {
      if (j.at("slack").is_string()) {
        if (j.at("slack").get<std::string>() != "deficit") throw ValidationError("config: slack must be a number or \"deficit\"");
        c.slack_from_deficit = true;
      } else {
        c.slack = j.at("slack").get<double>();
      }
    }
    if (j.contains("resolution")) std::tie(c.resolution.n_r, c.resolution.n_theta) = parse_pair(j.at("resolution"), "resolution");
    if (j.contains("U") && !j.at("U").is_null()) c.U = j.at("U").get<double>();
    if (j.contains("init")) c.init_scale = j.at("init").value("scale", 0.0);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

inline json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read config file " + path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw ValidationError("config " + path + ": " + e.what());
  }
}

}  // namespace gnnlab
