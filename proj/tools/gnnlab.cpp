// gnnlab command line: solve, deficit, sweep, planes, chain, map.
// Exit codes: 0 success, 2 validation error, 3 solver failure, 1 other.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "gnnlab.hpp"

namespace {

using namespace gnnlab;

struct CommonArgs {
  std::string config;
  std::string out;
  std::string grid;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("--config", a.config, "JSON config file")->required();
  sub->add_option("--out", a.out, "output directory")->required();
  sub->add_option("--grid", a.grid, "grid override NR,NT");
  sub->add_option("--seed", a.seed, "seed override");
}

std::pair<int, int> parse_grid(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ValidationError("--grid expects NR,NT");
  try {
    std::size_t p1 = 0, p2 = 0;
    const int nr = std::stoi(s.substr(0, comma), &p1);
    const int nt = std::stoi(s.substr(comma + 1), &p2);
    if (p1 != comma || p2 != s.size() - comma - 1) throw std::invalid_argument("trailing characters");
    return {nr, nt};
  } catch (const std::exception&) {
    throw ValidationError("--grid expects NR,NT, got \"" + s + "\"");
  }
}

json load(const CommonArgs& a) { return read_json_file(a.config); }

ExperimentConfig experiment(const CommonArgs& a, const json& j) {
  ExperimentConfig c = config_from_json(j);
  if (!a.grid.empty()) std::tie(c.n_r, c.n_theta) = parse_grid(a.grid);
  if (a.seed) c.seed = *a.seed;
  return c;
}

json solution_sidecar(const SolveReport& rep, const ExperimentConfig& c) {
  return {{"schema", "gnnlab.solution/1"},
          {"version", kVersion},
          {"grid", {{"n_r", c.n_r}, {"n_theta", c.n_theta}}},
          {"columns", "i,j,r,theta,value"},
          {"status", to_string(rep.status)},
          {"iterations", rep.iterations},
          {"residual_sup", rep.residual_sup},
          {"residual_floor", rep.residual_floor},
          {"sup_norm", rep.sup_norm},
          {"inf_ratio", rep.inf_ratio},
          {"positive_interior", rep.positive_interior},
          {"init_hash", rep.init_hash},
          {"field_hash", field_hash(rep.field)},
          {"config", c}};
}

int cmd_solve(const CommonArgs& a, bool planes_only) {
  const ExperimentConfig c = experiment(a, load(a));
  c.validate(false);
  PointSolve ps = solve_point(c, c.eps, true);
  if (!ps.solve) throw SolverFailure(ps.record.status);
  const auto dir = prepare_dir(a.out);
  const SolveReport& rep = *ps.solve;
  if (!planes_only) {
    write_file(dir / "solution.csv", solution_csv(rep.field));
    write_json(dir / "solution.json", solution_sidecar(rep, c));
    if (ps.symmetry) write_json(dir / "symmetry.json", *ps.symmetry);
  } else if (ps.planes) {
    json j = *ps.planes;
    j["tail_ok"] = ps.record.planes_tail_ok;
    write_json(dir / "planes.json", j);
  }
  if (!rep.converged()) {
    std::cerr << "solver did not converge: " << to_string(rep.status) << ", residual " << rep.residual_sup << "\n";
    return 3;
  }
  std::cerr << "converged in " << rep.iterations << " iterations, residual " << rep.residual_sup << "\n";
  return 0;
}

int cmd_deficit(const CommonArgs& a) {
  const json j = load(a);
  const ExperimentConfig c = experiment(a, j);
  c.validate(false);
  const auto dir = prepare_dir(a.out);
  if (c.problem == ProblemKind::semilinear) {
    const FieldSpec kappa = c.eps ? with_eps(c.kappa, *c.eps) : c.kappa;
    const std::string m = j.value("method", std::string("automatic"));
    if (m != "automatic" && m != "sampled") throw ValidationError("deficit: method must be automatic or sampled");
    const auto method = m == "sampled" ? DeficitMethod::sampled : DeficitMethod::automatic;
    json out = deficit_kappa(kappa, c.resolution, method);
    out["zeroth"] = deficit_zeroth(kappa, c.resolution);
    out["kappa"] = kappa;
    write_json(dir / "deficit.json", out);
  } else {
    const DomainMap map = make_map(c.map_kind, c.eps.value_or(0.0), c.profile);
    const PullbackProblem pb = pullback(map, c.f);
    json out = deficit_general(pb.op, pb.rhs, c.U.value_or(1.0), c.resolution);
    out["method"] = "sampled";
    out["map"] = map;
    write_json(dir / "deficit.json", out);
  }
  return 0;
}

int cmd_sweep(const CommonArgs& a) {
  const ExperimentConfig c = experiment(a, load(a));
  const SweepResult r = run_sweep(c);
  emit_report(r, a.out);
  if (r.fit.ok) std::cerr << "alpha = " << r.fit.fit.slope << " over " << r.fit.window.size() << " points\n";
  else std::cerr << r.fit.error << "\n";
  return 0;
}

int cmd_chain(const CommonArgs& a) {
  ChainConfig c = chain_config_from_json(load(a));
  if (a.seed) c.seed = *a.seed;
  const ChainReport rep = build_chain(c);
  const auto dir = prepare_dir(a.out);
  json j = rep;
  j["log_bound_constant"] = log_bound_constant(c.c_sharp);
  write_json(dir / "chain.json", j);
  std::ostringstream os;
  write_chain_csv(os, rep);
  write_file(dir / "chain.csv", os.str());
  return 0;
}

int cmd_map(const CommonArgs& a) {
  const json j = load(a);
  const DomainMap map = map_from_json(j.contains("map") ? j.at("map") : j);
  const auto dir = prepare_dir(a.out);
  // Round trip and ellipticity on a fixed sample of the disk.
  const DiskGrid g(33, 64);
  double roundtrip = 0.0;
  g.for_each_node([&](int i, int jj, std::size_t) {
    const Vec2 y = g.point(i, jj);
    roundtrip = std::max(roundtrip, (map.inverse(map.forward(y)) - y).norm());
  });
  const PullbackProblem pb = pullback(map, NonlinearitySpec::constant(1.0));
  json out = map;
  out["diagnostics"] = {{"roundtrip_error", roundtrip},
                        {"min_eigenvalue", pb.ellipticity.min_eigenvalue},
                        {"max_eigenvalue", pb.ellipticity.max_eigenvalue},
                        {"ellipticity", pb.op.ellipticity}};
  write_json(dir / "map.json", out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gnnlab: quantitative symmetry experiments on the unit disk"};
  app.require_subcommand(1);
  CommonArgs args;
  auto* solve = app.add_subcommand("solve", "solve one problem and dump the field");
  auto* deficit = app.add_subcommand("deficit", "evaluate deficit functionals");
  auto* sweep = app.add_subcommand("sweep", "run a perturbation ladder and fit alpha");
  auto* planes = app.add_subcommand("planes", "solve, then scan moving planes");
  auto* chain = app.add_subcommand("chain", "build and check a Harnack chain");
  auto* map = app.add_subcommand("map", "describe a domain map");
  for (auto* s : {solve, deficit, sweep, planes, chain, map}) add_common(s, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    if (solve->parsed()) return cmd_solve(args, false);
    if (planes->parsed()) return cmd_solve(args, true);
    if (deficit->parsed()) return cmd_deficit(args);
    if (sweep->parsed()) return cmd_sweep(args);
    if (chain->parsed()) return cmd_chain(args);
    if (map->parsed()) return cmd_map(args);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
