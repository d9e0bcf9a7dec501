#pragma once

/// \file
/// Geometry of the weak Harnack chain: centers p_k = t_k ell e_n, radii
/// r_k = (1 - t_k) d + t_k delta, balls B_k = B_{r_k}(p_k), B'_k = B_{r_k/2}(p_k).

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "gnnlab/errors.hpp"
#include "gnnlab/fields.hpp"
#include "gnnlab/io.hpp"

namespace gnnlab {

struct ChainConfig {
  double d = 1.0;       ///< inradius
  double delta = 0.1;   ///< in (0, d/3]
  double ell = 2.0;     ///< distance between the two end centers
  double c_sharp = 0.5; ///< d >= c_sharp * diam
  int n_dim = 2;
  double diam = 0.0;    ///< 0 means d / c_sharp
  std::uint64_t seed = 1;
  int samples = 100000;

  double diameter() const { return diam > 0.0 ? diam : d / c_sharp; }
  bool chain_branch() const { return 2.0 * ell >= d; }
  /// (2 ell - d + delta) / (2 ell)
  double ratio() const { return (2.0 * ell - d + delta) / (2.0 * ell); }

  void validate() const {
    if (!(d > 0.0)) throw ValidationError("chain: d must be positive");
    if (!(delta > 0.0 && delta <= d / 3.0 * (1.0 + 1e-15))) throw ValidationError("chain: delta must lie in (0, d/3]");
    if (!(ell >= 0.0)) throw ValidationError("chain: ell must be nonnegative");
    if (!(c_sharp > 0.0 && c_sharp <= 1.0)) throw ValidationError("chain: c_sharp must lie in (0, 1]");
    if (n_dim < 2) throw ValidationError("chain: n_dim must be >= 2");
    if (diam < 0.0) throw ValidationError("chain: diam must be nonnegative");
    if (d < c_sharp * diameter() * (1.0 - 1e-12)) throw ValidationError("chain: requires d >= c_sharp * diam");
    if (samples < 1) throw ValidationError("chain: samples must be positive");
  }
};

struct OverlapCheck {
  int k = 0;
  bool containment = false;    ///< B_{r_k/4}(p_k - t_k/4 e_n) inside both B' balls
  double volume_ratio = 0.0;   ///< |B'_k| / |B'_{k-1} cap B'_k|, sampled
  double ratio_sigma = 0.0;
  bool ratio_ok = false;
};

struct ChainReport {
  std::vector<double> t;  ///< t_0 .. t_{N+1} (recursion)
  std::vector<double> r;
  int N = 0;
  bool chain_branch = true;
  double ratio = 0.0;                ///< (2 ell - d + delta) / (2 ell)
  double threshold = 0.0;            ///< log(d/delta) / log(1 + (d-delta)/(2 ell - d + delta))
  double closed_form_error = 0.0;    ///< max_k |t_k recursion - closed form|
  bool log_bound_ok = false;
  double log_bound_margin = 0.0;     ///< threshold - N
  double separation = 0.0;           ///< (d - delta) / (2 ell - d + delta)
  bool separation_ok = false;        ///< separation >= c_sharp / 3
  bool overlap_ok = false;
  std::string overlap_route = "none";  ///< containment | volume-ratio | trivial
  std::vector<OverlapCheck> overlaps;
};

/// t_k from the recursion t_k = d/(2 ell) + q t_{k-1}, t_0 = 0.
inline std::vector<double> chain_recursion(const ChainConfig& c, int kmax) {
  std::vector<double> t(static_cast<std::size_t>(kmax) + 1, 0.0);
  const double q = c.ratio(), a = c.d / (2.0 * c.ell);
  for (int k = 1; k <= kmax; ++k) t[k] = a + q * t[k - 1];
  return t;
}

/// t_k = d/(d - delta) (1 - q^k).
inline double chain_closed_form(const ChainConfig& c, int k) {
  return c.d / (c.d - c.delta) * -std::expm1(k * std::log(c.ratio()));
}

inline double chain_threshold(const ChainConfig& c) {
  return std::log(c.d / c.delta) / std::log1p((c.d - c.delta) / (2.0 * c.ell - c.d + c.delta));
}

namespace detail {
// Uniform point in the n-ball of radius rad about the origin.
inline std::vector<double> ball_sample(std::mt19937_64& rng, int n, double rad) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> x(n);
  double norm = 0.0;
  for (double& v : x) {
    v = gauss(rng);
    norm += v * v;
  }
  const double scale = rad * std::pow(unif(rng), 1.0 / n) / std::sqrt(norm);
  for (double& v : x) v *= scale;
  return x;
}
}  // namespace detail

/// Monte-Carlo check of |B'_k| / |B'_{k-1} cap B'_k| <= 2^n for k = 1..N.
/// The containment B_{r_k/4}(p_k - (t_k/4) e_n) is tried first; when it is
/// refuted for some k the ratio is certified by sampling B'_k directly.
inline void verify_overlap(const ChainConfig& c, ChainReport& rep) {
  rep.overlaps.clear();
  if (!rep.chain_branch || rep.N == 0) {
    rep.overlap_ok = true;
    rep.overlap_route = "trivial";
    return;
  }
  std::mt19937_64 rng(c.seed);
  const int n = c.n_dim;
  const double bound = std::ldexp(1.0, n);
  bool all_contained = true, all_ratio = true;
  // Centers lie on the e_n axis: only the last coordinate is offset.
  for (int k = 1; k <= rep.N; ++k) {
    OverlapCheck chk;
    chk.k = k;
    const double pk = rep.t[k] * c.ell, pk1 = rep.t[k - 1] * c.ell;
    const double Rk = rep.r[k] / 2.0, Rk1 = rep.r[k - 1] / 2.0;
    auto in_both = [&](const std::vector<double>& x, double shift) {
      double sk = 0.0, sk1 = 0.0;
      for (int a = 0; a < n - 1; ++a) sk += x[a] * x[a];
      sk1 = sk;
      const double xn = x[n - 1] + shift;
      sk += (xn - pk) * (xn - pk);
      sk1 += (xn - pk1) * (xn - pk1);
      return sk <= Rk * Rk && sk1 <= Rk1 * Rk1;
    };
    chk.containment = true;
    const double center = pk - rep.t[k] / 4.0;
    for (int s = 0; s < c.samples && chk.containment; ++s)
      chk.containment = in_both(detail::ball_sample(rng, n, rep.r[k] / 4.0), center);
    int hits = 0;
    for (int s = 0; s < c.samples; ++s) hits += in_both(detail::ball_sample(rng, n, Rk), pk);
    const double p = static_cast<double>(hits) / c.samples;
    if (hits > 0) {
      chk.volume_ratio = 1.0 / p;
      // delta method: sd(1/p) = sd(p) / p^2
      chk.ratio_sigma = std::sqrt(p * (1.0 - p) / c.samples) / (p * p);
      chk.ratio_ok = chk.volume_ratio - 3.0 * chk.ratio_sigma <= bound;
    } else {
      chk.volume_ratio = std::numeric_limits<double>::infinity();
    }
    all_contained = all_contained && chk.containment;
    all_ratio = all_ratio && chk.ratio_ok;
    rep.overlaps.push_back(chk);
  }
  if (all_contained) {
    rep.overlap_ok = true;
    rep.overlap_route = "containment";
  } else {
    rep.overlap_ok = all_ratio;
    rep.overlap_route = "volume-ratio";
  }
}

/// Fills the log-bound fields: N < threshold, and the separation inequality
/// (d - delta)/(2 ell - d + delta) >= c_sharp/3, which holds when ell <= diam.
inline void verify_log_bound(const ChainConfig& c, ChainReport& rep) {
  if (!rep.chain_branch) {
    rep.log_bound_ok = true;
    rep.separation_ok = true;
    return;
  }
  rep.threshold = chain_threshold(c);
  rep.log_bound_margin = rep.threshold - rep.N;
  rep.log_bound_ok = rep.N < rep.threshold;
  rep.separation = (c.d - c.delta) / (2.0 * c.ell - c.d + c.delta);
  rep.separation_ok = c.ell > c.diameter() || rep.separation >= c.c_sharp / 3.0;
}

/// Constant C with N <= C log(d/delta) when ell <= diam and d >= c_sharp diam:
/// 1 / log(1 + c_sharp/3).
inline double log_bound_constant(double c_sharp) { return 1.0 / std::log1p(c_sharp / 3.0); }

inline ChainReport build_chain(const ChainConfig& c, bool with_overlap = true) {
  c.validate();
  ChainReport rep;
  rep.chain_branch = c.chain_branch();
  if (!rep.chain_branch) {
    // Large overlap: one ball suffices.
    rep.t = {0.0};
    rep.r = {c.d};
    rep.N = 0;
    rep.log_bound_ok = rep.separation_ok = rep.overlap_ok = true;
    rep.overlap_route = "trivial";
    return rep;
  }
  rep.ratio = c.ratio();
  // t_k reaches 1 once q^k <= delta/d.
  const double kcap = std::ceil(chain_threshold(c)) + 2.0;
  if (!(kcap < 1e7)) throw ValidationError("chain: chain length too large");
  rep.t = chain_recursion(c, static_cast<int>(kcap));
  while (rep.t.size() > 2 && rep.t[rep.t.size() - 2] >= 1.0) rep.t.pop_back();
  rep.N = 0;
  while (rep.N + 1 < static_cast<int>(rep.t.size()) && rep.t[rep.N + 1] < 1.0) ++rep.N;
  rep.r.resize(rep.t.size());
  for (std::size_t k = 0; k < rep.t.size(); ++k) {
    rep.r[k] = (1.0 - rep.t[k]) * c.d + rep.t[k] * c.delta;
    rep.closed_form_error = std::max(rep.closed_form_error, std::abs(rep.t[k] - chain_closed_form(c, static_cast<int>(k))));
  }
  verify_log_bound(c, rep);
  if (with_overlap) verify_overlap(c, rep);
  return rep;
}

inline ChainConfig chain_config_from_json(const json& j) {
  try {
    ChainConfig c;
    c.d = j.value("d", c.d);
    c.delta = j.value("delta", c.delta);
    c.ell = j.value("ell", c.ell);
    c.c_sharp = j.value("c_sharp", c.c_sharp);
    c.n_dim = j.value("n_dim", c.n_dim);
    c.diam = j.value("diam", c.diam);
    c.seed = j.value("seed", c.seed);
    c.samples = j.value("samples", c.samples);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("chain config: ") + e.what());
  }
}

inline void to_json(json& j, const ChainReport& rep) {
  json ov = json::array();
  for (const auto& o : rep.overlaps)
    ov.push_back({{"k", o.k},
                  {"containment", o.containment},
                  {"volume_ratio", std::isfinite(o.volume_ratio) ? json(o.volume_ratio) : json(nullptr)},
                  {"ratio_sigma", o.ratio_sigma},
                  {"ratio_ok", o.ratio_ok}});
  j = {{"t", rep.t},
       {"r", rep.r},
       {"N", rep.N},
       {"chain_branch", rep.chain_branch},
       {"ratio", rep.ratio},
       {"threshold", rep.threshold},
       {"closed_form_error", rep.closed_form_error},
       {"log_bound_ok", rep.log_bound_ok},
       {"log_bound_margin", rep.log_bound_margin},
       {"separation", rep.separation},
       {"separation_ok", rep.separation_ok},
       {"overlap_ok", rep.overlap_ok},
       {"overlap_route", rep.overlap_route},
       {"overlaps", ov}};
}

/// Columns k, t_k, r_k.
inline void write_chain_csv(std::ostream& os, const ChainReport& rep) {
  os << "k,t_k,r_k\n";
  for (std::size_t k = 0; k < rep.t.size(); ++k) os << k << ',' << format_number(rep.t[k]) << ',' << format_number(rep.r[k]) << '\n';
}

}  // namespace gnnlab
