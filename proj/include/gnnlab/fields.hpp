#pragma once

/// \file
/// Closed-form parametric families for the weight kappa(x), the nonlinearity
/// f(s), space-dependent right-hand sides g(x, s) = sum kappa_i(x) f_i(s), and
/// their JSON encoding.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "gnnlab/errors.hpp"
#include "gnnlab/grid.hpp"

namespace gnnlab {

using nlohmann::json;

class FieldSpec;

namespace family {
/// kappa = c
struct Constant {
  double c = 1.0;
};
/// kappa = sum_k coeffs[k] |x|^k
struct RadialPolynomial {
  std::vector<double> coeffs;
};
/// kappa = c + eps (x . e_angle); angle = pi/2 gives 1 + eps x_n.
struct AxialLinear {
  double c = 1.0;
  double eps = 0.0;
  double angle = std::numbers::pi / 2;
};
/// kappa = c + eps |x|^m cos(k (theta - phase))
struct AngularHarmonic {
  double c = 1.0;
  double eps = 0.0;
  double m = 1.0;
  int k = 1;
  double phase = 0.0;
};
struct Sum {
  std::vector<FieldSpec> terms;
};
}  // namespace family

/// A smooth function on the closed unit disk with analytic gradient.
class FieldSpec {
 public:
  using Family = std::variant<family::Constant, family::RadialPolynomial, family::AxialLinear,
                              family::AngularHarmonic, family::Sum>;

  FieldSpec() : family_(family::Constant{1.0}) {}
  FieldSpec(Family f, bool nonneg = false) : family_(std::move(f)), nonneg_(nonneg) {}

  static FieldSpec constant(double c) { return FieldSpec(family::Constant{c}, c >= 0); }
  static FieldSpec radial_polynomial(std::vector<double> coeffs) {
    return FieldSpec(family::RadialPolynomial{std::move(coeffs)});
  }
  static FieldSpec axial_linear(double eps, double c = 1.0, double angle = std::numbers::pi / 2) {
    return FieldSpec(family::AxialLinear{c, eps, angle});
  }
  static FieldSpec angular_harmonic(double eps, double m, int k, double c = 1.0, double phase = 0.0) {
    return FieldSpec(family::AngularHarmonic{c, eps, m, k, phase});
  }
  static FieldSpec sum(std::vector<FieldSpec> terms) { return FieldSpec(family::Sum{std::move(terms)}); }

  const Family& family() const { return family_; }
  bool nonneg() const { return nonneg_; }
  FieldSpec& set_nonneg(bool v) {
    nonneg_ = v;
    return *this;
  }

  std::string family_name() const {
    return std::visit(
        [](const auto& f) -> std::string {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, family::Constant>) return "constant";
          else if constexpr (std::is_same_v<T, family::RadialPolynomial>) return "radial-polynomial";
          else if constexpr (std::is_same_v<T, family::AxialLinear>) return "axial-linear";
          else if constexpr (std::is_same_v<T, family::AngularHarmonic>) return "angular-harmonic";
          else return "sum";
        },
        family_);
  }

  double value(const Vec2& x) const {
    return std::visit(
        [&](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, family::Constant>) {
            return f.c;
          } else if constexpr (std::is_same_v<T, family::RadialPolynomial>) {
            const double r = x.norm();
            double acc = 0.0;
            for (auto it = f.coeffs.rbegin(); it != f.coeffs.rend(); ++it) acc = acc * r + *it;
            return acc;
          } else if constexpr (std::is_same_v<T, family::AxialLinear>) {
            return f.c + f.eps * (x.x() * std::cos(f.angle) + x.y() * std::sin(f.angle));
          } else if constexpr (std::is_same_v<T, family::AngularHarmonic>) {
            const double r = x.norm();
            const double th = r > 0 ? std::atan2(x.y(), x.x()) : 0.0;
            const double rm = f.m == 0 ? 1.0 : std::pow(r, f.m);
            return f.c + f.eps * rm * std::cos(f.k * (th - f.phase));
          } else {
            double acc = 0.0;
            for (const auto& t : f.terms) acc += t.value(x);
            return acc;
          }
        },
        family_);
  }

  Vec2 gradient(const Vec2& x) const {
    return std::visit(
        [&](const auto& f) -> Vec2 {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, family::Constant>) {
            return Vec2::Zero();
          } else if constexpr (std::is_same_v<T, family::RadialPolynomial>) {
            const double r = x.norm();
            if (r == 0.0) return Vec2::Zero();
            double dp = 0.0;
            for (std::size_t k = f.coeffs.size(); k-- > 1;) dp = dp * r + k * f.coeffs[k];
            return dp * x / r;
          } else if constexpr (std::is_same_v<T, family::AxialLinear>) {
            return f.eps * Vec2(std::cos(f.angle), std::sin(f.angle));
          } else if constexpr (std::is_same_v<T, family::AngularHarmonic>) {
            const double r = x.norm();
            if (r == 0.0) {
              if (f.m == 1.0 && f.k == 1) return f.eps * Vec2(std::cos(f.phase), std::sin(f.phase));
              return Vec2::Zero();
            }
            const double th = std::atan2(x.y(), x.x());
            const double rm1 = std::pow(r, f.m - 1.0);
            const double d_r = f.eps * f.m * rm1 * std::cos(f.k * (th - f.phase));
            const double d_t = -f.eps * f.k * rm1 * std::sin(f.k * (th - f.phase));
            const Vec2 er = x / r;
            const Vec2 et(-er.y(), er.x());
            return d_r * er + d_t * et;
          } else {
            Vec2 acc = Vec2::Zero();
            for (const auto& t : f.terms) acc += t.gradient(x);
            return acc;
          }
        },
        family_);
  }

  /// (x/|x|) . grad; zero at the origin by convention.
  double radial_derivative(const Vec2& x) const {
    const double r = x.norm();
    return r == 0.0 ? 0.0 : gradient(x).dot(x) / r;
  }

  /// |grad - (x/|x|) d_r|; zero at the origin by convention.
  double angular_gradient_norm(const Vec2& x) const {
    const double r = x.norm();
    if (r == 0.0) return 0.0;
    const Vec2 er = x / r;
    const Vec2 et(-er.y(), er.x());
    return std::abs(gradient(x).dot(et));
  }

  /// The spec composed with a rotation: out(x) = this(R_{-angle} x).
  FieldSpec rotated(double angle) const {
    FieldSpec out = *this;
    std::visit(
        [&](auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, family::AxialLinear>) f.angle += angle;
          else if constexpr (std::is_same_v<T, family::AngularHarmonic>) f.phase += angle;
          else if constexpr (std::is_same_v<T, family::Sum>)
            for (auto& t : f.terms) t = t.rotated(angle);
        },
        out.family_);
    return out;
  }

  /// True when the value depends on |x| only.
  bool is_radial() const {
    return std::visit(
        [](const auto& f) -> bool {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, family::Constant> || std::is_same_v<T, family::RadialPolynomial>)
            return true;
          else if constexpr (std::is_same_v<T, family::AxialLinear>) return f.eps == 0.0;
          else if constexpr (std::is_same_v<T, family::AngularHarmonic>) return f.eps == 0.0 || f.k == 0;
          else return std::all_of(f.terms.begin(), f.terms.end(), [](const FieldSpec& t) { return t.is_radial(); });
        },
        family_);
  }

 private:
  Family family_;
  bool nonneg_ = false;
};

/// kappa evaluated with the nonneg flag enforced.
inline double eval_kappa(const FieldSpec& spec, const Vec2& x) {
  if (x.norm() > 1.0 + kBoundaryClamp) throw OutOfDomain("eval_kappa: point outside the unit disk");
  const double v = spec.value(x);
  if (spec.nonneg() && v < 0.0)
    throw ValidationError("eval_kappa: negative value " + std::to_string(v) + " for a spec flagged nonneg");
  return v;
}

namespace nl {
struct Constant {
  double c = 1.0;
};
/// f(s) = A s^p
struct Power {
  double A = 1.0;
  double p = 1.0;
};
/// f(s) = a + b s^p
struct AffinePower {
  double a = 0.0;
  double b = 1.0;
  double p = 1.0;
};
/// Piecewise linear through (s[k], f[k]), extended linearly past the ends.
struct Table {
  std::vector<double> s;
  std::vector<double> f;
};
}  // namespace nl

namespace detail {
inline bool is_integer(double p) { return std::floor(p) == p; }
// s^p with the convention that non-integer powers vanish for s < 0.
inline double spow(double s, double p) {
  if (p == 0.0) return 1.0;
  if (s < 0.0 && !is_integer(p)) return 0.0;
  return std::pow(s, p);
}
inline double dspow(double s, double p) {
  if (p == 0.0) return 0.0;
  if (s < 0.0 && !is_integer(p)) return 0.0;
  if (p == 1.0) return 1.0;
  return p * std::pow(s, p - 1.0);
}
}  // namespace detail

/// The nonlinearity f(s).
class NonlinearitySpec {
 public:
  using Family = std::variant<nl::Constant, nl::Power, nl::AffinePower, nl::Table>;

  NonlinearitySpec() : family_(nl::Constant{1.0}), nonneg_(true) {}
  NonlinearitySpec(Family f, bool nonneg = false) : family_(std::move(f)), nonneg_(nonneg) {
    if (auto* t = std::get_if<nl::Table>(&family_)) {
      if (t->s.size() < 2 || t->s.size() != t->f.size())
        throw ValidationError("custom-table nonlinearity needs >= 2 matching (s, f) samples");
      if (!std::is_sorted(t->s.begin(), t->s.end()) ||
          std::adjacent_find(t->s.begin(), t->s.end()) != t->s.end())
        throw ValidationError("custom-table abscissae must be strictly increasing");
    }
  }

  static NonlinearitySpec constant(double c) { return NonlinearitySpec(nl::Constant{c}, c >= 0); }
  static NonlinearitySpec power(double A, double p) { return NonlinearitySpec(nl::Power{A, p}, A >= 0); }
  static NonlinearitySpec affine_power(double a, double b, double p, bool nonneg = false) {
    return NonlinearitySpec(nl::AffinePower{a, b, p}, nonneg);
  }
  static NonlinearitySpec table(std::vector<double> s, std::vector<double> f, bool nonneg = false) {
    return NonlinearitySpec(nl::Table{std::move(s), std::move(f)}, nonneg);
  }

  const Family& family() const { return family_; }
  bool nonneg() const { return nonneg_; }
  NonlinearitySpec& set_nonneg(bool v) {
    nonneg_ = v;
    return *this;
  }

  std::string family_name() const {
    switch (family_.index()) {
      case 0: return "constant";
      case 1: return "power";
      case 2: return "affine-power";
      default: return "custom-table";
    }
  }

  double value(double s) const {
    return std::visit(
        [&](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, nl::Constant>) return f.c;
          else if constexpr (std::is_same_v<T, nl::Power>) return f.A * detail::spow(s, f.p);
          else if constexpr (std::is_same_v<T, nl::AffinePower>) return f.a + f.b * detail::spow(s, f.p);
          else {
            const std::size_t k = segment(f, s);
            const double slope = (f.f[k + 1] - f.f[k]) / (f.s[k + 1] - f.s[k]);
            return f.f[k] + slope * (s - f.s[k]);
          }
        },
        family_);
  }

  double derivative(double s) const {
    return std::visit(
        [&](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, nl::Constant>) return 0.0;
          else if constexpr (std::is_same_v<T, nl::Power>) return f.A * detail::dspow(s, f.p);
          else if constexpr (std::is_same_v<T, nl::AffinePower>) return f.b * detail::dspow(s, f.p);
          else {
            const std::size_t k = segment(f, s);
            return (f.f[k + 1] - f.f[k]) / (f.s[k + 1] - f.s[k]);
          }
        },
        family_);
  }

  /// Lipschitz constant of f on [0, U]: closed form for the polynomial
  /// families with p >= 1, else the sampled sup of |f'| over 10^4 points.
  double lipschitz(double U) const {
    if (std::holds_alternative<nl::Constant>(family_)) return 0.0;
    if (const auto* p = std::get_if<nl::Power>(&family_); p && p->p >= 1.0)
      return std::abs(p->A) * p->p * std::pow(U, p->p - 1.0);
    if (const auto* a = std::get_if<nl::AffinePower>(&family_); a && a->p >= 1.0)
      return std::abs(a->b) * a->p * std::pow(U, a->p - 1.0);
    if (const auto* a = std::get_if<nl::AffinePower>(&family_); a && a->p == 0.0) return 0.0;
    double best = 0.0;
    constexpr int kSamples = 10000;
    for (int q = 0; q < kSamples; ++q) best = std::max(best, std::abs(derivative(U * q / (kSamples - 1))));
    return best;
  }

 private:
  static std::size_t segment(const nl::Table& t, double s) {
    const auto it = std::upper_bound(t.s.begin(), t.s.end(), s);
    std::size_t k = it == t.s.begin() ? 0 : static_cast<std::size_t>(it - t.s.begin()) - 1;
    return std::min(k, t.s.size() - 2);
  }

  Family family_;
  bool nonneg_ = false;
};

/// g(x, s) = sum_i kappa_i(x) f_i(s).
class RHSSpec {
 public:
  struct Term {
    FieldSpec kappa;
    NonlinearitySpec f;
  };

  RHSSpec() = default;
  explicit RHSSpec(std::vector<Term> terms) : terms_(std::move(terms)) {}
  static RHSSpec product(FieldSpec kappa, NonlinearitySpec f) { return RHSSpec({Term{std::move(kappa), std::move(f)}}); }
  static RHSSpec of(NonlinearitySpec f) { return product(FieldSpec::constant(1.0), std::move(f)); }

  const std::vector<Term>& terms() const { return terms_; }

  double value(const Vec2& x, double s) const {
    double acc = 0.0;
    for (const auto& t : terms_) acc += t.kappa.value(x) * t.f.value(s);
    return acc;
  }
  double ds(const Vec2& x, double s) const {
    double acc = 0.0;
    for (const auto& t : terms_) acc += t.kappa.value(x) * t.f.derivative(s);
    return acc;
  }
  Vec2 grad_x(const Vec2& x, double s) const {
    Vec2 acc = Vec2::Zero();
    for (const auto& t : terms_) acc += t.kappa.gradient(x) * t.f.value(s);
    return acc;
  }
  double radial_derivative(const Vec2& x, double s) const {
    const double r = x.norm();
    return r == 0.0 ? 0.0 : grad_x(x, s).dot(x) / r;
  }
  double angular_gradient_norm(const Vec2& x, double s) const {
    const double r = x.norm();
    if (r == 0.0) return 0.0;
    return std::abs(grad_x(x, s).dot(Vec2(-x.y(), x.x()) / r));
  }

 private:
  std::vector<Term> terms_;
};

/// Outcome of the hypothesis checker. Violations are listed, never thrown.
struct HypothesisReport {
  bool kappa_nonneg = true;
  double kappa_min = 0.0;  ///< sampled inf of kappa over the grid
  double kappa_max = 0.0;
  bool f_nonneg = true;
  double f_min = 0.0;  ///< sampled inf of f on [0, U]
  double f_lipschitz = 0.0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

inline HypothesisReport check_hypotheses(const FieldSpec& kappa, const NonlinearitySpec& f, double U,
                                         const DiskGrid& sampling = DiskGrid(129, 256)) {
  if (!(U > 0)) throw ValidationError("check_hypotheses: U must be positive");
  HypothesisReport rep;
  rep.kappa_min = std::numeric_limits<double>::infinity();
  rep.kappa_max = -std::numeric_limits<double>::infinity();
  sampling.for_each_node([&](int i, int j, std::size_t) {
    const double v = kappa.value(sampling.point(i, j));
    rep.kappa_min = std::min(rep.kappa_min, v);
    rep.kappa_max = std::max(rep.kappa_max, v);
  });
  rep.kappa_nonneg = rep.kappa_min >= 0.0;
  if (!rep.kappa_nonneg) rep.violations.push_back("kappa takes negative values (min " + std::to_string(rep.kappa_min) + ")");

  rep.f_min = std::numeric_limits<double>::infinity();
  constexpr int kSamples = 10000;
  for (int q = 0; q < kSamples; ++q) rep.f_min = std::min(rep.f_min, f.value(U * q / (kSamples - 1)));
  rep.f_nonneg = rep.f_min >= 0.0;
  if (f.nonneg() && !rep.f_nonneg)
    rep.violations.push_back("f flagged nonneg but f(s) < 0 on [0, U] (min " + std::to_string(rep.f_min) + ")");
  if (kappa.nonneg() && !rep.kappa_nonneg) rep.violations.push_back("kappa flagged nonneg but negative");
  rep.f_lipschitz = f.lipschitz(U);
  return rep;
}

// ---------------------------------------------------------------------------
// JSON encoding: {"family": ..., "params": {...}, "flags": {"nonneg": bool}}

inline void to_json(json& j, const FieldSpec& spec) {
  json params = json::object();
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::Constant>) {
          params["c"] = f.c;
        } else if constexpr (std::is_same_v<T, family::RadialPolynomial>) {
          params["coeffs"] = f.coeffs;
        } else if constexpr (std::is_same_v<T, family::AxialLinear>) {
          params = {{"c", f.c}, {"eps", f.eps}, {"angle", f.angle}};
        } else if constexpr (std::is_same_v<T, family::AngularHarmonic>) {
          params = {{"c", f.c}, {"eps", f.eps}, {"m", f.m}, {"k", f.k}, {"phase", f.phase}};
        } else {
          json terms = json::array();
          for (const auto& t : f.terms) terms.push_back(t);
          params["terms"] = terms;
        }
      },
      spec.family());
  j = {{"family", spec.family_name()}, {"params", params}, {"flags", {{"nonneg", spec.nonneg()}}}};
}

inline void from_json(const json& j, FieldSpec& spec) {
  if (!j.is_object() || !j.contains("family")) throw ValidationError("field spec: expected an object with \"family\"");
  const std::string fam = j.at("family").get<std::string>();
  const json params = j.value("params", json::object());
  const bool nonneg = j.contains("flags") ? j.at("flags").value("nonneg", false) : false;
  try {
    if (fam == "constant") {
      spec = FieldSpec(family::Constant{params.value("c", 1.0)}, nonneg);
    } else if (fam == "radial-polynomial") {
      spec = FieldSpec(family::RadialPolynomial{params.at("coeffs").get<std::vector<double>>()}, nonneg);
    } else if (fam == "axial-linear") {
      spec = FieldSpec(family::AxialLinear{params.value("c", 1.0), params.value("eps", 0.0),
                                           params.value("angle", std::numbers::pi / 2)},
                       nonneg);
    } else if (fam == "angular-harmonic") {
      spec = FieldSpec(family::AngularHarmonic{params.value("c", 1.0), params.value("eps", 0.0), params.value("m", 1.0),
                                               params.value("k", 1), params.value("phase", 0.0)},
                       nonneg);
    } else if (fam == "sum") {
      std::vector<FieldSpec> terms;
      for (const auto& t : params.at("terms")) terms.push_back(t.get<FieldSpec>());
      spec = FieldSpec(family::Sum{std::move(terms)}, nonneg);
    } else {
      throw ValidationError("field spec: unknown family \"" + fam + "\"");
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("field spec: ") + e.what());
  }
}

inline void to_json(json& j, const NonlinearitySpec& spec) {
  json params = json::object();
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, nl::Constant>) params["c"] = f.c;
        else if constexpr (std::is_same_v<T, nl::Power>) params = {{"A", f.A}, {"p", f.p}};
        else if constexpr (std::is_same_v<T, nl::AffinePower>) params = {{"a", f.a}, {"b", f.b}, {"p", f.p}};
        else params = {{"s", f.s}, {"f", f.f}};
      },
      spec.family());
  j = {{"family", spec.family_name()}, {"params", params}, {"flags", {{"nonneg", spec.nonneg()}}}};
}

inline void from_json(const json& j, NonlinearitySpec& spec) {
  if (!j.is_object() || !j.contains("family"))
    throw ValidationError("nonlinearity spec: expected an object with \"family\"");
  const std::string fam = j.at("family").get<std::string>();
  const json params = j.value("params", json::object());
  const bool nonneg = j.contains("flags") ? j.at("flags").value("nonneg", false) : false;
  try {
    if (fam == "constant") spec = NonlinearitySpec(nl::Constant{params.value("c", 1.0)}, nonneg);
    else if (fam == "power") spec = NonlinearitySpec(nl::Power{params.value("A", 1.0), params.value("p", 1.0)}, nonneg);
    else if (fam == "affine-power")
      spec = NonlinearitySpec(nl::AffinePower{params.value("a", 0.0), params.value("b", 1.0), params.value("p", 1.0)},
                              nonneg);
    else if (fam == "custom-table")
      spec = NonlinearitySpec(
          nl::Table{params.at("s").get<std::vector<double>>(), params.at("f").get<std::vector<double>>()}, nonneg);
    else throw ValidationError("nonlinearity spec: unknown family \"" + fam + "\"");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("nonlinearity spec: ") + e.what());
  }
}

}  // namespace gnnlab
