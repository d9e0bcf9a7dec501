#pragma once

/// \file
/// Sweep persistence: results.csv, results.json and a log-log plot.svg. No
/// timestamps or host data, so identical inputs give identical bytes.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "gnnlab/io.hpp"
#include "gnnlab/sweep.hpp"

namespace gnnlab {

inline constexpr const char* kResultsColumns =
    "eps,deficit_total,deficit_zeroth,asymmetry,monotonicity_defect,lambda_star,sup_norm,inf_ratio,ok,status,"
    "iterations,residual,in_fit";

inline std::string results_csv(const SweepResult& r) {
  std::ostringstream os;
  os << kResultsColumns << '\n';
  for (const auto& x : r.records) {
    os << format_number(x.eps) << ',' << format_number(x.deficit_total) << ',' << format_number(x.deficit_zeroth) << ','
       << format_number(x.asymmetry) << ',' << format_number(x.monotonicity_defect) << ','
       << format_number(x.lambda_star) << ',' << format_number(x.sup_norm) << ',' << format_number(x.inf_ratio) << ','
       << (x.ok ? 1 : 0) << ',' << csv_quote(x.status) << ',' << x.iterations << ',' << format_number(x.residual)
       << ',' << (x.in_fit ? 1 : 0) << '\n';
  }
  return os.str();
}

inline json record_json(const SweepRecord& x) {
  return {{"eps", x.eps},
                    {"ok", x.ok},
                    {"status", x.status},
                    {"iterations", x.iterations},
                    {"residual", finite_or_null(x.residual)},
                    {"deficit_total", finite_or_null(x.deficit_total)},
                    {"deficit_zeroth", finite_or_null(x.deficit_zeroth)},
                    {"asymmetry", finite_or_null(x.asymmetry)},
                    {"monotonicity_defect", finite_or_null(x.monotonicity_defect)},
                    {"lambda_star", finite_or_null(x.lambda_star)},
                    {"planes_tail_ok", x.planes_tail_ok},
                    {"planes_flag", x.planes_flag},
                    {"sup_norm", finite_or_null(x.sup_norm)},
                    {"inf_ratio", finite_or_null(x.inf_ratio)},
                    {"in_fit", x.in_fit}};
}

inline json results_json(const SweepResult& r) {
  json recs = json::array();
  for (const auto& x : r.records) recs.push_back(record_json(x));
  json fit = {{"ok", r.fit.ok}, {"fit_window", r.fit.window}};
  if (r.fit.ok) {
    fit["alpha"] = r.fit.fit.slope;
    fit["intercept"] = r.fit.fit.intercept;
    fit["residual"] = r.fit.fit.residual;
  } else {
    fit["alpha"] = nullptr;
    fit["error"] = r.fit.error;
  }
  return {{"schema", kSweepSchema},
          {"version", kVersion},
          {"columns", kResultsColumns},
          {"config", r.config},
          {"baseline", record_json(r.baseline)},
          {"noise_floor", r.noise_floor},
          {"records", recs},
          {"fit", fit}};
}

/// Log-log scatter of (deficit, asymmetry) with the fitted line, if any.
inline std::string results_svg(const SweepResult& r) {
  constexpr double W = 640, H = 480, L = 80, R = 20, T = 30, B = 60;
  std::vector<std::pair<double, double>> pts;
  for (const auto& x : r.records)
    if (x.ok && x.deficit_total > 0 && x.asymmetry > 0) pts.emplace_back(std::log10(x.deficit_total), std::log10(x.asymmetry));
  double x0 = -1, x1 = 0, y0 = -1, y1 = 0;
  if (!pts.empty()) {
    x0 = y0 = 1e300;
    x1 = y1 = -1e300;
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, x), x1 = std::max(x1, x);
      y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
    x0 = std::floor(x0 - 0.05), x1 = std::ceil(x1 + 0.05);
    y0 = std::floor(y0 - 0.05), y1 = std::ceil(y1 + 0.05);
  }
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  auto n = [](double v) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << v;
    return s.str();
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n";
  os << "<clipPath id=\"plot\"><rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
     << H - T - B << "\"/></clipPath>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double e = x0; e <= x1 + 1e-9; e += 1)
    os << "<text x=\"" << n(px(e)) << "\" y=\"" << H - B + 18 << "\" font-size=\"12\" text-anchor=\"middle\">1e"
       << static_cast<int>(e) << "</text>\n";
  for (double e = y0; e <= y1 + 1e-9; e += 1)
    os << "<text x=\"" << L - 8 << "\" y=\"" << n(py(e) + 4) << "\" font-size=\"12\" text-anchor=\"end\">1e"
       << static_cast<int>(e) << "</text>\n";
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" font-size=\"14\" text-anchor=\"middle\">deficit</text>\n";
  os << "<text x=\"20\" y=\"" << (T + H - B) / 2 << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << (T + H - B) / 2 << ")\">asymmetry</text>\n";
  if (r.fit.ok) {
    const double a = r.fit.fit.slope, c = r.fit.fit.intercept / std::log(10.0);
    os << "<line x1=\"" << n(px(x0)) << "\" y1=\"" << n(py(c + a * x0)) << "\" x2=\"" << n(px(x1)) << "\" y2=\""
       << n(py(c + a * x1)) << "\" stroke=\"steelblue\" stroke-width=\"1.5\" clip-path=\"url(#plot)\"/>\n";
    os << "<text x=\"" << L + 10 << "\" y=\"" << T + 18 << "\" font-size=\"13\">alpha = " << format_number(a)
       << "</text>\n";
  }
  for (const auto& [x, y] : pts)
    os << "<circle cx=\"" << n(px(x)) << "\" cy=\"" << n(py(y)) << "\" r=\"4\" fill=\"crimson\" clip-path=\"url(#plot)\"/>\n";
  os << "</svg>\n";
  return os.str();
}

/// Nodal dump with columns i, j, r, theta, value; the origin is one row (0, 0).
inline std::string solution_csv(const ScalarField& u) {
  const DiskGrid& g = u.grid();
  std::ostringstream os;
  os << "i,j,r,theta,value\n";
  g.for_each_node([&](int i, int j, std::size_t k) {
    os << i << ',' << j << ',' << format_number(g.r(i)) << ',' << format_number(g.theta(j)) << ','
       << format_number(u.values()[k]) << '\n';
  });
  return os.str();
}

/// Writes results.csv, results.json and plot.svg into dir.
inline void emit_report(const SweepResult& r, const std::string& dir) {
  const auto p = prepare_dir(dir);
  write_file(p / "results.csv", results_csv(r));
  write_json(p / "results.json", results_json(r));
  write_file(p / "plot.svg", results_svg(r));
}

}  // namespace gnnlab
