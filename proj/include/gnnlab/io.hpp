#pragma once

/// \file
/// Byte-stable output helpers: shortest round-trip number formatting and
/// file writes with path context in errors.

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "gnnlab/fields.hpp"

namespace gnnlab {

/// Shortest decimal form that parses back to the same double; "nan", "inf",
/// "-inf" otherwise.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

/// json value for a double; non-finite values become null.
inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::filesystem::path prepare_dir(const std::string& dir) {
  if (dir.empty()) throw ValidationError("output directory path is empty");
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw IoError("cannot create directory " + p.string() + ": " + ec.message());
  return p;
}

inline void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << body;
  os.close();
  if (!os) throw IoError("write failed for " + path.string());
}

/// Pretty JSON with a trailing newline.
inline void write_json(const std::filesystem::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

}  // namespace gnnlab
