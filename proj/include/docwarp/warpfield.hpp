#pragma once

// Turns the ten warp parameters into per-row knot sets and a dense field of
// vertical pixel displacements. Positive values displace ink downward
// (toward larger row indices). Row indices i are 1-based in the knot
// equations, matching the G-equation convention.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "docwarp/image.hpp"
#include "docwarp/spline.hpp"

namespace docwarp {

struct WarpPositionParams {
  double p1;  // fraction locating the zero column of the top row
  double p2;  // fraction locating the zero column of the bottom row
};

struct WarpControlParams {
  double p3, p4, p5, p6;   // top-row knot values (outer, inner, inner, outer)
  double p7, p8, p9, p10;  // bottom-row knot values

  /// Outer values given, inner values by the 0.5 rule.
  static WarpControlParams from_outer(double p3, double p6, double p7, double p10) {
    return {p3, 0.5 * p3, 0.5 * p6, p6, p7, 0.5 * p7, 0.5 * p10, p10};
  }
};

enum class WarpType { I, II, III, IV };

inline std::string to_string(WarpType t) {
  switch (t) {
    case WarpType::I: return "I";
    case WarpType::II: return "II";
    case WarpType::III: return "III";
    case WarpType::IV: return "IV";
  }
  throw std::invalid_argument("bad WarpType");
}

inline WarpType warp_type_from_string(const std::string& s) {
  if (s == "I") return WarpType::I;
  if (s == "II") return WarpType::II;
  if (s == "III") return WarpType::III;
  if (s == "IV") return WarpType::IV;
  throw std::invalid_argument("warp type must be one of I, II, III, IV");
}

class WarpField {
public:
  WarpField(int rows, int cols)
      : rows_(rows), cols_(cols),
        f_(static_cast<std::size_t>(rows) * cols, 0.0) {
    if (rows < 1 || cols < 1)
      throw std::invalid_argument("WarpField: rows and cols must be >= 1");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double at(int r, int c) const {
    return f_[static_cast<std::size_t>(r) * cols_ + c];
  }
  void set(int r, int c, double v) {
    f_[static_cast<std::size_t>(r) * cols_ + c] = v;
  }

  double min_value() const {
    double m = f_[0];
    for (double v : f_) m = std::min(m, v);
    return m;
  }
  double max_value() const {
    double m = f_[0];
    for (double v : f_) m = std::max(m, v);
    return m;
  }

  WarpField negated() const {
    WarpField g(rows_, cols_);
    for (std::size_t i = 0; i < f_.size(); ++i) g.f_[i] = -f_[i];
    return g;
  }

private:
  int rows_;
  int cols_;
  std::vector<double> f_;
};

/// Column of zero displacement for 1-based row i, interpolating Z1 -> Z2.
inline int zero_column(int i, int z1, int z2, int rows) {
  if (rows < 2) throw std::invalid_argument("zero_column: need at least 2 rows");
  if (i < 1 || i > rows) throw std::invalid_argument("zero_column: row out of range");
  const double t = static_cast<double>(i - 1) / (rows - 1);
  return static_cast<int>(std::lround(z1 + (z2 - z1) * t));
}

/// The five knot columns of a row: both borders, the zero column, and the
/// midpoints between them.
inline std::array<int, 5> knot_columns(int cols, int zero_col) {
  if (zero_col < 0 || zero_col > cols - 1)
    throw std::invalid_argument("knot_columns: zero column outside image");
  const int left_mid = static_cast<int>(std::lround(zero_col / 2.0));
  const int right_mid = static_cast<int>(std::lround((zero_col + cols - 1) / 2.0));
  std::array<int, 5> ks{0, left_mid, zero_col, right_mid, cols - 1};
  for (int j = 0; j + 1 < 5; ++j)
    if (ks[j] >= ks[j + 1])
      throw std::invalid_argument(
          "knot_columns: zero column too close to the border, knots collide");
  return ks;
}

/// Knot values of 1-based row i: outer and inner values interpolate
/// linearly between the top row's and bottom row's parameters; the
/// center knot is always zero.
inline std::array<double, 5> knot_values(int i, int rows, const WarpControlParams& w) {
  if (rows < 2) throw std::invalid_argument("knot_values: need at least 2 rows");
  if (i < 1 || i > rows) throw std::invalid_argument("knot_values: row out of range");
  const double t = static_cast<double>(i - 1) / (rows - 1);
  return {
      (w.p7 - w.p3) * t + w.p3,
      (w.p8 - w.p4) * t + w.p4,
      0.0,
      (w.p9 - w.p5) * t + w.p5,
      (w.p10 - w.p6) * t + w.p6,
  };
}

/// Dense displacement field: one spline per row through that row's knots.
inline WarpField build_field(int rows, int cols, const WarpPositionParams& wpp,
                             const WarpControlParams& wcp, double lambda = 0.0) {
  if (rows < 2) throw std::invalid_argument("build_field: need at least 2 rows");
  if (cols < 5) throw std::invalid_argument("build_field: need at least 5 columns");
  const int z1 = static_cast<int>(std::lround(wpp.p1 * (cols - 1)));
  const int z2 = static_cast<int>(std::lround(wpp.p2 * (cols - 1)));
  WarpField field(rows, cols);
  for (int i = 1; i <= rows; ++i) {
    const int z = zero_column(i, z1, z2, rows);
    const auto kc = knot_columns(cols, z);
    const auto kv = knot_values(i, rows, wcp);
    std::array<Knot, 5> knots;
    for (int j = 0; j < 5; ++j) knots[j] = {static_cast<double>(kc[j]), kv[j]};
    SplineCurve curve(knots, lambda);
    for (int c = 0; c < cols; ++c) field.set(i - 1, c, curve.eval(c));
  }
  return field;
}

struct SampledParams {
  WarpPositionParams wpp;
  WarpControlParams wcp;
};

/// Draws parameters from the per-type grids. Positions come from the type's
/// admissible tenths; outer control magnitudes come from the
/// {0.04, 0.045, 0.05, 0.055, 0.06} x diagonal grid, rounded to whole
/// pixels, signed per type (I-III bow downward at the top, IV reverses).
/// Deterministic in (type, diagonal, seed).
inline SampledParams sample_params(WarpType type, double diagonal, std::uint64_t seed) {
  if (diagonal <= 0.0) throw std::invalid_argument("sample_params: diagonal must be > 0");
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<int>(type) + 1)));
  auto pick = [&rng](const std::vector<double>& xs) {
    return xs[static_cast<std::size_t>(rng() % xs.size())];
  };

  std::vector<double> positions;
  switch (type) {
    case WarpType::I: positions = {0.1, 0.2, 0.3}; break;
    case WarpType::II: positions = {0.7, 0.8, 0.9}; break;
    default: positions = {0.5}; break;
  }
  WarpPositionParams wpp{pick(positions), pick(positions)};

  const std::vector<double> ks = {0.040, 0.045, 0.050, 0.055, 0.060};
  auto magnitude = [&] {
    return std::round(pick(ks) * diagonal);
  };
  const double top_sign = (type == WarpType::IV) ? -1.0 : 1.0;
  WarpControlParams wcp = WarpControlParams::from_outer(
      top_sign * magnitude(), top_sign * magnitude(),
      -top_sign * magnitude(), -top_sign * magnitude());
  return {wpp, wcp};
}

/// CSV dump, one line per image row, full double precision.
inline void export_field(const WarpField& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.precision(17);
  for (int r = 0; r < field.rows(); ++r) {
    for (int c = 0; c < field.cols(); ++c) {
      if (c) out << ',';
      out << field.at(r, c);
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

inline WarpField import_field(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError(path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("import_field: ragged CSV");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("import_field: empty CSV");
  WarpField field(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int r = 0; r < field.rows(); ++r)
    for (int c = 0; c < field.cols(); ++c) field.set(r, c, rows[r][c]);
  return field;
}

}  // namespace docwarp
