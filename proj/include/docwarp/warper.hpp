#pragma once

// Applies a WarpField to an image or an analytic polyline. The canvas grows
// so no ink is clipped; `offset` is the number of rows prepended above the
// source frame and is recorded in the manifest because evaluation needs it
// to align canvases.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "docwarp/image.hpp"
#include "docwarp/warpfield.hpp"

namespace docwarp {

inline constexpr const char* kToolVersion = "0.1.0";

enum class MapMode { forward, backward };

inline std::string to_string(MapMode m) {
  return m == MapMode::forward ? "forward" : "backward";
}

inline MapMode map_mode_from_string(const std::string& s) {
  if (s == "forward") return MapMode::forward;
  if (s == "backward") return MapMode::backward;
  throw std::invalid_argument("mode must be 'forward' or 'backward'");
}

struct PolyPoint {
  double column;
  double row;
};

using Polyline = std::vector<PolyPoint>;

struct WarpedImage {
  BinaryImage image;
  int offset;  // rows prepended above the source frame
};

namespace detail {

struct CanvasShape {
  int out_rows;
  int offset;
};

inline CanvasShape canvas_shape(int src_rows, const WarpField& field) {
  const double lo = std::min(field.min_value(), 0.0);
  const double hi = std::max(field.max_value(), 0.0);
  const int grow_down = static_cast<int>(std::ceil(hi));
  const int grow_up = -static_cast<int>(std::floor(lo));
  return {src_rows + grow_down + grow_up, grow_up};
}

}  // namespace detail

inline WarpedImage warp_image(const BinaryImage& img, const WarpField& field,
                              MapMode mode = MapMode::backward) {
  if (img.rows() != field.rows() || img.cols() != field.cols())
    throw std::invalid_argument("warp_image: field dimensions must match image");
  const auto [out_rows, offset] = detail::canvas_shape(img.rows(), field);
  BinaryImage out(out_rows, img.cols());

  if (mode == MapMode::forward) {
    for (int r = 0; r < img.rows(); ++r)
      for (int c = 0; c < img.cols(); ++c) {
        if (!img.foreground(r, c)) continue;
        const int rd = static_cast<int>(std::lround(r + field.at(r, c))) + offset;
        if (rd >= 0 && rd < out_rows) out.set(rd, c, true);
      }
    return {out, offset};
  }

  auto clamp_row = [&](double r) {
    const int ri = static_cast<int>(std::lround(r));
    return std::min(std::max(ri, 0), img.rows() - 1);
  };
  for (int rd = 0; rd < out_rows; ++rd) {
    const double r0 = rd - offset;
    for (int c = 0; c < img.cols(); ++c) {
      // destination-driven: solve rs = r0 - F(rs, c) by fixed-point
      // iteration (a contraction while |dF/dr| < 1); a single refinement
      // leaves position errors of up to a few pixels at steep borders
      double rs = r0 - field.at(clamp_row(r0), c);
      for (int it = 0; it < 8; ++it) {
        const double next = r0 - field.at(clamp_row(rs), c);
        const bool done = std::abs(next - rs) < 0.05;
        rs = next;
        if (done) break;
      }
      const int rsi = static_cast<int>(std::lround(rs));
      if (rsi >= 0 && rsi < img.rows() && img.foreground(rsi, c))
        out.set(rd, c, true);
    }
  }
  return {out, offset};
}

/// Predicts where analytic samples land after warping; rows are in output
/// canvas coordinates (offset included).
inline Polyline warp_polyline(const Polyline& line, const WarpField& field) {
  Polyline out;
  out.reserve(line.size());
  const int offset = detail::canvas_shape(field.rows(), field).offset;
  for (const auto& p : line) {
    const int c = static_cast<int>(std::lround(p.column));
    const int r = static_cast<int>(std::lround(p.row));
    if (c < 0 || c >= field.cols() || r < 0 || r >= field.rows())
      throw std::out_of_range("warp_polyline: sample outside field");
    out.push_back({p.column, p.row + field.at(r, c) + offset});
  }
  return out;
}

struct WarpManifest {
  std::string source;
  WarpType type = WarpType::I;
  double p1 = 0, p2 = 0, p3 = 0, p4 = 0, p5 = 0;
  double p6 = 0, p7 = 0, p8 = 0, p9 = 0, p10 = 0;
  double lambda = 0;
  std::uint64_t seed = 0;
  MapMode mode = MapMode::backward;
  int offset = 0;
  int out_rows = 0;
  int out_cols = 0;
  std::string version = kToolVersion;
};

inline nlohmann::ordered_json to_json(const WarpManifest& m) {
  return nlohmann::ordered_json{
      {"source", m.source},   {"type", to_string(m.type)},
      {"p1", m.p1},           {"p2", m.p2},
      {"p3", m.p3},           {"p4", m.p4},
      {"p5", m.p5},           {"p6", m.p6},
      {"p7", m.p7},           {"p8", m.p8},
      {"p9", m.p9},           {"p10", m.p10},
      {"lambda", m.lambda},   {"seed", m.seed},
      {"mode", to_string(m.mode)}, {"offset", m.offset},
      {"out_rows", m.out_rows},    {"out_cols", m.out_cols},
      {"version", m.version},
  };
}

inline WarpManifest manifest_from_json(const nlohmann::json& j) {
  WarpManifest m;
  m.source = j.at("source").get<std::string>();
  m.type = warp_type_from_string(j.at("type").get<std::string>());
  m.p1 = j.at("p1");  m.p2 = j.at("p2");
  m.p3 = j.at("p3");  m.p4 = j.at("p4");
  m.p5 = j.at("p5");  m.p6 = j.at("p6");
  m.p7 = j.at("p7");  m.p8 = j.at("p8");
  m.p9 = j.at("p9");  m.p10 = j.at("p10");
  m.lambda = j.at("lambda");
  m.seed = j.at("seed");
  m.mode = map_mode_from_string(j.at("mode").get<std::string>());
  m.offset = j.at("offset");
  m.out_rows = j.at("out_rows");
  m.out_cols = j.at("out_cols");
  m.version = j.at("version").get<std::string>();
  return m;
}

struct GenerateResult {
  BinaryImage image;
  WarpManifest manifest;
};

/// sample_params -> build_field -> warp_image, with a manifest sufficient
/// to regenerate the output from the source bit-exactly.
inline GenerateResult generate(const BinaryImage& img, WarpType type,
                               std::uint64_t seed, double lambda = 0.0,
                               MapMode mode = MapMode::backward,
                               const std::string& source_name = "") {
  const double diagonal = std::hypot(img.rows(), img.cols());
  const auto [wpp, wcp] = sample_params(type, diagonal, seed);
  const WarpField field = build_field(img.rows(), img.cols(), wpp, wcp, lambda);
  auto [warped, offset] = warp_image(img, field, mode);

  WarpManifest m;
  m.source = source_name;
  m.type = type;
  m.p1 = wpp.p1;  m.p2 = wpp.p2;
  m.p3 = wcp.p3;  m.p4 = wcp.p4;  m.p5 = wcp.p5;  m.p6 = wcp.p6;
  m.p7 = wcp.p7;  m.p8 = wcp.p8;  m.p9 = wcp.p9;  m.p10 = wcp.p10;
  m.lambda = lambda;
  m.seed = seed;
  m.mode = mode;
  m.offset = offset;
  m.out_rows = warped.rows();
  m.out_cols = warped.cols();
  return {std::move(warped), std::move(m)};
}

}  // namespace docwarp
