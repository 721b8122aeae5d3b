#pragma once

// Similarity evaluation: headline curvature RMSE between real and synthetic
// warps, and the pixel-wise binarization metrics (precision, recall,
// F-measure, PSNR, DRD).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "docwarp/image.hpp"
#include "docwarp/warper.hpp"

namespace docwarp {

struct LineBand {
  int top;    // first row of the band
  int bottom; // last row, inclusive
  int left;   // leftmost foreground column
  int right;  // rightmost foreground column, inclusive

  int length() const { return right - left; }
};

/// Projection-profile segmentation: maximal runs of rows whose ink count
/// exceeds tau * cols. Adequate for mildly warped and flat pages.
inline std::vector<LineBand> segment_lines(const BinaryImage& img, double tau = 0.02) {
  const double min_ink = tau * img.cols();
  std::vector<LineBand> bands;
  int start = -1;
  for (int r = 0; r <= img.rows(); ++r) {
    int count = 0;
    if (r < img.rows())
      for (int c = 0; c < img.cols(); ++c) count += img.foreground(r, c);
    const bool inked = r < img.rows() && count > min_ink;
    if (inked && start < 0) start = r;
    if (!inked && start >= 0) {
      LineBand band{start, r - 1, img.cols(), 0};
      for (int rr = band.top; rr <= band.bottom; ++rr)
        for (int c = 0; c < img.cols(); ++c)
          if (img.foreground(rr, c)) {
            band.left = std::min(band.left, c);
            band.right = std::max(band.right, c);
          }
      bands.push_back(band);
      start = -1;
    }
  }
  return bands;
}

namespace detail {

inline std::vector<double> median_filter(const std::vector<double>& xs, int window) {
  if (xs.size() < 3 || window < 3) return xs;
  const int n = static_cast<int>(xs.size());
  std::vector<double> out(xs.size());
  std::vector<double> buf;
  for (int i = 0; i < n; ++i) {
    // symmetric window, shrinking near the edges; a truncated one-sided
    // window would drag endpoint values uphill on steep line segments
    const int half = std::min({window / 2, i, n - 1 - i});
    buf.clear();
    for (int j = i - half; j <= i + half; ++j)
      buf.push_back(xs[j]);
    std::nth_element(buf.begin(), buf.begin() + buf.size() / 2, buf.end());
    out[i] = buf[buf.size() / 2];
  }
  return out;
}

}  // namespace detail

/// Top envelope of a line band, median-smoothed; columns without ink are
/// skipped. Stand-in for dedicated headline/matra detection.
inline Polyline extract_headline(const BinaryImage& img, const LineBand& band,
                                 int smooth_window = 15) {
  if (band.top < 0 || band.bottom >= img.rows() || band.left < 0 ||
      band.right >= img.cols() || band.top > band.bottom || band.left > band.right)
    throw std::invalid_argument("extract_headline: band outside image");
  std::vector<double> cols, rows;
  for (int c = band.left; c <= band.right; ++c)
    for (int r = band.top; r <= band.bottom; ++r)
      if (img.foreground(r, c)) {
        cols.push_back(c);
        rows.push_back(r);
        break;
      }
  if (cols.empty())
    throw std::invalid_argument("extract_headline: band contains no foreground");
  rows = detail::median_filter(rows, smooth_window);
  Polyline line;
  line.reserve(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) line.push_back({cols[i], rows[i]});
  return line;
}

/// Two lines from the top and two from the bottom, among bands longer than
/// 80% of the longest.
inline std::vector<LineBand> select_lines(const std::vector<LineBand>& bands) {
  int max_len = 0;
  for (const auto& b : bands) max_len = std::max(max_len, b.length());
  std::vector<LineBand> qualifying;
  for (const auto& b : bands)
    if (b.length() > 0.8 * max_len) qualifying.push_back(b);
  if (qualifying.size() < 4)
    throw std::invalid_argument("select_lines: fewer than 4 qualifying text lines");
  return {qualifying[0], qualifying[1], qualifying[qualifying.size() - 2],
          qualifying[qualifying.size() - 1]};
}

namespace detail {

/// Interior point for the three-point curvature: first column where the
/// smoothed finite-difference slope changes sign (dead band suppresses
/// rounding jitter); midpoint when the headline is monotone.
inline std::size_t slope_turn_index(const Polyline& line, double dead_band = 0.05) {
  // central differences over a wide stride: with integer-quantized rows a
  // single-step difference is 0 or +-1 and gentle slopes vanish under the
  // median, so the stride keeps the slope quantum at ~0.05 px/col
  const int n = static_cast<int>(line.size());
  std::vector<double> slopes(n);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - 10), hi = std::min(n - 1, i + 10);
    const double dc = line[hi].column - line[lo].column;
    slopes[i] = dc > 0 ? (line[hi].row - line[lo].row) / dc : 0.0;
  }
  slopes = median_filter(slopes, 5);
  int prev_sign = 0;
  for (int i = 0; i < n; ++i) {
    int sign = 0;
    if (slopes[i] > dead_band) sign = 1;
    else if (slopes[i] < -dead_band) sign = -1;
    if (sign != 0 && prev_sign != 0 && sign != prev_sign) {
      // snap to the vertex: the smoothed slope only clears the dead band
      // some way past it on flat curves. With pixel-quantized rows the
      // extremum is a plateau, so take the center of the contiguous
      // near-extremal region rather than one arbitrary tied sample
      int best = i;
      for (int j = std::max(0, i - 40); j <= std::min(n - 1, i + 40); ++j)
        if ((prev_sign > 0 && line[j].row > line[best].row) ||
            (prev_sign < 0 && line[j].row < line[best].row))
          best = j;
      int lo = best, hi = best;
      while (lo > 0 && std::abs(line[lo - 1].row - line[best].row) <= 0.5) --lo;
      while (hi < n - 1 && std::abs(line[hi + 1].row - line[best].row) <= 0.5) ++hi;
      return static_cast<std::size_t>((lo + hi) / 2);
    }
    if (sign != 0) prev_sign = sign;
  }
  return line.size() / 2;
}

}  // namespace detail

/// Curvature of the circumcircle through three points, signed by turn
/// orientation (positive for counterclockwise A->B->C in column/row axes).
inline double circumcircle_curvature(const PolyPoint& a, const PolyPoint& b,
                                     const PolyPoint& c) {
  const double abx = b.column - a.column, aby = b.row - a.row;
  const double acx = c.column - a.column, acy = c.row - a.row;
  const double cross = abx * acy - aby * acx;  // 2 * signed area
  const double ab = std::hypot(abx, aby);
  const double bc = std::hypot(c.column - b.column, c.row - b.row);
  const double ca = std::hypot(acx, acy);
  if (ab == 0.0 || bc == 0.0 || ca == 0.0)
    throw std::invalid_argument("curvature: coincident points");
  return 2.0 * cross / (ab * bc * ca);
}

/// Three-point curvature of a headline: its endpoints plus the point where
/// the slope changes sign.
inline double curvature(const Polyline& line) {
  if (line.size() < 3)
    throw std::invalid_argument("curvature: need at least 3 samples");
  const std::size_t mid = detail::slope_turn_index(line);
  const std::size_t b = std::min(std::max<std::size_t>(mid, 1), line.size() - 2);
  return circumcircle_curvature(line.front(), line[b], line.back());
}

inline double curvature_rmse(const std::vector<double>& real_curves,
                             const std::vector<double>& synth_curves) {
  if (real_curves.empty())
    throw std::invalid_argument("curvature_rmse: empty input");
  if (real_curves.size() != synth_curves.size())
    throw std::invalid_argument("curvature_rmse: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < real_curves.size(); ++i) {
    const double d = real_curves[i] - synth_curves[i];
    acc += d * d;
  }
  return std::sqrt(acc / real_curves.size());
}

struct CurvatureReport {
  std::vector<double> real_curvatures;
  std::vector<double> synth_curvatures;
  double rmse = 0.0;
};

inline nlohmann::ordered_json to_json(const CurvatureReport& r) {
  return nlohmann::ordered_json{
      {"real_curvatures", r.real_curvatures},
      {"synth_curvatures", r.synth_curvatures},
      {"n_lines", r.real_curvatures.size()},
      {"rmse", r.rmse},
  };
}

/// Curvatures of the four selected headlines of an image, signed.
inline std::vector<double> image_curvatures(const BinaryImage& img) {
  const auto selected = select_lines(segment_lines(img));
  std::vector<double> curves;
  curves.reserve(selected.size());
  for (const auto& band : selected)
    curves.push_back(curvature(extract_headline(img, band)));
  return curves;
}

inline CurvatureReport curvature_report(const BinaryImage& real,
                                        const BinaryImage& synth) {
  CurvatureReport rep;
  rep.real_curvatures = image_curvatures(real);
  rep.synth_curvatures = image_curvatures(synth);
  std::vector<double> ra = rep.real_curvatures, sa = rep.synth_curvatures;
  for (auto& v : ra) v = std::abs(v);
  for (auto& v : sa) v = std::abs(v);
  rep.rmse = curvature_rmse(ra, sa);
  return rep;
}

// ---- pixel-wise binarization metrics ----

inline void require_same_size(const BinaryImage& a, const BinaryImage& b,
                              const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(op) + ": image dimensions differ");
}

inline std::pair<double, double> precision_recall(const BinaryImage& gt,
                                                  const BinaryImage& res) {
  require_same_size(gt, res, "precision_recall");
  long tp = 0, fp = 0, fn = 0;
  for (int r = 0; r < gt.rows(); ++r)
    for (int c = 0; c < gt.cols(); ++c) {
      const bool g = gt.foreground(r, c), s = res.foreground(r, c);
      tp += g && s;
      fp += !g && s;
      fn += g && !s;
    }
  const double precision = (tp + fp) ? static_cast<double>(tp) / (tp + fp) : 1.0;
  const double recall = (tp + fn) ? static_cast<double>(tp) / (tp + fn) : 1.0;
  return {precision, recall};
}

inline double f_measure(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

/// Binary PSNR with C = 1; identical images give +infinity.
inline double psnr(const BinaryImage& gt, const BinaryImage& res) {
  require_same_size(gt, res, "psnr");
  long diff = 0;
  for (int r = 0; r < gt.rows(); ++r)
    for (int c = 0; c < gt.cols(); ++c)
      diff += gt.foreground(r, c) != res.foreground(r, c);
  if (diff == 0) return std::numeric_limits<double>::infinity();
  const double mse =
      static_cast<double>(diff) / (static_cast<double>(gt.rows()) * gt.cols());
  return 10.0 * std::log10(1.0 / mse);
}

/// 5x5 normalized reciprocal-distance weights; center 0, sum 1. Symmetric
/// under rotation and reflection.
inline std::array<std::array<double, 5>, 5> drd_weights() {
  std::array<std::array<double, 5>, 5> w{};
  double sum = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      if (i == 2 && j == 2) continue;
      w[i][j] = 1.0 / std::hypot(i - 2.0, j - 2.0);
      sum += w[i][j];
    }
  for (auto& row : w)
    for (auto& v : row) v /= sum;
  return w;
}

/// Non-uniform 8x8 blocks of the ground truth (partial border blocks count).
inline long nubn(const BinaryImage& gt) {
  long n = 0;
  for (int br = 0; br < gt.rows(); br += 8)
    for (int bc = 0; bc < gt.cols(); bc += 8) {
      bool any_fg = false, any_bg = false;
      for (int r = br; r < std::min(br + 8, gt.rows()); ++r)
        for (int c = bc; c < std::min(bc + 8, gt.cols()); ++c)
          (gt.foreground(r, c) ? any_fg : any_bg) = true;
      n += any_fg && any_bg;
    }
  return n;
}

/// Distance reciprocal distortion. Out-of-image ground-truth neighbors are
/// background.
inline double drd(const BinaryImage& gt, const BinaryImage& res) {
  require_same_size(gt, res, "drd");
  static const auto weights = drd_weights();
  double total = 0.0;
  long flipped = 0;
  for (int r = 0; r < gt.rows(); ++r)
    for (int c = 0; c < gt.cols(); ++c) {
      if (gt.foreground(r, c) == res.foreground(r, c)) continue;
      ++flipped;
      const double rv = res.foreground(r, c) ? 1.0 : 0.0;
      for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j) {
          const int nr = r + i, nc = c + j;
          const double gv =
              gt.in_bounds(nr, nc) && gt.foreground(nr, nc) ? 1.0 : 0.0;
          total += std::abs(gv - rv) * weights[i + 2][j + 2];
        }
    }
  if (flipped == 0) return 0.0;
  const long blocks = nubn(gt);
  if (blocks == 0)
    throw std::domain_error("drd: uniform ground truth, NUBN denominator is zero");
  return total / blocks;
}

struct MetricReport {
  double precision = 1.0;
  double recall = 1.0;
  double f_measure = 1.0;
  double psnr = std::numeric_limits<double>::infinity();
  double drd = 0.0;

  bool psnr_infinite() const { return std::isinf(psnr); }
};

inline MetricReport evaluate_pair(const BinaryImage& gt, const BinaryImage& res) {
  require_same_size(gt, res, "evaluate_pair");
  MetricReport rep;
  std::tie(rep.precision, rep.recall) = precision_recall(gt, res);
  rep.f_measure = f_measure(rep.precision, rep.recall);
  rep.psnr = psnr(gt, res);
  rep.drd = drd(gt, res);
  return rep;
}

inline nlohmann::ordered_json to_json(const MetricReport& r) {
  nlohmann::ordered_json j{
      {"precision", r.precision},
      {"recall", r.recall},
      {"f_measure", r.f_measure},
      {"psnr", nullptr},
      {"psnr_infinite", r.psnr_infinite()},
      {"drd", r.drd},
  };
  if (!r.psnr_infinite()) j["psnr"] = r.psnr;
  return j;
}

}  // namespace docwarp
