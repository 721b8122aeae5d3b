#pragma once

// Cubic smoothing spline through a row's knots. Knot values are first
// shrunk by a Reinsch-style smoother (lambda = 0 keeps them exact;
// lambda -> infinity tends to the least-squares line), then evaluated
// with a shape-preserving cubic Hermite (Fritsch-Carlson slopes). The
// shape-preserving evaluant keeps the curve inside the range of its knot
// values on monotone runs, so a row's displacement never changes sign
// between the zero knot and the border knots. Evaluation outside the
// knot span throws.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace docwarp {

struct Knot {
  double column;
  double value;
};

class SplineCurve {
public:
  /// Knot values minimize sum (y_i - g_i)^2 + lambda * integral g''^2.
  SplineCurve(std::span<const Knot> knots, double lambda = 0.0) {
    const std::size_t n = knots.size();
    if (n < 3) throw std::invalid_argument("spline: need at least 3 knots");
    if (lambda < 0.0) throw std::invalid_argument("spline: lambda must be >= 0");
    x_.resize(n);
    y_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      x_[i] = knots[i].column;
      y_[i] = knots[i].value;
      if (i > 0 && x_[i] <= x_[i - 1])
        throw std::invalid_argument("spline: knot columns must be strictly increasing");
    }
    if (lambda > 0.0) smooth_values(lambda);
    compute_slopes();
  }

  double operator()(double col) const { return eval(col); }

  double eval(double col) const {
    if (col < x_.front() || col > x_.back())
      throw std::out_of_range("spline: evaluation outside knot span");
    std::size_t i = 0;
    while (i + 2 < x_.size() && col >= x_[i + 1]) ++i;
    const double h = x_[i + 1] - x_[i];
    const double t = (col - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * m_[i] +
           (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * m_[i + 1];
  }

  double first_column() const { return x_.front(); }
  double last_column() const { return x_.back(); }

private:
  // Reinsch: gamma = (R + lambda Q^T Q)^-1 Q^T y, fitted g = y - lambda Q gamma.
  // The (n-2) system is tiny for 5-knot rows, so a dense solve is fine.
  void smooth_values(double lambda) {
    const std::size_t n = x_.size();
    const std::size_t m = n - 2;
    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];
    auto q = [&](std::size_t row, std::size_t col) -> double {
      if (row == col) return 1.0 / h[col];
      if (row == col + 1) return -1.0 / h[col] - 1.0 / h[col + 1];
      if (row == col + 2) return 1.0 / h[col + 1];
      return 0.0;
    };
    std::vector<double> a(m * m, 0.0), b(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      a[i * m + i] = (h[i] + h[i + 1]) / 3.0;
      if (i + 1 < m) {
        a[i * m + i + 1] += h[i + 1] / 6.0;
        a[(i + 1) * m + i] += h[i + 1] / 6.0;
      }
      for (std::size_t r = 0; r < n; ++r) b[i] += q(r, i) * y_[r];
      for (std::size_t j = 0; j < m; ++j) {
        double dot = 0.0;
        const std::size_t lo = std::max(i, j);
        const std::size_t hi = std::min(i, j) + 2;
        for (std::size_t r = lo; r <= hi; ++r) dot += q(r, i) * q(r, j);
        a[i * m + j] += lambda * dot;
      }
    }
    const std::vector<double> gamma = solve_dense(std::move(a), std::move(b), m);
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += q(r, i) * gamma[i];
      y_[r] -= lambda * s;
    }
  }

  // Fritsch-Carlson monotone slopes; affine data reproduces exactly.
  void compute_slopes() {
    const std::size_t n = x_.size();
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      d[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    m_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (d[i - 1] * d[i] <= 0.0) {
        m_[i] = 0.0;
      } else {
        const double w1 = 2 * h[i] + h[i - 1];
        const double w2 = h[i] + 2 * h[i - 1];
        m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
      }
    }
    m_[0] = edge_slope(h[0], h[1], d[0], d[1]);
    m_[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  }

  static double edge_slope(double h0, double h1, double d0, double d1) {
    double m = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0) return 0.0;
    if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return m;
  }

  static std::vector<double> solve_dense(std::vector<double> a,
                                         std::vector<double> b, std::size_t m) {
    // Gaussian elimination with partial pivoting
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t piv = k;
      for (std::size_t r = k + 1; r < m; ++r)
        if (std::abs(a[r * m + k]) > std::abs(a[piv * m + k])) piv = r;
      if (piv != k) {
        for (std::size_t c = 0; c < m; ++c) std::swap(a[k * m + c], a[piv * m + c]);
        std::swap(b[k], b[piv]);
      }
      if (a[k * m + k] == 0.0)
        throw std::runtime_error("spline: singular smoothing system");
      for (std::size_t r = k + 1; r < m; ++r) {
        const double f = a[r * m + k] / a[k * m + k];
        for (std::size_t c = k; c < m; ++c) a[r * m + c] -= f * a[k * m + c];
        b[r] -= f * b[k];
      }
    }
    std::vector<double> x(m);
    for (std::size_t k = m; k-- > 0;) {
      double s = b[k];
      for (std::size_t c = k + 1; c < m; ++c) s -= a[k * m + c] * x[c];
      x[k] = s / a[k * m + k];
    }
    return x;
  }

  std::vector<double> x_;  // knot columns
  std::vector<double> y_;  // (smoothed) values at knots
  std::vector<double> m_;  // first derivatives at knots
};

inline SplineCurve fit_spline(std::span<const Knot> knots, double lambda = 0.0) {
  return SplineCurve(knots, lambda);
}

}  // namespace docwarp
