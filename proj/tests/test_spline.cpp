#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <random>

#include "docwarp/spline.hpp"

using namespace docwarp;
using Catch::Matchers::WithinAbs;

namespace {

std::array<Knot, 5> worked_example_knots() {
  // top-row knot set from the worked D=2521 example
  return {{{0, 113}, {100, 56.5}, {200, 0}, {611, 50.5}, {1022, 101}}};
}

}  // namespace

TEST_CASE("zero knots give the zero curve") {
  const std::array<Knot, 5> knots{{{0, 0}, {10, 0}, {20, 0}, {30, 0}, {40, 0}}};
  const SplineCurve s(knots);
  for (double c = 0; c <= 40; c += 0.5) CHECK_THAT(s(c), WithinAbs(0.0, 1e-12));
}

TEST_CASE("lambda=0 interpolates every knot") {
  const auto knots = worked_example_knots();
  const SplineCurve s(knots);
  for (const auto& k : knots) CHECK_THAT(s(k.column), WithinAbs(k.value, 1e-9));
}

TEST_CASE("random knot sets are interpolated at lambda=0") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> val(-200, 200);
  for (int trial = 0; trial < 50; ++trial) {
    std::array<Knot, 5> knots;
    double col = 0;
    for (auto& k : knots) {
      k = {col, val(rng)};
      col += 1 + static_cast<double>(rng() % 300);
    }
    const SplineCurve s(knots);
    for (const auto& k : knots) CHECK_THAT(s(k.column), WithinAbs(k.value, 1e-9));
  }
}

TEST_CASE("affine data is reproduced everywhere") {
  std::array<Knot, 5> knots;
  const double cols[5] = {0, 25, 60, 80, 100};
  for (int i = 0; i < 5; ++i) knots[i] = {cols[i], 2 * cols[i] + 1};
  const SplineCurve s(knots);
  for (double c = 0; c <= 100; c += 0.25)
    CHECK_THAT(s(c), WithinAbs(2 * c + 1, 1e-9));
  CHECK_THAT(s(50), WithinAbs(101.0, 1e-9));
}

TEST_CASE("eval midway between equal adjacent knots of the zero spline is 0") {
  const std::array<Knot, 5> knots{{{0, 0}, {10, 0}, {20, 0}, {30, 0}, {40, 0}}};
  CHECK_THAT(SplineCurve(knots)(15), WithinAbs(0.0, 1e-12));
}

TEST_CASE("curve is C1 at interior knots") {
  const auto knots = worked_example_knots();
  const SplineCurve s(knots);
  const double h = 1e-5;
  for (int i = 1; i <= 3; ++i) {
    const double x = knots[i].column;
    const double left = (s(x) - s(x - h)) / h;
    const double right = (s(x + h) - s(x)) / h;
    CHECK_THAT(right, WithinAbs(left, 1e-6 * std::max(1.0, std::abs(left))));
  }
}

TEST_CASE("curve stays inside the knot value range on monotone runs") {
  // V-shaped rows (border magnitude falling to the zero knot and rising
  // again) must not overshoot past zero between knots
  const auto knots = worked_example_knots();
  const SplineCurve s(knots);
  for (double c = 0; c <= 200; c += 0.5) {
    CHECK(s(c) >= -1e-9);
    CHECK(s(c) <= 113 + 1e-9);
  }
  for (double c = 200; c <= 1022; c += 0.5) {
    CHECK(s(c) >= -1e-9);
    CHECK(s(c) <= 101 + 1e-9);
  }
}

TEST_CASE("large lambda tends to the least-squares line of the knots") {
  // compact spans so the roughness penalty dominates at lambda=1e9
  const std::array<Knot, 5> knots{{{0, 3}, {10, 1}, {20, 4}, {30, 1}, {40, 5}}};
  const SplineCurve s(knots, 1e9);

  // least-squares line through the 5 knots
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& k : knots) {
    sx += k.column;
    sy += k.value;
    sxx += k.column * k.column;
    sxy += k.column * k.value;
  }
  const double n = 5;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icept = (sy - slope * sx) / n;

  for (double c = 0; c <= 40; c += 2)
    CHECK_THAT(s(c), WithinAbs(slope * c + icept, 1e-3));
}

TEST_CASE("invalid knot sets and evaluations are rejected") {
  std::array<Knot, 5> dup{{{0, 1}, {10, 2}, {10, 3}, {30, 4}, {40, 5}}};
  CHECK_THROWS_AS(SplineCurve(dup), std::invalid_argument);
  std::array<Knot, 5> dec{{{0, 1}, {10, 2}, {5, 3}, {30, 4}, {40, 5}}};
  CHECK_THROWS_AS(SplineCurve(dec), std::invalid_argument);

  const SplineCurve s(worked_example_knots());
  CHECK_THROWS_AS(s(-1), std::out_of_range);
  CHECK_THROWS_AS(s(1023), std::out_of_range);
}
