#include <catch2/catch_amalgamated.hpp>

#include "docwarp/geometry.hpp"

using namespace docwarp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("projection on the optical axis is the origin") {
  const auto P = project({0, 0, 80}, 35);
  CHECK(P.X == 0.0);
  CHECK(P.Y == 0.0);
}

TEST_CASE("projection evaluates f*x/z, f*y/z") {
  const auto P = project({10, 10, 100}, 50);
  CHECK_THAT(P.X, WithinAbs(5.0, 1e-12));
  CHECK_THAT(P.Y, WithinAbs(5.0, 1e-12));
}

TEST_CASE("projection rejects nonpositive depth and focal length") {
  CHECK_THROWS_AS(project({1, 1, 0}, 50), std::invalid_argument);
  CHECK_THROWS_AS(project({1, 1, -5}, 50), std::invalid_argument);
  CHECK_THROWS_AS(project({1, 1, 5}, 0), std::invalid_argument);
}

TEST_CASE("projection is invariant under uniform scaling of the scene") {
  const ScenePoint p{3, -7, 60};
  const auto a = project(p, 42);
  for (double s : {0.5, 2.0, 17.0}) {
    const auto b = project({p.x * s, p.y * s, p.z * s}, 42);
    CHECK_THAT(b.X, WithinAbs(a.X, 1e-12));
    CHECK_THAT(b.Y, WithinAbs(a.Y, 1e-12));
  }
}

TEST_CASE("exact displacement is zero on a flat surface and on the axis") {
  CHECK(displacement_exact(10, 50, 100, 100) == 0.0);
  CHECK(displacement_exact(0, 50, 100, 98) == 0.0);
}

TEST_CASE("exact displacement evaluates the depth-ratio formula") {
  CHECK_THAT(displacement_exact(10, 50, 100, 98),
             WithinAbs(50.0 * 10.0 * 2.0 / (98.0 * 100.0), 1e-12));
  CHECK_THROWS_AS(displacement_exact(10, 50, 0, 98), std::invalid_argument);
  CHECK_THROWS_AS(displacement_exact(10, 50, 100, -1), std::invalid_argument);
}

TEST_CASE("approximate displacement is Y1*d/D0") {
  CHECK(displacement_approx(5, 0, 100) == 0.0);
  CHECK_THAT(displacement_approx(5, 2, 100), WithinAbs(0.1, 1e-12));
  CHECK_THROWS_AS(displacement_approx(5, 2, 0), std::invalid_argument);
}

TEST_CASE("relative error of the approximation is exactly d/(D0-d)") {
  // exact/approx = D0/(D0-d), so |exact-approx|/approx = d/(D0-d)
  for (double d : {1.0, 2.0, 3.0})
    for (double d0 = 50; d0 <= 100; d0 += 10)
      for (double y1 = 1; y1 <= 10; ++y1) {
        const double f = 50;
        const double dx = d0 - d;
        const double exact = displacement_exact(y1, f, d0, dx);
        const double approx = displacement_approx(f * y1 / d0, d, d0);
        CHECK_THAT(std::abs(exact - approx) / approx,
                   WithinAbs(d / (d0 - d), 1e-12));
      }
}

TEST_CASE("approximation error stays below 6.4% over the stated ranges") {
  for (double d : {1.0, 2.0, 3.0})
    for (double d0 = 50; d0 <= 100; d0 += 10)
      CHECK(d / (d0 - d) <= 3.0 / (50.0 - 3.0) + 1e-12);
}
