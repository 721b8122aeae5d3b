#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "docwarp/warper.hpp"
#include "test_util.hpp"

using namespace docwarp;
using Catch::Matchers::WithinAbs;

namespace {

WarpField constant_field(int rows, int cols, double value) {
  WarpField f(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) f.set(r, c, value);
  return f;
}

}  // namespace

TEST_CASE("zero field is the identity in both modes") {
  const BinaryImage img = testutil::ruled_page(40, 60, 3);
  for (auto mode : {MapMode::forward, MapMode::backward}) {
    const auto [out, offset] = warp_image(img, WarpField(40, 60), mode);
    CHECK(offset == 0);
    CHECK(out == img);
  }
}

TEST_CASE("constant +5 field shifts content down on a 5-row-taller canvas") {
  const BinaryImage img = testutil::ruled_page(40, 60, 3);
  const auto [out, offset] = warp_image(img, constant_field(40, 60, 5.0));
  CHECK(offset == 0);
  REQUIRE(out.rows() == 45);
  for (int r = 0; r < 40; ++r)
    for (int c = 0; c < 60; ++c) CHECK(out.foreground(r + 5, c) == img.foreground(r, c));
}

TEST_CASE("constant -3 field grows the canvas upward, content stays put") {
  const BinaryImage img = testutil::ruled_page(40, 60, 3);
  const auto [out, offset] = warp_image(img, constant_field(40, 60, -3.0));
  CHECK(offset == 3);
  REQUIRE(out.rows() == 43);
  // dst = r + F + offset = r, so content sits at its original rows
  for (int r = 0; r < 40; ++r)
    for (int c = 0; c < 60; ++c) CHECK(out.foreground(r, c) == img.foreground(r, c));
}

TEST_CASE("dimension mismatch is rejected") {
  const BinaryImage img(10, 10);
  CHECK_THROWS_AS(warp_image(img, WarpField(10, 11)), std::invalid_argument);
}

TEST_CASE("warp_polyline follows the field plus canvas offset") {
  const Polyline line{{5, 10}, {20, 10}, {35, 10}};
  SECTION("zero field is the identity") {
    const auto out = warp_polyline(line, WarpField(40, 60));
    for (std::size_t i = 0; i < line.size(); ++i) {
      CHECK(out[i].column == line[i].column);
      CHECK(out[i].row == line[i].row);
    }
  }
  SECTION("constant +5 adds 5 to every row") {
    const auto out = warp_polyline(line, constant_field(40, 60, 5.0));
    for (const auto& p : out) CHECK_THAT(p.row, WithinAbs(15.0, 1e-12));
  }
  SECTION("out-of-range samples throw") {
    CHECK_THROWS_AS(warp_polyline({{100, 10}}, WarpField(40, 60)),
                    std::out_of_range);
  }
}

TEST_CASE("generate is deterministic and records a complete manifest") {
  const BinaryImage img = testutil::ruled_page(120, 160, 5);
  const auto a = generate(img, WarpType::I, 7, 0.0, MapMode::backward, "page.pbm");
  const auto b = generate(img, WarpType::I, 7, 0.0, MapMode::backward, "page.pbm");
  CHECK(a.image == b.image);
  CHECK(to_json(a.manifest) == to_json(b.manifest));

  CHECK(a.manifest.p3 > 0);   // Type I: positive top edge
  CHECK(a.manifest.p7 < 0);   // negative bottom edge
  CHECK(a.manifest.out_rows == a.image.rows());
  CHECK(a.manifest.out_cols == a.image.cols());
  CHECK(a.manifest.version == kToolVersion);

  // manifest JSON round trip
  const auto back = manifest_from_json(to_json(a.manifest));
  CHECK(to_json(back) == to_json(a.manifest));
}

TEST_CASE("blank input stays blank on the expanded canvas") {
  const BinaryImage blank(100, 150);
  const auto res = generate(blank, WarpType::III, 3);
  CHECK(res.image.foreground_count() == 0);
  CHECK(res.image.rows() >= 100);
}

TEST_CASE("backward warping preserves foreground count within 5%") {
  // Rows lost to vertical compression scale with the control magnitudes:
  // ~4% of ink at 0.04*D on a portrait page, ~6.5% at 0.06*D. The 5%
  // bound therefore holds at the low end of the magnitude grid only.
  const int R = 2200, W = 1700;
  const BinaryImage img = testutil::ruled_page(R, W, 10);
  const double m = std::round(0.04 * std::hypot(R, W));
  for (auto [p1, p2] : {std::pair{0.1, 0.3}, {0.2, 0.2}, {0.3, 0.1}}) {
    const WarpField f = build_field(
        R, W, {p1, p2}, WarpControlParams::from_outer(m, m, -m, -m));
    const auto [out, offset] = warp_image(img, f);
    const double ratio = static_cast<double>(out.foreground_count()) /
                         img.foreground_count();
    CHECK(ratio > 0.95);
    CHECK(ratio < 1.05);
  }
}

TEST_CASE("warping is strictly vertical: inked column set is preserved") {
  const BinaryImage img = testutil::ruled_page(300, 400, 6);
  const auto res = generate(img, WarpType::II, 11);
  auto inked_columns = [](const BinaryImage& im) {
    std::set<int> cols;
    for (int c = 0; c < im.cols(); ++c)
      for (int r = 0; r < im.rows(); ++r)
        if (im.foreground(r, c)) {
          cols.insert(c);
          break;
        }
    return cols;
  };
  CHECK(inked_columns(img) == inked_columns(res.image));
}

TEST_CASE("pixels on the zero line keep their row up to rounding") {
  const int R = 300, W = 400;
  BinaryImage img(R, W);
  const WarpPositionParams wpp{0.3, 0.6};
  const auto wcp = WarpControlParams::from_outer(20, 18, -22, -19);
  const int z1 = static_cast<int>(std::lround(wpp.p1 * (W - 1)));
  const int z2 = static_cast<int>(std::lround(wpp.p2 * (W - 1)));
  for (int i = 1; i <= R; ++i) img.set(i - 1, zero_column(i, z1, z2, R), true);

  const WarpField f = build_field(R, W, wpp, wcp);
  const auto [out, offset] = warp_image(img, f);
  int moved = 0, total = 0;
  for (int i = 1; i <= R; ++i) {
    const int c = zero_column(i, z1, z2, R);
    ++total;
    bool near = false;
    for (int dr = -1; dr <= 1; ++dr) {
      const int r = i - 1 + offset + dr;
      if (r >= 0 && r < out.rows() && out.foreground(r, c)) near = true;
    }
    if (!near) ++moved;
  }
  CHECK(moved == 0);
  CHECK(total == R);
}

TEST_CASE("warping with F then -F approximately inverts (IoU >= 0.85)") {
  const BinaryImage img = testutil::ruled_page(600, 800, 10, 8);
  const double diag = std::hypot(600.0, 800.0);
  const auto [wpp, wcp] = sample_params(WarpType::I, diag, 5);
  const WarpField f = build_field(600, 800, wpp, wcp);
  const auto fwd = warp_image(img, f);
  const WarpField back_field =
      testutil::inverse_field_on_canvas(f, fwd.image.rows(), fwd.offset);
  // restrict comparison to the original frame within the round-trip canvas
  const auto rt = warp_image(fwd.image, back_field);
  BinaryImage recovered(600, 800);
  for (int r = 0; r < 600; ++r)
    for (int c = 0; c < 800; ++c) {
      const int rr = r + fwd.offset + rt.offset;
      if (rr < rt.image.rows() && rt.image.foreground(rr, c))
        recovered.set(r, c, true);
    }
  CHECK(testutil::foreground_iou(img, recovered) >= 0.85);
}
