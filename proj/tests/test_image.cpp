#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "docwarp/image.hpp"

using namespace docwarp;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
  return p;
}

}  // namespace

TEST_CASE("P1 ASCII bitmap decodes with 1 = foreground") {
  const auto p = write_temp("docwarp_p1.pbm", "P1 2 2 1 0 0 1");
  const auto img = std::get<BinaryImage>(load_image(p));
  REQUIRE(img.rows() == 2);
  REQUIRE(img.cols() == 2);
  CHECK(img.foreground(0, 0));
  CHECK_FALSE(img.foreground(0, 1));
  CHECK_FALSE(img.foreground(1, 0));
  CHECK(img.foreground(1, 1));
}

TEST_CASE("P2 all-zero image loads as all-black GrayImage") {
  std::string content = "P2 3 2 255\n";
  for (int i = 0; i < 6; ++i) content += "0 ";
  const auto p = write_temp("docwarp_p2.pgm", content);
  const auto img = std::get<GrayImage>(load_image(p));
  REQUIRE(img.rows() == 2);
  REQUIRE(img.cols() == 3);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) CHECK(img.at(r, c) == 0);
}

TEST_CASE("truncated payload is a distinct error") {
  std::string content = "P1 10 10\n";
  for (int i = 0; i < 50; ++i) content += "1 ";
  const auto p = write_temp("docwarp_trunc.pbm", content);
  CHECK_THROWS_AS(load_image(p), TruncatedPayloadError);
}

TEST_CASE("missing file and malformed header are distinct errors") {
  CHECK_THROWS_AS(load_image("/nonexistent/docwarp.pbm"), FileNotFoundError);
  const auto p = write_temp("docwarp_bad.pbm", "P9 2 2\n");
  CHECK_THROWS_AS(load_image(p), MalformedHeaderError);
  const auto q = write_temp("docwarp_bad2.pbm", "P1 0 0\n");
  CHECK_THROWS_AS(load_image(q), MalformedHeaderError);
}

TEST_CASE("threshold maps below-t to ink") {
  GrayImage g(2, 2, 0);
  CHECK(threshold(g, 128).foreground_count() == 4);
  GrayImage w(2, 2, 255);
  CHECK(threshold(w, 128).foreground_count() == 0);
  GrayImage mixed(1, 2);
  mixed.set(0, 0, 100);
  mixed.set(0, 1, 200);
  const auto b = threshold(mixed, 150);
  CHECK(b.foreground(0, 0));
  CHECK_FALSE(b.foreground(0, 1));
}

TEST_CASE("P4 round trip is the identity on random images") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 40);
    const int cols = 1 + static_cast<int>(rng() % 40);
    BinaryImage img(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) img.set(r, c, rng() % 2);
    const fs::path p = fs::temp_directory_path() / "docwarp_rt.pbm";
    save_image(img, p);
    const auto back = std::get<BinaryImage>(load_image(p));
    REQUIRE(back == img);
  }
}

TEST_CASE("1x1 foreground survives a round trip") {
  BinaryImage img(1, 1, true);
  const fs::path p = fs::temp_directory_path() / "docwarp_1x1.pbm";
  save_image(img, p);
  CHECK(std::get<BinaryImage>(load_image(p)) == img);
}

TEST_CASE("saving to an unwritable directory fails with IoError") {
  BinaryImage img(2, 2);
  CHECK_THROWS_AS(save_image(img, "/nonexistent_dir/out.pbm"), IoError);
}
