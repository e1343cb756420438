#include <cstring>
#include <sstream>

#include "doctest.h"
#include "wrinkle/gridio.hpp"
#include "wrinkle/rng.hpp"

using namespace wrinkle;

namespace {

std::string le_floats(std::initializer_list<float> values) {
  std::string out;
  for (float f : values) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xFF));
  }
  return out;
}

}  // namespace

TEST_CASE("fgrid round trip of a 3x3 zero grid is bit-identical") {
  const FloatGrid g(3, 3, 0.002);
  std::stringstream buf;
  write_grid(g, buf);
  CHECK(read_grid(buf) == g);
}

TEST_CASE("fgrid round trip keeps arbitrary values, origin and cell size") {
  FloatGrid g(7, 5, 0.0016, {-0.25, 0.125});
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = static_cast<float>(keyed_normal(3, 0, i) * 0.01);
  }
  std::stringstream buf;
  write_grid(g, buf);
  const FloatGrid back = read_grid(buf);
  CHECK(back == g);
  CHECK(back.origin() == Vec2{-0.25, 0.125});
}

TEST_CASE("fgrid header with the depth stream resolution") {
  std::string payload(640 * 480 * 4, '\0');
  std::stringstream buf("FGRID 640 480 0.0016\n" + payload);
  const FloatGrid g = read_grid(buf);
  CHECK(g.width() == 640);
  CHECK(g.height() == 480);
  CHECK(g.cell_size() == doctest::Approx(0.0016));
}

TEST_CASE("fgrid payload is little-endian f32, row-major from the top row") {
  std::stringstream buf("FGRID 3 3 1\n" + le_floats({1, 2, 3, 4, 5, 6, 7, 8, 9.5f}));
  const FloatGrid g = read_grid(buf);
  CHECK(g(1, 0) == 2.0f);
  CHECK(g(0, 1) == 4.0f);
  CHECK(g(2, 2) == 9.5f);
}

TEST_CASE("fgrid payload length must match the header") {
  std::stringstream short_buf("FGRID 3 3 0.002\n" + le_floats({0, 0, 0, 0, 0, 0, 0, 0}));
  CHECK_THROWS_AS(read_grid(short_buf), FormatError);
  std::stringstream long_buf("FGRID 3 3 0.002\n" + le_floats({0, 0, 0, 0, 0, 0, 0, 0, 0, 0}));
  CHECK_THROWS_AS(read_grid(long_buf), FormatError);
}

TEST_CASE("fgrid rejects malformed headers and non-finite values") {
  for (const char* header : {"FGRD 3 3 0.002\n", "FGRID 3 0.002\n", "FGRID 2 3 0.002\n",
                             "FGRID 3 3 -1\n", "FGRID 3 3 abc\n", ""}) {
    std::stringstream buf(std::string(header) + std::string(36, '\0'));
    CHECK_THROWS_AS(read_grid(buf), FormatError);
  }
  std::stringstream nan_buf("FGRID 3 3 1\n" +
                            le_floats({0, 0, 0, 0, std::numeric_limits<float>::quiet_NaN(), 0, 0, 0, 0}));
  CHECK_THROWS_AS(read_grid(nan_buf), FormatError);
}

TEST_CASE("pgm maps samples linearly onto [0, 1]") {
  std::string raw = "P5\n3 3\n65535\n";
  for (int i = 0; i < 9; ++i) {
    const int s = i == 0 ? 65535 : 0;
    raw.push_back(static_cast<char>(s >> 8));
    raw.push_back(static_cast<char>(s & 0xFF));
  }
  std::stringstream buf(raw);
  const GrayImage img = read_gray(buf);
  CHECK(img(0, 0) == 1.0f);
  CHECK(img(1, 0) == 0.0f);
}

TEST_CASE("pgm round trip error stays within half a sample step") {
  GrayImage img(16, 9);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<float>(to_unit(keyed_hash(5, 1, i)));
  std::stringstream buf;
  write_gray(img, buf);
  const GrayImage back = read_gray(buf);
  const double bound = 1.0 / 131070.0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    // f32 storage adds a rounding error far below the bound.
    CHECK(std::abs(double(back[i]) - double(img[i])) <= bound + 1e-7);
  }
}

TEST_CASE("pgm reader accepts 8-bit files and comments") {
  std::string raw = "P5\n# scanner\n3 3\n255\n";
  for (int i = 0; i < 9; ++i) raw.push_back(static_cast<char>(i * 30));
  std::stringstream buf(raw);
  const GrayImage img = read_gray(buf);
  CHECK(img(2, 0) == doctest::Approx(60.0 / 255.0));
}

TEST_CASE("pgm rejects truncated data") {
  std::stringstream buf("P5\n3 3\n65535\n" + std::string(10, '\0'));
  CHECK_THROWS_AS(read_gray(buf), FormatError);
  std::stringstream p2("P2\n3 3\n255\n0 0 0 0 0 0 0 0 0\n");
  CHECK_THROWS_AS(read_gray(p2), FormatError);
}

TEST_CASE("label masks round trip and reject unknown labels") {
  LabelMask m(4, 3);
  m(1, 1) = Label::wrinkle;
  m(3, 2) = Label::bump;
  std::stringstream buf;
  write_labels(m, buf);
  const LabelMask back = read_labels(buf);
  CHECK(back(1, 1) == Label::wrinkle);
  CHECK(back(3, 2) == Label::bump);
  CHECK(back(0, 0) == Label::background);

  std::string raw = "P5\n3 3\n255\n";
  raw += std::string(8, '\0');
  raw.push_back(3);
  std::stringstream bad(raw);
  CHECK_THROWS_AS(read_labels(bad), FormatError);
}

TEST_CASE("world transform") {
  const WorldTransform t{0.002, {0.0, 0.0}};
  const Vec2 w = t.to_world(10, 0);
  CHECK(w.x == doctest::Approx(0.020));
  CHECK(w.y == 0.0);
  CHECK(t.to_world(0, 0) == Vec2{0.0, 0.0});

  const WorldTransform shifted{0.0016, {-0.3, 0.7}};
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const int u = static_cast<int>(keyed_hash(11, 0, k) % 640);
    const int v = static_cast<int>(keyed_hash(11, 1, k) % 480);
    const Vec2 p = shifted.to_pixel(shifted.to_world(u, v));
    REQUIRE(p.x == doctest::Approx(u).epsilon(1e-12));
    REQUIRE(p.y == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("reflect boundaries mirror without repeating the edge") {
  CHECK(reflect_index(-1, 5) == 1);
  CHECK(reflect_index(-2, 5) == 2);
  CHECK(reflect_index(5, 5) == 3);
  CHECK(reflect_index(6, 5) == 2);
  CHECK(reflect_index(4, 5) == 4);
  CHECK(reflect_index(-9, 5) == 1);
}

TEST_CASE("grids smaller than 3x3 are rejected") {
  CHECK_THROWS_AS(FloatGrid(2, 5), FormatError);
  CHECK_THROWS_AS(FloatGrid(3, 3, 0.0), FormatError);
}
