#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "support.hpp"
#include "wrinkle/curvature.hpp"
#include "wrinkle/synth.hpp"

using namespace wrinkle;
using wrinkle::testing::kDegree;

namespace {

template <typename F>
Field sampled(int w, int h, double cell, F&& z) {
  Field g(w, h, cell, {-0.5 * (w - 1) * cell, -0.5 * (h - 1) * cell});
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const Vec2 p = g.transform().to_world(u, v);
      g(u, v) = z(p.x, p.y);
    }
  }
  return g;
}

void check_interior(const CurvatureField& cf, double l1, double l2, double tol) {
  const int w = cf.lambda1.width();
  const int h = cf.lambda1.height();
  for (int v = 1; v < h - 1; ++v) {
    for (int u = 1; u < w - 1; ++u) {
      REQUIRE(std::abs(cf.lambda2(u, v) - l2) <= tol);
      REQUIRE(std::abs(cf.lambda1(u, v) - l1) <= tol);
    }
  }
}

SceneSpec bump_scene(std::vector<BumpSpec> bumps) {
  SceneSpec s;
  s.width = 240;
  s.height = 200;
  s.cell_size = 0.002;
  s.lights = default_lights();
  s.bumps = std::move(bumps);
  return s;
}

}  // namespace

TEST_CASE("smoothing with sigma 0 is the identity") {
  Field g(9, 7);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = keyed_normal(2, 0, i);
  CHECK(smooth(g, 0.0) == g);
  CHECK_THROWS_AS(smooth(g, -1.0), ConfigError);
}

TEST_CASE("smoothing preserves constants") {
  const Field g(15, 11, 1.0, {}, 3.25);
  for (double sigma : {0.5, 1.0, 2.0, 7.0}) {
    const Field s = smooth(g, sigma);
    for (double x : s.values()) REQUIRE(x == doctest::Approx(3.25).epsilon(1e-14));
  }
}

TEST_CASE("smoothing an impulse gives the squared discrete kernel center") {
  Field g(41, 41);
  g(20, 20) = 1.0;
  const Field s = smooth(g, 2.0);
  // Independent kernel sum: exp(-i^2 / 8) for |i| <= 6.
  double sum = 0.0;
  for (int i = -6; i <= 6; ++i) sum += std::exp(-i * i / 8.0);
  const double center = 1.0 / (sum * sum);
  CHECK(s(20, 20) == doctest::Approx(center).epsilon(1e-12));
  CHECK(std::abs(s(20, 20) - 1.0 / (2.0 * std::numbers::pi * 4.0)) < 1e-3);
  double mass = 0.0;
  for (double x : s.values()) mass += x;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gaussian kernel is normalized, symmetric and truncated at 3 sigma") {
  for (double sigma : {0.7, 2.0, 3.3}) {
    const auto k = gaussian_kernel(sigma);
    CHECK(k.size() == 2 * static_cast<std::size_t>(std::ceil(3 * sigma)) + 1);
    double sum = 0.0;
    for (double x : k) sum += x;
    CHECK(sum == doctest::Approx(1.0));
    for (std::size_t i = 0; i < k.size(); ++i) CHECK(k[i] == k[k.size() - 1 - i]);
  }
}

TEST_CASE("hessian of quadratics") {
  const double cell = 0.002;
  SUBCASE("paraboloid") {
    check_interior(hessian(sampled(31, 25, cell, [](double x, double y) { return 0.5 * (x * x + y * y); })),
                   1.0, 1.0, 1e-6);
  }
  SUBCASE("elliptic") {
    check_interior(hessian(sampled(31, 25, cell, [](double x, double y) { return 0.5 * (2 * x * x + y * y); })),
                   2.0, 1.0, 1e-6);
  }
  SUBCASE("saddle") {
    check_interior(hessian(sampled(31, 25, cell, [](double x, double y) { return x * y; })), 1.0, -1.0,
                   1e-6);
  }
}

TEST_CASE("hessian eigenvalues are ordered and flat input is umbilic") {
  Field g(20, 20);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = keyed_normal(9, 0, i);
  const CurvatureField cf = hessian(g);
  for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(cf.lambda1[i] >= cf.lambda2[i]);

  const CurvatureField flat = hessian(Field(10, 10));
  for (std::size_t i = 0; i < flat.defined.size(); ++i) REQUIRE(flat.defined[i] == 0);
}

TEST_CASE("shape index values") {
  CHECK(*shape_index(1, -1) == 0.0);
  CHECK(*shape_index(1, 0) == doctest::Approx(0.5));
  const double si = *shape_index(2, 1);
  CHECK(si == doctest::Approx(2.0 / std::numbers::pi * std::atan(3.0)));
  CHECK(si == doctest::Approx(0.7952).epsilon(1e-4));
  CHECK(in_bump_range(*shape_index(1, -1)));
  CHECK(in_bump_range(*shape_index(1, 0)));
  CHECK_FALSE(in_bump_range(si));
  CHECK(in_bump_range(-0.125));
  CHECK_FALSE(in_bump_range(0.625));
  CHECK_FALSE(shape_index(1, 1).has_value());
  CHECK_FALSE(shape_index(1, 1 - 1e-9, 1e-6).has_value());
}

TEST_CASE("shape index is scale invariant") {
  const std::pair<double, double> pairs[] = {{1, -1}, {1, 0}, {2, 1}};
  for (const auto& [a, b] : pairs) {
    for (double c : {0.1, 10.0}) CHECK(*shape_index(c * a, c * b) == *shape_index(a, b));
  }
  // Scaling by a non power of two rounds c * lambda, so general pairs agree to a few ulps.
  for (std::uint64_t k = 0; k < 200; ++k) {
    double a = keyed_normal(4, 0, k), b = keyed_normal(4, 1, k);
    if (a < b) std::swap(a, b);
    if (a == b) continue;
    const double s = *shape_index(a, b);
    REQUIRE(s >= -1.0);
    REQUIRE(s <= 1.0);
    for (double c : {0.1, 10.0}) {
      REQUIRE(std::abs(*shape_index(c * a, c * b) - s) <= 4 * std::numeric_limits<double>::epsilon());
    }
  }
}

TEST_CASE("flat height map has no bumps") {
  const FloatGrid flat(64, 48, 0.002);
  CHECK(detect_bumps(flat).bumps.empty());
}

TEST_CASE("single bump recovers center, axes and orientation") {
  for (double angle : {0.0, 0.5, 1.2, 2.6}) {
    CAPTURE(angle);
    const BumpSpec spec{{0.24, 0.2}, 0.04, 0.02, angle, 0.02};
    const SceneSpec s = bump_scene({spec});
    const BumpResult r = detect_bumps(generate_height(s));
    REQUIRE(r.bumps.size() == 1);
    const HeightBump& b = r.bumps[0];
    CHECK(distance(b.center, spec.center) <= s.cell_size);
    CHECK(b.d1 == doctest::Approx(spec.sigma_major).epsilon(0.15));
    CHECK(b.d2 == doctest::Approx(spec.sigma_minor).epsilon(0.15));
    CHECK(angle_diff_pi(b.orientation, spec.orientation) <= 5 * kDegree);
    CHECK(b.peak == doctest::Approx(0.02).epsilon(0.05));
  }
}

TEST_CASE("two bumps are ordered by volume") {
  const BumpSpec small{{0.12, 0.1}, 0.025, 0.02, 0.3, 0.015};
  const BumpSpec large{{0.34, 0.28}, 0.04, 0.03, 1.0, 0.02};
  const BumpResult r = detect_bumps(generate_height(bump_scene({small, large})));
  REQUIRE(r.bumps.size() == 2);
  // Analytic volume 2 pi peak sigma_major sigma_minor decides the order.
  auto analytic = [](const BumpSpec& b) { return 2 * std::numbers::pi * b.peak_height * b.sigma_major * b.sigma_minor; };
  REQUIRE(analytic(large) > analytic(small));
  CHECK(distance(r.bumps[0].center, large.center) < 0.004);
  CHECK(distance(r.bumps[1].center, small.center) < 0.004);
  CHECK(r.bumps[0].id == 0);
  CHECK(r.bumps[1].id == 1);
}

TEST_CASE("detected bumps satisfy their invariants") {
  for (std::uint64_t seed = 100; seed < 106; ++seed) {
    const SceneSpec s = scenes::training(seed);
    const FloatGrid h = generate_height(s);
    const BumpResult r = detect_bumps(h);
    for (std::size_t i = 0; i < r.bumps.size(); ++i) {
      const HeightBump& b = r.bumps[i];
      CHECK(b.d1 >= b.d2);
      CHECK(b.d2 > 0.0);
      CHECK(b.volume > 0.0);
      CHECK(b.orientation >= 0.0);
      CHECK(b.orientation < std::numbers::pi);
      if (i > 0) CHECK(r.bumps[i - 1].volume >= b.volume);
      Grid<std::uint8_t> mask = Grid<std::uint8_t>::like(h, std::uint8_t{0});
      for (std::size_t p : b.pixels) mask[p] = 1;
      int n = 0;
      label_components(mask, &n);
      CHECK(n == 1);
    }
  }
}

TEST_CASE("min volume removes small components") {
  const SceneSpec s = bump_scene({{{0.24, 0.2}, 0.03, 0.02, 0.0, 0.015}});
  BumpParams p;
  const BumpResult kept = detect_bumps(generate_height(s), p);
  REQUIRE(kept.bumps.size() == 1);
  p.min_volume = kept.bumps[0].volume * 1.01;
  const BumpResult dropped = detect_bumps(generate_height(s), p);
  CHECK(dropped.bumps.empty());
  CHECK(dropped.diagnostics.below_volume == 1);
}

TEST_CASE("hole filling fills enclosed background only") {
  Grid<std::uint8_t> ring(7, 7);
  for (int i = 1; i <= 5; ++i) {
    ring(i, 1) = ring(i, 5) = ring(1, i) = ring(5, i) = 1;
  }
  const auto filled = fill_holes(ring);
  CHECK(filled(3, 3) == 1);
  CHECK(filled(0, 0) == 0);
  CHECK(filled(6, 3) == 0);

  Grid<std::uint8_t> open = ring;
  open(5, 3) = 0;
  CHECK(fill_holes(open)(3, 3) == 0);
}

TEST_CASE("components are 8-connected and labeled in raster order") {
  Grid<std::uint8_t> m(6, 5);
  m(0, 0) = m(1, 1) = m(2, 2) = 1;  // diagonal chain
  m(5, 0) = 1;
  m(4, 4) = m(5, 4) = 1;
  int n = 0;
  const Grid<int> labels = label_components(m, &n);
  CHECK(n == 3);
  CHECK(labels(0, 0) == 1);
  CHECK(labels(2, 2) == 1);
  CHECK(labels(5, 0) == 2);
  CHECK(labels(4, 4) == 3);
  CHECK(labels(3, 3) == 0);
}
