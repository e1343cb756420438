#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "wrinkle/curvature.hpp"
#include "wrinkle/fusion.hpp"
#include "wrinkle/synth.hpp"

using namespace wrinkle;

namespace {

Discontinuity disc(int id, Segment world, std::vector<double> scores) {
  Discontinuity d;
  d.id = id;
  d.world = world;
  d.pixel = world;
  d.length = world.length();
  d.direction = world.direction();
  int u = 0;
  for (double s : scores) d.support.push_back({u++, 0, s});
  return d;
}

}  // namespace

TEST_CASE("confidence is the mean support score") {
  CHECK(confidence(disc(0, {{0, 0}, {1, 0}}, {0.6, 0.8})) == doctest::Approx(0.7));
  CHECK(confidence(disc(0, {{0, 0}, {1, 0}}, {0.42, 0.42, 0.42})) == doctest::Approx(0.42));
  CHECK_THROWS_AS(confidence(disc(0, {{0, 0}, {1, 0}}, {})), StageError);
}

TEST_CASE("confidence of open-interval scores stays open") {
  for (std::uint64_t k = 0; k < 200; ++k) {
    std::vector<double> s;
    const int n = 1 + static_cast<int>(keyed_hash(k, 0, 0) % 40);
    for (int i = 0; i < n; ++i) s.push_back(sigmoid_score(20.0 * keyed_normal(k, 1, i)));
    const double r = confidence(disc(0, {{0, 0}, {1, 0}}, s));
    REQUIRE(r > 0.0);
    REQUIRE(r < 1.0);
  }
}

TEST_CASE("without bumps p equals the confidence") {
  const auto out = fuse(std::vector{disc(1, {{0, 0}, {0.1, 0}}, {0.9})}, BumpMixture{});
  REQUIRE(out.size() == 1);
  CHECK(out[0].q == 1.0);
  CHECK(out[0].p == doctest::Approx(0.9));
  CHECK(out[0].accepted);
}

TEST_CASE("a discontinuity through a bump is rejected") {
  SceneSpec s;
  s.width = 240;
  s.height = 200;
  s.lights = default_lights();
  const BumpSpec b{{0.24, 0.2}, 0.045, 0.035, 0.4, 0.02};
  s.bumps.push_back(b);
  const BumpMixture mix = build_mixture(detect_bumps(generate_height(s)).bumps);
  REQUIRE(mix.size() == 1);

  const Vec2 dir{std::cos(0.4), std::sin(0.4)};
  const Segment through{b.center - 0.7 * b.sigma_major * dir, b.center + 0.7 * b.sigma_major * dir};
  const double q = clearance(mix, through);
  REQUIRE(q <= 0.2);
  const auto out = fuse(std::vector{disc(0, through, {0.9})}, mix);
  CHECK(out[0].p <= 0.18);
  CHECK_FALSE(out[0].accepted);
}

TEST_CASE("fusion invariants and ordering") {
  BumpMixture mix;
  const Sym2 cov{4e-4, 1e-4, 9e-4};
  mix.components.push_back({0, {0.3, 0.3}, cov, inverse(cov)});
  std::vector<Discontinuity> ds;
  for (int i = 0; i < 60; ++i) {
    const Vec2 a{to_unit(keyed_hash(7, 0, i)) * 0.6, to_unit(keyed_hash(7, 1, i)) * 0.6};
    const Vec2 b = a + Vec2{0.05, 0.02};
    // Pairs of identical discontinuities exercise the id tie break.
    const std::uint64_t key = static_cast<std::uint64_t>(i / 2);
    ds.push_back(disc(100 - i, i % 2 ? Segment{ds.back().world} : Segment{a, b},
                      {to_unit(keyed_hash(8, 0, key)), to_unit(keyed_hash(8, 1, key))}));
  }
  FusionParams params;
  const auto out = fuse(ds, mix, params);
  REQUIRE(out.size() == ds.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const FusedWrinkle& f = out[i];
    CHECK(std::abs(f.p - f.q * f.r) <= 1e-12);
    CHECK(f.accepted == (f.p >= params.p_min));
    CHECK(f.q >= 0.0);
    CHECK(f.q <= 1.0);
    if (i > 0) {
      CHECK(out[i - 1].p >= f.p);
      if (out[i - 1].p == f.p) CHECK(out[i - 1].id() < f.id());
    }
  }
}

TEST_CASE("p_min boundary is inclusive") {
  FusionParams params;
  params.p_min = 0.5;
  const auto out = fuse(std::vector{disc(0, {{0, 0}, {1, 0}}, {0.5})}, BumpMixture{}, params);
  CHECK(out[0].accepted);
}
