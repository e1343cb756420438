#include "wrinkle/scenes.hpp"

#include <cmath>
#include <numbers>

#include "wrinkle/error.hpp"
#include "wrinkle/rng.hpp"

namespace wrinkle::scenes {
namespace {

constexpr double pi = std::numbers::pi;

// Keyed uniform stream so presets are portable across standard libraries.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : seed_(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * to_unit(keyed_hash(seed_, 0x5ce4e, n_++)); }

 private:
  std::uint64_t seed_;
  std::uint64_t n_ = 0;
};

WrinkleSpec straight_ridge(Vec2 center, double angle, double length) {
  const Vec2 d{std::cos(angle), std::sin(angle)};
  return {{center - 0.5 * length * d, center + 0.5 * length * d}, kRidgeHalfWidth, kRidgeHeight};
}

BumpSpec random_bump(Draw& r, Vec2 center) {
  BumpSpec b;
  b.center = center;
  b.sigma_major = r.uniform(0.030, 0.050);
  b.sigma_minor = r.uniform(0.5, 0.9) * b.sigma_major;
  b.orientation = r.uniform(0.0, pi);
  b.peak_height = r.uniform(0.012, 0.030);
  return b;
}

}  // namespace

SceneSpec blank(int width, int height, std::uint64_t seed) {
  SceneSpec s;
  s.width = width;
  s.height = height;
  s.cell_size = kCell;
  s.lights = default_lights();
  s.albedo = 0.8;
  s.height_noise = 0.0002;
  s.image_noise = 0.004;
  s.seed = seed;
  return s;
}

SceneSpec single_bump(std::uint64_t seed) {
  SceneSpec s = blank(200, 160, seed);
  Draw r(seed);
  s.bumps.push_back(random_bump(r, {r.uniform(0.17, 0.23), r.uniform(0.13, 0.19)}));
  return s;
}

SceneSpec single_ridge(std::uint64_t seed, double length_px) {
  SceneSpec s = blank(256, 256, seed);
  Draw r(seed);
  const Vec2 c{r.uniform(0.236, 0.276), r.uniform(0.236, 0.276)};
  s.wrinkles.push_back(straight_ridge(c, r.uniform(0.0, pi), length_px * kCell));
  return s;
}

SceneSpec training(std::uint64_t seed) {
  SceneSpec s = blank(256, 192, seed);
  Draw r(seed);
  const int bumps = 1 + static_cast<int>(r.uniform(0.0, 2.0));
  for (int i = 0; i < bumps; ++i) {
    s.bumps.push_back(random_bump(r, {r.uniform(0.1, 0.41), r.uniform(0.1, 0.28)}));
  }
  const int ridges = 2 + static_cast<int>(r.uniform(0.0, 2.0));
  for (int i = 0; i < ridges; ++i) {
    const double len = r.uniform(0.06, 0.25);
    s.wrinkles.push_back(
        straight_ridge({r.uniform(0.12, 0.39), r.uniform(0.1, 0.28)}, r.uniform(0.0, pi), len));
  }
  return s;
}

SceneSpec fusion(std::uint64_t seed) {
  SceneSpec s = blank(320, 240, seed);
  Draw r(seed);
  BumpSpec b;
  b.center = {r.uniform(0.17, 0.21), r.uniform(0.21, 0.27)};
  b.sigma_major = r.uniform(0.040, 0.050);
  b.sigma_minor = r.uniform(0.7, 0.9) * b.sigma_major;
  b.orientation = r.uniform(0.0, pi);
  b.peak_height = r.uniform(0.015, 0.025);
  s.bumps.push_back(b);
  // On-bump ridge: centered on the bump, shorter than the bump's major axis.
  const double on_len = r.uniform(1.2, 1.6) * b.sigma_major;
  s.wrinkles.push_back(straight_ridge(b.center, b.orientation + r.uniform(-0.3, 0.3), on_len));
  // Clear ridge: in the right part of the scene, beyond 3 sigma of the bump.
  s.wrinkles.push_back(straight_ridge({r.uniform(0.49, 0.52), r.uniform(0.18, 0.30)},
                                      r.uniform(0.0, pi), r.uniform(0.08, 0.12)));
  return s;
}

SceneSpec reference(std::uint64_t seed) {
  SceneSpec s = blank(640, 480, seed);
  s.bumps.push_back({{0.32, 0.36}, 0.045, 0.030, 0.4, 0.022});
  s.bumps.push_back({{0.78, 0.62}, 0.040, 0.025, 2.0, 0.016});
  s.wrinkles.push_back(straight_ridge({0.92, 0.26}, 0.6, 0.18));
  return s;
}

std::vector<std::string> names() { return {"bump", "ridge", "training", "fusion", "reference"}; }

SceneSpec by_name(const std::string& name, std::uint64_t seed) {
  if (name == "bump") return single_bump(seed);
  if (name == "ridge") return single_ridge(seed, 120.0);
  if (name == "training") return training(seed);
  if (name == "fusion") return fusion(seed);
  if (name == "reference") return reference(seed);
  throw ConfigError("unknown scene preset '" + name + "'");
}

}  // namespace wrinkle::scenes
