#include "wrinkle/mixture.hpp"

#include <cmath>

#include "wrinkle/error.hpp"

namespace wrinkle {

BumpMixture build_mixture(std::span<const HeightBump> bumps, std::vector<std::string>* rejected) {
  BumpMixture mix;
  for (const auto& b : bumps) {
    const Sym2 cov = rotate_diag(b.d1 * b.d1, b.d2 * b.d2, b.orientation);
    if (!(b.d1 > 0.0) || !(b.d2 > 0.0) || !(cov.xx > 0.0) || !(cov.det() > 0.0)) {
      if (rejected) {
        rejected->push_back("bump " + std::to_string(b.id) + ": covariance not positive definite");
      }
      continue;
    }
    mix.components.push_back({b.id, b.center, cov, inverse(cov)});
  }
  return mix;
}

double component_proximity(const BumpMixture& mix, std::size_t j, Vec2 point) {
  if (j >= mix.components.size()) throw ConfigError("mixture component index out of range");
  const auto& c = mix.components[j];
  return std::exp(-0.5 * quad_form(c.precision, point - c.mean));
}

double clearance(const BumpMixture& mix, const Segment& seg, int samples) {
  if (samples < 2) throw ConfigError("clearance needs at least 2 samples");
  if (mix.empty()) return 1.0;
  double sum = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Vec2 p = lerp(seg.a, seg.b, static_cast<double>(k) / (samples - 1));
    double prod = 1.0;
    for (std::size_t j = 0; j < mix.size(); ++j) prod *= 1.0 - component_proximity(mix, j, p);
    sum += prod;
  }
  return sum / samples;
}

}  // namespace wrinkle
