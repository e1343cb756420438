#pragma once

#include <span>
#include <string>
#include <vector>

#include "wrinkle/curvature.hpp"
#include "wrinkle/geometry.hpp"

namespace wrinkle {

/// One bump as an unnormalized (peak 1) Gaussian in world coordinates.
struct MixtureComponent {
  int bump_id = 0;
  Vec2 mean;
  Sym2 covariance;
  Sym2 precision;  ///< covariance inverse
};

struct BumpMixture {
  std::vector<MixtureComponent> components;

  std::size_t size() const { return components.size(); }
  bool empty() const { return components.empty(); }
};

/// Component covariance: diag(D1^2, D2^2) rotated into the bump orientation.
/// Bumps whose covariance is not SPD are skipped and reported in `rejected`.
BumpMixture build_mixture(std::span<const HeightBump> bumps,
                          std::vector<std::string>* rejected = nullptr);

/// exp(-0.5 (p - mu)^T Sigma^-1 (p - mu)), in [0, 1].
double component_proximity(const BumpMixture& mix, std::size_t j, Vec2 point);

/// Mean over `samples` evenly spaced segment points of prod_j (1 - proximity_j).
double clearance(const BumpMixture& mix, const Segment& seg, int samples = 16);

}  // namespace wrinkle
