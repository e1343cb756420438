#pragma once

#include <span>
#include <vector>

#include "wrinkle/discont.hpp"
#include "wrinkle/mixture.hpp"

namespace wrinkle {

/// A discontinuity with its bump clearance q, classifier confidence r and p = q * r.
struct FusedWrinkle {
  Discontinuity discontinuity;
  double q = 1.0;
  double r = 0.0;
  double p = 0.0;
  bool accepted = false;
  int piece = 0;  ///< index after splitting by the planner; 0 for unsplit wrinkles

  int id() const { return discontinuity.id; }
  double length() const { return discontinuity.length; }
};

/// Mean classifier score over the supporting pixels.
double confidence(const Discontinuity& d);

struct FusionParams {
  double p_min = 0.3;
  int clearance_samples = 16;
};

/// Scores every discontinuity; output sorted by p descending, ties by id.
std::vector<FusedWrinkle> fuse(std::span<const Discontinuity> ds, const BumpMixture& mix,
                               const FusionParams& params = {});

}  // namespace wrinkle
