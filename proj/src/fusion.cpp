#include "wrinkle/fusion.hpp"

#include <algorithm>

#include "wrinkle/error.hpp"

namespace wrinkle {

double confidence(const Discontinuity& d) {
  if (d.support.empty()) throw StageError("fusion", "discontinuity without supporting pixels");
  double sum = 0.0;
  for (const auto& px : d.support) sum += px.score;
  return sum / static_cast<double>(d.support.size());
}

std::vector<FusedWrinkle> fuse(std::span<const Discontinuity> ds, const BumpMixture& mix,
                               const FusionParams& params) {
  std::vector<FusedWrinkle> out(ds.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(ds.size()); ++i) {
    FusedWrinkle& f = out[i];
    f.discontinuity = ds[i];
    f.q = clearance(mix, ds[i].world, params.clearance_samples);
    f.r = confidence(ds[i]);
    f.p = f.q * f.r;
    f.accepted = f.p >= params.p_min;
  }
  std::sort(out.begin(), out.end(), [](const FusedWrinkle& a, const FusedWrinkle& b) {
    if (a.p != b.p) return a.p > b.p;
    return a.id() < b.id();
  });
  return out;
}

}  // namespace wrinkle
