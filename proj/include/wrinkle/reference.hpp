#pragma once

// Serial, unoptimized versions of the parallel kernels. They exist to check
// the fast paths in tests and to give the benchmarks a baseline.

#include "wrinkle/classify.hpp"
#include "wrinkle/curvature.hpp"
#include "wrinkle/discont.hpp"

namespace wrinkle::reference {

/// Direct 2-D convolution with the outer product of gaussian_kernel.
Field smooth(const Field& grid, double sigma_pixels);

CurvatureField hessian(const Field& grid);

/// Descriptor with per-sample Gaussian weights and orientation bins.
PixelDescriptor descriptor_at(const Field& img, int u, int v, const DescriptorParams& params = {});

ScoreMap score_map(const NormalizedImage& img, const SvmModel& model, double threshold = 0.5);

HoughAccumulator hough_accumulate(const Grid<std::uint8_t>& mask, const Field& scores,
                                  const HoughParams& params);

}  // namespace wrinkle::reference
