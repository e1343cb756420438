#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wrinkle/grid.hpp"

namespace wrinkle {

/// Which surface the bump-point rule is evaluated on.
enum class Polarity { height, negated };

/// Per-pixel Hessian eigenvalues (lambda1 >= lambda2) and shape index.
struct CurvatureField {
  Field lambda1;
  Field lambda2;
  Field shape_index;                 ///< 0 where undefined
  Grid<std::uint8_t> defined;        ///< 0 where |lambda1 - lambda2| < umbilic epsilon
  double smoothing_sigma = 0.0;      ///< pixels
};

/// Gaussian blur truncated at 3 sigma with mirrored boundaries; sigma 0 is the identity.
Field smooth(const Field& grid, double sigma_pixels);
Field smooth(const FloatGrid& grid, double sigma_pixels);

/// Normalized 1-D kernel of half-width ceil(3 sigma) used by `smooth`.
std::vector<double> gaussian_kernel(double sigma_pixels);

/// Central-difference Hessian in world units (per m^2), eigenvalues in closed form.
CurvatureField hessian(const Field& grid);

/// (2/pi) atan((l1 + l2) / (l1 - l2)); nullopt when |l1 - l2| < eps_umbilic.
std::optional<double> shape_index(double lambda1, double lambda2, double eps_umbilic = 0.0);

/// The bump-point interval [-1/8, 5/8).
constexpr bool in_bump_range(double si) { return si >= -0.125 && si < 0.625; }

struct BumpParams {
  double smoothing_sigma = 2.0;     ///< pixels
  Polarity polarity = Polarity::height;
  double min_volume = 1e-6;         ///< m^3
  double height_floor = 5e-4;       ///< m above the table (median height)
  int min_pixels = 5;
  bool fill_holes = true;
};

struct HeightBump {
  int id = 0;
  std::vector<std::size_t> pixels;  ///< linear indices, ascending
  Vec2 center;                      ///< height-weighted centroid, world meters
  double volume = 0.0;              ///< m^3 above the component-boundary minimum
  double d1 = 0.0;                  ///< major principal-axis std-dev, meters
  double d2 = 0.0;                  ///< minor principal-axis std-dev, meters
  double orientation = 0.0;         ///< major axis angle in [0, pi)
  double peak = 0.0;                ///< max table-relative height, meters
};

struct BumpDiagnostics {
  std::size_t bump_points = 0;
  std::size_t components = 0;
  std::size_t degenerate = 0;      ///< fewer than min_pixels or zero spread
  std::size_t below_volume = 0;
};

struct BumpResult {
  std::vector<HeightBump> bumps;  ///< sorted by volume, descending
  BumpDiagnostics diagnostics;
};

BumpResult detect_bumps(const FloatGrid& grid, const BumpParams& params = {});

/// Marks background pixels not 4-connected to the border as foreground.
Grid<std::uint8_t> fill_holes(const Grid<std::uint8_t>& mask);

/// 8-connected component labels (0 = background, 1..n in raster order of first pixel).
Grid<int> label_components(const Grid<std::uint8_t>& mask, int* count = nullptr);

}  // namespace wrinkle
