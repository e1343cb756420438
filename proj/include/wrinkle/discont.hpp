#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

#include "wrinkle/classify.hpp"
#include "wrinkle/grid.hpp"

namespace wrinkle {

/// Reference-normalized light images and their root-sum-square combination.
struct NormalizedImage {
  Field first;                ///< I1 / Iref1
  Field second;               ///< I2 / Iref2
  Field combined;             ///< sqrt(first^2 + second^2)
  Grid<std::uint8_t> valid;   ///< 0 where a reference pixel is below the floor
};

inline constexpr double kDefaultReferenceFloor = 1.0 / 255.0;

NormalizedImage normalize(const GrayImage& i1, const GrayImage& i2, const GrayImage& ref1,
                          const GrayImage& ref2, double eps_ref = kDefaultReferenceFloor);

struct ScoreMap {
  Grid<std::uint8_t> mask;  ///< 1 where valid and score >= threshold
  Field scores;             ///< classifier score, 0 on invalid pixels
};

ScoreMap score_map(const NormalizedImage& img, const SvmModel& model, double threshold = 0.5);

struct HoughParams {
  double rho_resolution = 1.0;                           ///< pixels
  double theta_resolution = std::numbers::pi / 180.0;    ///< radians
  double min_votes = 10.0;                               ///< accumulated weight
  double gating_distance = 2.0;                          ///< pixels
  double gap_tolerance = 5.0;                            ///< pixels
  double min_length = 15.0;                              ///< pixels
  double max_length = 0.0;                               ///< pixels; 0 disables the cap
  double nms_rho = 5.0;                                  ///< pixels
  double nms_theta = 5.0 * std::numbers::pi / 180.0;     ///< radians
  bool weighted = true;                                  ///< score-weighted votes
  bool refine = true;           ///< run refine_segments after extraction
  double refine_search = 8.0;  ///< endpoint refinement starts this far outside the mask extent
  int refine_reach = 3;         ///< cross-line contrast offsets 1..reach pixels
};

struct SupportPixel {
  int u = 0;
  int v = 0;
  double score = 0.0;
};

/// A candidate wrinkle: a line segment with its supporting classified pixels.
struct Discontinuity {
  int id = 0;
  Segment world;        ///< endpoints in meters
  Segment pixel;        ///< endpoints in pixel coordinates
  double length = 0.0;  ///< meters
  double direction = 0.0;  ///< [0, pi)
  double rho = 0.0;     ///< line offset from the image center, pixels
  double theta = 0.0;   ///< line normal angle in [0, pi)
  std::vector<SupportPixel> support;
};

/// Integer vote accumulator over (theta, rho) cells.
struct HoughAccumulator {
  int theta_bins = 0;
  int rho_bins = 0;
  int rho_offset = 0;          ///< index of rho = 0
  double center_u = 0.0;
  double center_v = 0.0;
  std::vector<std::int64_t> votes;  ///< theta-major

  std::int64_t at(int theta, int rho) const {
    return votes[static_cast<std::size_t>(theta) * rho_bins + rho];
  }
};

/// Votes are quantized to 1/1024 so the sum is exact for any thread count.
inline constexpr double kVoteScale = 1024.0;

HoughAccumulator hough_accumulate(const Grid<std::uint8_t>& mask, const Field& scores,
                                  const HoughParams& params);

/// Accumulator cells that dominate their (nms_rho, nms_theta) neighbourhood and
/// reach min_votes, sorted by votes (descending) then cell index.
std::vector<std::size_t> hough_peaks(const HoughAccumulator& acc, const HoughParams& params);

/// Hough lines, NMS and run splitting; endpoints are mapped through `transform`.
std::vector<Discontinuity> extract_segments(const Grid<std::uint8_t>& mask, const Field& scores,
                                            const HoughParams& params,
                                            const WorldTransform& transform);

/// Moves each segment's endpoints to where the cross-line contrast of the
/// normalized images drops to half its interior level. Support pixels left
/// beyond gating distance of the shortened segment are dropped.
void refine_segments(std::vector<Discontinuity>& segments, const NormalizedImage& img,
                     const HoughParams& params, const WorldTransform& transform);

/// (|d rho|, |d theta|) between two lines with theta wrapping modulo pi.
std::pair<double, double> line_distance(double rho_a, double theta_a, double rho_b,
                                        double theta_b);

}  // namespace wrinkle
