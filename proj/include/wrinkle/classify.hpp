#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "wrinkle/grid.hpp"

namespace wrinkle {

inline constexpr int kDescriptorSize = 128;
inline constexpr int kPatchSize = 16;

/// 4x4 cells x 8 orientation bins of Gaussian-weighted gradient magnitude.
using PixelDescriptor = std::array<float, kDescriptorSize>;

struct DescriptorParams {
  /// Descriptors whose pre-normalization L2 norm falls below this are zeroed,
  /// so flat noisy patches do not normalize up to unit length.
  double contrast_threshold = 0.2;
};

/// Central-difference gradient magnitude and orientation of an image.
struct GradientField {
  Field magnitude;
  Field angle;  ///< radians in (-pi, pi]
  Field bin;    ///< angle as a fractional orientation bin in [0, 8)

  explicit GradientField(const Field& img);
};

PixelDescriptor descriptor_at(const GradientField& g, int u, int v,
                              const DescriptorParams& params = {});
PixelDescriptor descriptor_at(const Field& img, int u, int v, const DescriptorParams& params = {});
PixelDescriptor descriptor_at(const GrayImage& img, int u, int v,
                              const DescriptorParams& params = {});

double descriptor_norm(const PixelDescriptor& d);

namespace detail {
/// L2-normalize, clamp at 0.2, renormalize; zero below the contrast threshold.
PixelDescriptor finish_descriptor(std::array<double, kDescriptorSize>& hist,
                                  const DescriptorParams& params);
}  // namespace detail

struct TrainingSet {
  std::vector<PixelDescriptor> positives;
  std::vector<PixelDescriptor> negatives;
  std::vector<std::string> provenance;

  void append(const TrainingSet& other);
};

/// Positives at every wrinkle pixel, negatives at seeded random non-wrinkle
/// pixels (negatives_per_positive x |positives|, without replacement).
/// Pixels with valid == 0 are excluded from both sets.
TrainingSet build_training_set(const Field& img, const LabelMask& mask, int negatives_per_positive,
                               std::uint64_t seed, const DescriptorParams& params = {},
                               const Grid<std::uint8_t>* valid = nullptr);

struct SvmHyper {
  double lambda = 1e-4;
  int epochs = 10;
  std::uint64_t seed = 1;
  bool calibrate = false;
};

struct SvmModel {
  std::array<double, kDescriptorSize> weights{};
  double bias = 0.0;
  double slope = 1.0;   ///< sigmoid calibration
  double offset = 0.0;
  SvmHyper hyper;
  DescriptorParams descriptor;

  double margin(const PixelDescriptor& d) const;
  friend bool operator==(const SvmModel&, const SvmModel&);
};

/// Linear SVM by stochastic subgradient descent on the L2-regularized hinge loss.
/// Identical (descriptor, label) pairs are merged with a multiplicity weight and the
/// visiting order is keyed on example content, so the result does not depend on
/// input order or on uniform duplication of the set.
SvmModel train(const TrainingSet& ts, const SvmHyper& hyper = {},
               const DescriptorParams& descriptor = {});

/// sigmoid(slope * (w.x + b) + offset), kept strictly inside (0, 1).
double score_pixel(const SvmModel& model, const PixelDescriptor& d);
double sigmoid_score(double z);

// SVMW: "SVMW <dim> <lambda> <epochs> <seed> <calibrate> <contrast_threshold>\n"
// followed by dim weights, bias, slope and offset as little-endian f64.
void save_model(const SvmModel& model, std::ostream& out);
void save_model(const SvmModel& model, const std::filesystem::path& path);
SvmModel load_model(std::istream& in);
SvmModel load_model(const std::filesystem::path& path);

struct ClassifierMetrics {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t true_positives = 0;
  std::size_t true_negatives = 0;

  double accuracy() const;
  double recall() const;
  void add(const ClassifierMetrics& other);
};

ClassifierMetrics evaluate(const SvmModel& model, const TrainingSet& ts, double threshold = 0.5);

}  // namespace wrinkle
