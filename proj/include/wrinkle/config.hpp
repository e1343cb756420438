#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>

#include "wrinkle/classify.hpp"
#include "wrinkle/curvature.hpp"
#include "wrinkle/discont.hpp"
#include "wrinkle/fusion.hpp"
#include "wrinkle/planner.hpp"

namespace wrinkle {

/// Every tunable of the pipeline. Keys in the text form are `section.name`;
/// see format_config for the full list with defaults.
struct PipelineConfig {
  std::uint64_t seed = 1;
  BumpParams bumps;
  double reference_floor = kDefaultReferenceFloor;
  double score_threshold = 0.5;
  int negatives_per_positive = 3;
  SvmHyper svm;
  DescriptorParams descriptor;
  HoughParams hough;
  FusionParams fusion;
  IronSpec iron;
  Vec2 home{0.0, 0.0};

  void validate() const;
};

/// Reads `key = value` lines over the defaults. Unknown or repeated keys and
/// malformed values throw ConfigError.
PipelineConfig parse_config(std::istream& in);
PipelineConfig load_config(const std::filesystem::path& path);

/// Every key with its current value, one per line, parseable by parse_config.
std::string format_config(const PipelineConfig& cfg);

}  // namespace wrinkle
