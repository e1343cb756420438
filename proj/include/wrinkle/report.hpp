#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "wrinkle/config.hpp"
#include "wrinkle/pipeline.hpp"

namespace wrinkle {

inline constexpr int kReportSchemaVersion = 1;

struct InputDigest {
  std::string role;  ///< height, light1, light2, ref1, ref2, model, config
  std::string path;
  std::string sha256;
};

/// Stage timings are only included when asked for, so that reports of
/// repeated runs stay byte-identical.
nlohmann::json make_report(const DetectResult& r, const PipelineConfig& cfg,
                           std::span<const InputDigest> inputs, bool with_timings);

/// Two-space indented, sorted keys, trailing newline.
std::string dump_report(const nlohmann::json& report);

/// Parses a report and checks its schema version; FormatError otherwise.
nlohmann::json parse_report(const std::string& text);

/// Wrinkles as stored in a report (support pixels included).
std::vector<FusedWrinkle> wrinkles_from_report(const nlohmann::json& report);

/// Re-plans the report's wrinkles under cfg: `accepted` is re-evaluated
/// against cfg.fusion.p_min and the plan, config and waypoints replaced.
void replan_report(nlohmann::json& report, const FloatGrid& height, const PipelineConfig& cfg);

}  // namespace wrinkle
