#include "wrinkle/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "wrinkle/error.hpp"
#include "wrinkle/keyvalue.hpp"

namespace wrinkle {
namespace {

std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

constexpr double kDeg = std::numbers::pi / 180.0;

struct Setting {
  const char* key;
  std::function<void(PipelineConfig&, const KeyValue&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

Setting real(const char* key, double PipelineConfig::*outer) {
  return {key, [outer](PipelineConfig& c, const KeyValue& kv) { c.*outer = parse_number(kv); },
          [outer](const PipelineConfig& c) { return num(c.*outer); }};
}

template <typename S>
Setting real(const char* key, S PipelineConfig::*section, double S::*field, double scale = 1.0) {
  return {key,
          [=](PipelineConfig& c, const KeyValue& kv) { (c.*section).*field = parse_number(kv) * scale; },
          [=](const PipelineConfig& c) { return num((c.*section).*field / scale); }};
}

template <typename S>
Setting integer(const char* key, S PipelineConfig::*section, int S::*field) {
  return {key,
          [=](PipelineConfig& c, const KeyValue& kv) {
            const long long v = parse_integer(kv);
            if (v < -1000000000LL || v > 1000000000LL) {
              throw ConfigError("line " + std::to_string(kv.line) + ": '" + kv.key + "' out of range");
            }
            (c.*section).*field = static_cast<int>(v);
          },
          [=](const PipelineConfig& c) { return std::to_string((c.*section).*field); }};
}

template <typename S>
Setting flag(const char* key, S PipelineConfig::*section, bool S::*field) {
  return {key, [=](PipelineConfig& c, const KeyValue& kv) { (c.*section).*field = parse_bool(kv); },
          [=](const PipelineConfig& c) { return std::string((c.*section).*field ? "true" : "false"); }};
}

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = {
      {"seed",
       [](PipelineConfig& c, const KeyValue& kv) {
         const long long v = parse_integer(kv);
         if (v < 0) throw ConfigError("line " + std::to_string(kv.line) + ": seed must be >= 0");
         c.seed = static_cast<std::uint64_t>(v);
       },
       [](const PipelineConfig& c) { return std::to_string(c.seed); }},

      real("bumps.smoothing_sigma", &PipelineConfig::bumps, &BumpParams::smoothing_sigma),
      {"bumps.polarity",
       [](PipelineConfig& c, const KeyValue& kv) {
         if (kv.value == "height") {
           c.bumps.polarity = Polarity::height;
         } else if (kv.value == "negated") {
           c.bumps.polarity = Polarity::negated;
         } else {
           throw ConfigError("line " + std::to_string(kv.line) +
                             ": bumps.polarity expects 'height' or 'negated'");
         }
       },
       [](const PipelineConfig& c) {
         return std::string(c.bumps.polarity == Polarity::height ? "height" : "negated");
       }},
      real("bumps.min_volume", &PipelineConfig::bumps, &BumpParams::min_volume),
      real("bumps.height_floor", &PipelineConfig::bumps, &BumpParams::height_floor),
      integer("bumps.min_pixels", &PipelineConfig::bumps, &BumpParams::min_pixels),
      flag("bumps.fill_holes", &PipelineConfig::bumps, &BumpParams::fill_holes),

      real("normalize.reference_floor", &PipelineConfig::reference_floor),

      real("classify.threshold", &PipelineConfig::score_threshold),
      {"classify.negatives_per_positive",
       [](PipelineConfig& c, const KeyValue& kv) {
         const long long v = parse_integer(kv);
         if (v < 0 || v > 1000) {
           throw ConfigError("line " + std::to_string(kv.line) +
                             ": classify.negatives_per_positive must be in [0, 1000]");
         }
         c.negatives_per_positive = static_cast<int>(v);
       },
       [](const PipelineConfig& c) { return std::to_string(c.negatives_per_positive); }},
      real("classify.lambda", &PipelineConfig::svm, &SvmHyper::lambda),
      integer("classify.epochs", &PipelineConfig::svm, &SvmHyper::epochs),
      flag("classify.calibrate", &PipelineConfig::svm, &SvmHyper::calibrate),
      real("classify.contrast_threshold", &PipelineConfig::descriptor,
           &DescriptorParams::contrast_threshold),

      real("hough.rho_resolution", &PipelineConfig::hough, &HoughParams::rho_resolution),
      real("hough.theta_resolution_deg", &PipelineConfig::hough, &HoughParams::theta_resolution, kDeg),
      real("hough.min_votes", &PipelineConfig::hough, &HoughParams::min_votes),
      real("hough.gating_distance", &PipelineConfig::hough, &HoughParams::gating_distance),
      real("hough.gap_tolerance", &PipelineConfig::hough, &HoughParams::gap_tolerance),
      real("hough.min_length", &PipelineConfig::hough, &HoughParams::min_length),
      real("hough.max_length", &PipelineConfig::hough, &HoughParams::max_length),
      real("hough.nms_rho", &PipelineConfig::hough, &HoughParams::nms_rho),
      real("hough.nms_theta_deg", &PipelineConfig::hough, &HoughParams::nms_theta, kDeg),
      flag("hough.weighted", &PipelineConfig::hough, &HoughParams::weighted),
      flag("hough.refine", &PipelineConfig::hough, &HoughParams::refine),
      real("hough.refine_search", &PipelineConfig::hough, &HoughParams::refine_search),
      integer("hough.refine_reach", &PipelineConfig::hough, &HoughParams::refine_reach),

      real("fusion.p_min", &PipelineConfig::fusion, &FusionParams::p_min),
      integer("fusion.clearance_samples", &PipelineConfig::fusion, &FusionParams::clearance_samples),

      real("iron.long_axis", &PipelineConfig::iron, &IronSpec::long_axis),
      real("iron.short_axis", &PipelineConfig::iron, &IronSpec::short_axis),
      real("iron.press_depth", &PipelineConfig::iron, &IronSpec::press_depth),
      real("iron.foam_thickness", &PipelineConfig::iron, &IronSpec::foam_thickness),
      real("iron.foam_stiffness", &PipelineConfig::iron, &IronSpec::foam_stiffness),
      real("iron.lift_height", &PipelineConfig::iron, &IronSpec::lift_height),
      real("iron.travel_speed", &PipelineConfig::iron, &IronSpec::travel_speed),
      real("iron.slide_speed", &PipelineConfig::iron, &IronSpec::slide_speed),
      real("iron.dwell_time", &PipelineConfig::iron, &IronSpec::dwell_time),
      {"plan.home",
       [](PipelineConfig& c, const KeyValue& kv) {
         const auto v = parse_numbers(kv);
         if (v.size() != 2) throw ConfigError("line " + std::to_string(kv.line) + ": plan.home expects 'x y'");
         c.home = {v[0], v[1]};
       },
       [](const PipelineConfig& c) { return num(c.home.x) + " " + num(c.home.y); }},
  };
  return table;
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(bumps.smoothing_sigma >= 0.0)) throw ConfigError("bumps.smoothing_sigma must be >= 0");
  if (!(bumps.min_volume >= 0.0)) throw ConfigError("bumps.min_volume must be >= 0");
  if (bumps.min_pixels < 1) throw ConfigError("bumps.min_pixels must be >= 1");
  if (!(reference_floor > 0.0)) throw ConfigError("normalize.reference_floor must be > 0");
  if (!(score_threshold >= 0.0 && score_threshold <= 1.0)) {
    throw ConfigError("classify.threshold must be in [0, 1]");
  }
  if (!(svm.lambda > 0.0)) throw ConfigError("classify.lambda must be > 0");
  if (svm.epochs < 1) throw ConfigError("classify.epochs must be >= 1");
  if (!(hough.rho_resolution > 0.0) || !(hough.theta_resolution > 0.0)) {
    throw ConfigError("hough resolutions must be > 0");
  }
  if (!(hough.gating_distance > 0.0) || hough.gap_tolerance < 0.0 || hough.min_length < 0.0 ||
      hough.max_length < 0.0 || hough.nms_rho < 0.0 || hough.nms_theta < 0.0) {
    throw ConfigError("hough distances must be non-negative (gating > 0)");
  }
  if (hough.refine_reach < 1) throw ConfigError("hough.refine_reach must be >= 1");
  if (!(fusion.p_min >= 0.0 && fusion.p_min <= 1.0)) throw ConfigError("fusion.p_min must be in [0, 1]");
  if (fusion.clearance_samples < 2) throw ConfigError("fusion.clearance_samples must be >= 2");
  iron.validate();
}

PipelineConfig parse_config(std::istream& in) {
  PipelineConfig cfg;
  std::set<std::string> seen;
  for (const KeyValue& kv : parse_key_values(in)) {
    const Setting* s = nullptr;
    for (const auto& cand : settings()) {
      if (kv.key == cand.key) s = &cand;
    }
    if (!s) throw ConfigError("line " + std::to_string(kv.line) + ": unknown key '" + kv.key + "'");
    if (!seen.insert(kv.key).second) {
      throw ConfigError("line " + std::to_string(kv.line) + ": repeated key '" + kv.key + "'");
    }
    s->set(cfg, kv);
  }
  cfg.svm.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in);
}

std::string format_config(const PipelineConfig& cfg) {
  std::ostringstream os;
  for (const auto& s : settings()) os << s.key << " = " << s.get(cfg) << '\n';
  return os.str();
}

}  // namespace wrinkle
