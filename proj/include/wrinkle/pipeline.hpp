#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wrinkle/classify.hpp"
#include "wrinkle/config.hpp"
#include "wrinkle/curvature.hpp"
#include "wrinkle/discont.hpp"
#include "wrinkle/fusion.hpp"
#include "wrinkle/mixture.hpp"
#include "wrinkle/planner.hpp"
#include "wrinkle/synth.hpp"

namespace wrinkle {

/// File names written by `synth` and expected in scene and corpus directories.
struct SceneFiles {
  std::filesystem::path height, light1, light2, ref1, ref2, labels;

  static SceneFiles in(const std::filesystem::path& dir);
};

/// Writes the six scene files into dir (created if needed).
void write_scene(const SceneSpec& spec, const std::filesystem::path& dir);

struct SceneImages {
  FloatGrid height;
  GrayImage light1, light2, ref1, ref2;
};

SceneImages load_scene_images(const SceneFiles& files);
/// Renders a scene in memory; same pixels as write_scene followed by a load.
SceneImages render_scene(const SceneSpec& spec);

struct StageTiming {
  std::string stage;
  double ms = 0.0;
};

struct DetectResult {
  int width = 0;
  int height = 0;
  WorldTransform transform;
  BumpResult bumps;
  BumpMixture mixture;
  std::vector<std::string> rejected_components;
  std::size_t mask_pixels = 0;
  std::size_t invalid_pixels = 0;
  std::size_t segments = 0;
  std::vector<FusedWrinkle> wrinkles;  ///< sorted by p descending
  IroningPlan plan;
  std::vector<Waypoint> waypoints;
  std::vector<StageTiming> timings;
};

/// Bumps, discontinuities, fusion and planning. Failures inside a stage are
/// rethrown as StageError carrying the stage name.
DetectResult run_detect(const SceneImages& scene, const SvmModel& model, const PipelineConfig& cfg);

struct PlanOutput {
  IroningPlan plan;
  std::vector<Waypoint> waypoints;
};

PlanOutput make_plan(std::span<const FusedWrinkle> wrinkles, const FloatGrid& height,
                     const PipelineConfig& cfg);

/// Normalized image plus ground-truth labels, the unit of classifier training.
struct LabeledScene {
  std::string name;
  NormalizedImage image;
  LabelMask labels;
};

LabeledScene load_labeled_scene(const std::filesystem::path& dir, const PipelineConfig& cfg);
LabeledScene labeled_scene(const SceneSpec& spec, const std::string& name, const PipelineConfig& cfg);

/// Subdirectories of a corpus directory that hold a label mask, sorted by name.
std::vector<std::filesystem::path> corpus_scenes(const std::filesystem::path& corpus);

/// Training set over all scenes (per-scene negative seeds derived from cfg.seed),
/// then SVM training.
SvmModel train_on(std::span<const LabeledScene> scenes, const PipelineConfig& cfg);

/// Dense metrics over every valid pixel: accuracy over all of them, recall
/// over the wrinkle-labeled ones.
ClassifierMetrics pixel_metrics(const SvmModel& model, const LabeledScene& scene, double threshold);

}  // namespace wrinkle
