#include "wrinkle/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "wrinkle/error.hpp"
#include "wrinkle/gridio.hpp"
#include "wrinkle/rng.hpp"

namespace fs = std::filesystem;

namespace wrinkle {
namespace {

// Runs one stage, timing it and tagging any failure with the stage name.
template <typename F>
auto stage(std::vector<StageTiming>& timings, const char* name, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  auto record = [&] {
    const auto t1 = std::chrono::steady_clock::now();
    timings.push_back({name, std::chrono::duration<double, std::milli>(t1 - t0).count()});
  };
  try {
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      record();
    } else {
      auto r = body();
      record();
      return r;
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

GrayImage quantized(const GrayImage& img) {
  std::stringstream buf;
  write_gray(img, buf);
  return read_gray(buf);
}

}  // namespace

SceneFiles SceneFiles::in(const fs::path& dir) {
  return {dir / "height.fgrid", dir / "light1.pgm", dir / "light2.pgm",
          dir / "ref1.pgm",     dir / "ref2.pgm",   dir / "labels.pgm"};
}

void write_scene(const SceneSpec& spec, const fs::path& dir) {
  spec.validate();
  fs::create_directories(dir);
  const SceneFiles f = SceneFiles::in(dir);
  const FloatGrid height = generate_height(spec);
  write_grid(height, f.height);
  write_gray(render_illumination(height, spec, 1), f.light1);
  write_gray(render_illumination(height, spec, 2), f.light2);
  write_gray(render_reference(spec, 1), f.ref1);
  write_gray(render_reference(spec, 2), f.ref2);
  write_labels(ground_truth(spec), f.labels);
}

SceneImages load_scene_images(const SceneFiles& files) {
  return {read_grid(files.height), read_gray(files.light1), read_gray(files.light2),
          read_gray(files.ref1), read_gray(files.ref2)};
}

SceneImages render_scene(const SceneSpec& spec) {
  spec.validate();
  SceneImages s;
  s.height = generate_height(spec);
  s.light1 = quantized(render_illumination(s.height, spec, 1));
  s.light2 = quantized(render_illumination(s.height, spec, 2));
  s.ref1 = quantized(render_reference(spec, 1));
  s.ref2 = quantized(render_reference(spec, 2));
  return s;
}

PlanOutput make_plan(std::span<const FusedWrinkle> wrinkles, const FloatGrid& height,
                     const PipelineConfig& cfg) {
  PlanOutput out;
  out.plan = plan_ironing(wrinkles, cfg.iron, cfg.home);
  out.waypoints = emit_waypoints(out.plan, cfg.iron, height);
  return out;
}

DetectResult run_detect(const SceneImages& scene, const SvmModel& model, const PipelineConfig& cfg) {
  cfg.validate();
  const FloatGrid& h = scene.height;
  for (const GrayImage* img : {&scene.light1, &scene.light2, &scene.ref1, &scene.ref2}) {
    if (img->width() != h.width() || img->height() != h.height()) {
      throw ConfigError("images must match the height map dimensions (" + std::to_string(h.width()) +
                        "x" + std::to_string(h.height()) + ")");
    }
  }

  DetectResult r;
  r.width = h.width();
  r.height = h.height();
  r.transform = h.transform();

  r.bumps = stage(r.timings, "curvature", [&] { return detect_bumps(h, cfg.bumps); });
  r.mixture = stage(r.timings, "mixture",
                    [&] { return build_mixture(r.bumps.bumps, &r.rejected_components); });

  const NormalizedImage norm = stage(r.timings, "normalize", [&] {
    return normalize(scene.light1, scene.light2, scene.ref1, scene.ref2, cfg.reference_floor);
  });
  const ScoreMap scores =
      stage(r.timings, "classify", [&] { return score_map(norm, model, cfg.score_threshold); });
  for (std::size_t i = 0; i < norm.valid.size(); ++i) {
    r.invalid_pixels += norm.valid[i] == 0;
    r.mask_pixels += scores.mask[i] != 0;
  }

  const auto segments = stage(r.timings, "discont", [&] {
    auto segs = extract_segments(scores.mask, scores.scores, cfg.hough, r.transform);
    if (cfg.hough.refine) refine_segments(segs, norm, cfg.hough, r.transform);
    return segs;
  });
  r.segments = segments.size();

  r.wrinkles = stage(r.timings, "fusion", [&] { return fuse(segments, r.mixture, cfg.fusion); });
  PlanOutput plan = stage(r.timings, "planner", [&] { return make_plan(r.wrinkles, h, cfg); });
  r.plan = std::move(plan.plan);
  r.waypoints = std::move(plan.waypoints);
  return r;
}

LabeledScene labeled_scene(const SceneSpec& spec, const std::string& name, const PipelineConfig& cfg) {
  const SceneImages s = render_scene(spec);
  return {name, normalize(s.light1, s.light2, s.ref1, s.ref2, cfg.reference_floor),
          ground_truth(spec)};
}

LabeledScene load_labeled_scene(const fs::path& dir, const PipelineConfig& cfg) {
  const SceneFiles f = SceneFiles::in(dir);
  LabeledScene s;
  s.name = dir.filename().string();
  s.image = normalize(read_gray(f.light1), read_gray(f.light2), read_gray(f.ref1),
                      read_gray(f.ref2), cfg.reference_floor);
  s.labels = read_labels(f.labels);
  if (!s.labels.same_shape(s.image.combined)) {
    throw FormatError(dir.string() + ": label mask and images differ in size");
  }
  return s;
}

std::vector<fs::path> corpus_scenes(const fs::path& corpus) {
  if (!fs::is_directory(corpus)) throw ConfigError("corpus is not a directory: " + corpus.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(corpus)) {
    if (entry.is_directory() && fs::exists(SceneFiles::in(entry.path()).labels)) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

SvmModel train_on(std::span<const LabeledScene> scenes, const PipelineConfig& cfg) {
  if (scenes.empty()) throw StageError("train", "no labeled scenes");
  TrainingSet ts;
  for (std::size_t k = 0; k < scenes.size(); ++k) {
    const LabeledScene& s = scenes[k];
    TrainingSet part = build_training_set(s.image.combined, s.labels, cfg.negatives_per_positive,
                                          keyed_hash(cfg.seed, 0x7363656e65ull, k), cfg.descriptor,
                                          &s.image.valid);
    part.provenance.assign(1, s.name);
    ts.append(part);
  }
  SvmHyper hyper = cfg.svm;
  hyper.seed = cfg.seed;
  return train(ts, hyper, cfg.descriptor);
}

ClassifierMetrics pixel_metrics(const SvmModel& model, const LabeledScene& scene, double threshold) {
  if (!scene.labels.same_shape(scene.image.combined)) {
    throw ConfigError("label mask and image differ in size");
  }
  const ScoreMap sm = score_map(scene.image, model, threshold);
  ClassifierMetrics m;
  for (std::size_t i = 0; i < sm.mask.size(); ++i) {
    if (!scene.image.valid[i]) continue;
    const bool truth = scene.labels[i] == Label::wrinkle;
    const bool said = sm.mask[i] != 0;
    if (truth) {
      ++m.positives;
      m.true_positives += said;
    } else {
      ++m.negatives;
      m.true_negatives += !said;
    }
  }
  return m;
}

}  // namespace wrinkle
