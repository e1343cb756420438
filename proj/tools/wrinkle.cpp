// wrinkle: command-line front end for the detection and planning pipeline.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wrinkle/classify.hpp"
#include "wrinkle/config.hpp"
#include "wrinkle/digest.hpp"
#include "wrinkle/error.hpp"
#include "wrinkle/gridio.hpp"
#include "wrinkle/overlay.hpp"
#include "wrinkle/parallel.hpp"
#include "wrinkle/pipeline.hpp"
#include "wrinkle/report.hpp"
#include "wrinkle/scenes.hpp"
#include "wrinkle/synth.hpp"

namespace fs = std::filesystem;
using namespace wrinkle;

namespace {

constexpr int kStageFailure = 1;
constexpr int kUsage = 2;

// Missing inputs are usage errors, not stage failures.
void require_file(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
}

PipelineConfig config_from(const std::string& path) {
  if (path.empty()) return {};
  require_file(path, "config");
  return load_config(path);
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_file_atomic(out, text);
  }
}

int cmd_synth(const std::string& spec_path, const std::string& outdir) {
  require_file(spec_path, "scene spec");
  const SceneSpec spec = load_scene_spec(spec_path);
  write_scene(spec, outdir);
  return 0;
}

int cmd_scene(const std::string& preset, std::uint64_t seed, const std::string& out) {
  emit(format_scene_spec(scenes::by_name(preset, seed)), out);
  return 0;
}

void print_metrics(const char* label, const ClassifierMetrics& m) {
  std::printf("%s pixel accuracy %.4f, wrinkle recall %.4f (%zu wrinkle / %zu other pixels)\n", label,
              m.accuracy(), m.recall(), m.positives, m.negatives);
}

int cmd_train(const std::string& corpus, const std::string& model_out, const std::string& config,
              const std::string& holdout) {
  const PipelineConfig cfg = config_from(config);
  const auto dirs = corpus_scenes(corpus);
  if (dirs.empty()) throw StageError("train", "corpus " + corpus + " contains no labeled scenes");

  // Without a separate held-out corpus the last fifth of the scenes is held out.
  std::vector<fs::path> train_dirs = dirs, test_dirs;
  if (!holdout.empty()) {
    test_dirs = corpus_scenes(holdout);
    if (test_dirs.empty()) throw StageError("train", "held-out corpus " + holdout + " is empty");
  } else if (dirs.size() >= 2) {
    const std::size_t n_test = (dirs.size() + 4) / 5;
    test_dirs.assign(dirs.end() - static_cast<std::ptrdiff_t>(n_test), dirs.end());
    train_dirs.resize(dirs.size() - n_test);
  }

  std::vector<LabeledScene> train_scenes;
  for (const auto& d : train_dirs) train_scenes.push_back(load_labeled_scene(d, cfg));
  const SvmModel model = train_on(train_scenes, cfg);
  save_model(model, fs::path(model_out));

  std::printf("trained on %zu scene(s)\n", train_scenes.size());
  if (test_dirs.empty()) {
    ClassifierMetrics m;
    for (const auto& s : train_scenes) m.add(pixel_metrics(model, s, cfg.score_threshold));
    print_metrics("training", m);
  } else {
    ClassifierMetrics m;
    for (const auto& d : test_dirs) {
      m.add(pixel_metrics(model, load_labeled_scene(d, cfg), cfg.score_threshold));
    }
    std::printf("held out %zu scene(s)\n", test_dirs.size());
    print_metrics("held-out", m);
  }
  return 0;
}

struct DetectArgs {
  std::string dir, height, light1, light2, ref1, ref2, model, config, out, csv;
  bool timings = false;
};

int cmd_detect(DetectArgs a) {
  if (!a.dir.empty()) {
    const SceneFiles f = SceneFiles::in(a.dir);
    if (a.height.empty()) a.height = f.height.string();
    if (a.light1.empty()) a.light1 = f.light1.string();
    if (a.light2.empty()) a.light2 = f.light2.string();
    if (a.ref1.empty()) a.ref1 = f.ref1.string();
    if (a.ref2.empty()) a.ref2 = f.ref2.string();
  }
  const std::vector<std::pair<const char*, std::string*>> files = {
      {"height", &a.height}, {"light1", &a.light1}, {"light2", &a.light2},
      {"ref1", &a.ref1},     {"ref2", &a.ref2},     {"model", &a.model}};
  std::vector<InputDigest> digests;
  for (const auto& [role, path] : files) {
    if (path->empty()) throw ConfigError(std::string("missing --") + role + " (or --dir)");
    require_file(*path, role);
    digests.push_back({role, *path, sha256_file(*path)});
  }
  const PipelineConfig cfg = config_from(a.config);
  if (!a.config.empty()) digests.push_back({"config", a.config, sha256_file(a.config)});

  SceneImages scene;
  SvmModel model;
  try {
    scene = load_scene_images({a.height, a.light1, a.light2, a.ref1, a.ref2, {}});
    model = load_model(fs::path(a.model));
  } catch (const FormatError& e) {
    throw StageError("load", e.what());
  }
  const DetectResult r = run_detect(scene, model, cfg);
  emit(dump_report(make_report(r, cfg, digests, a.timings)), a.out);
  if (!a.csv.empty()) write_file_atomic(a.csv, waypoints_csv(r.waypoints));
  return 0;
}

int cmd_plan(const std::string& report_path, const std::string& height, const std::string& config,
             const std::string& out, const std::string& csv) {
  require_file(report_path, "report");
  require_file(height, "height map");
  const PipelineConfig cfg = config_from(config);
  nlohmann::json report;
  FloatGrid surface;
  try {
    report = parse_report(read_file(report_path));
    surface = read_grid(fs::path(height));
  } catch (const FormatError& e) {
    throw StageError("load", e.what());
  }
  try {
    replan_report(report, surface, cfg);
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError("planner", e.what());
  }
  emit(dump_report(report), out);
  if (!csv.empty()) {
    const PlanOutput plan = make_plan(wrinkles_from_report(report), surface, cfg);
    write_file_atomic(csv, waypoints_csv(plan.waypoints));
  }
  return 0;
}

int cmd_overlay(const std::string& report_path, const std::string& height, const std::string& out) {
  require_file(report_path, "report");
  require_file(height, "height map");
  std::string svg;
  try {
    svg = render_overlay(parse_report(read_file(report_path)), read_grid(fs::path(height)));
  } catch (const FormatError& e) {
    throw StageError("overlay", e.what());
  }
  emit(svg, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wrinkle detection and ironing path planning"};
  app.require_subcommand(1);

  std::string spec_path, outdir;
  auto* synth = app.add_subcommand("synth", "Render a scene spec into height, light, reference and label files");
  synth->add_option("specfile", spec_path, "Scene description (key = value lines)")->required();
  synth->add_option("outdir", outdir, "Output directory")->required();

  std::string preset, scene_out;
  std::uint64_t scene_seed = 1;
  auto* scene = app.add_subcommand("scene", "Print a built-in scene spec");
  scene->add_option("preset", preset, "bump, ridge, training, fusion or reference")->required();
  scene->add_option("--seed", scene_seed, "Scene seed");
  scene->add_option("-o,--out", scene_out, "Output file (default stdout)");

  std::string corpus, model_out, train_config, holdout;
  auto* train = app.add_subcommand("train", "Train the pixel classifier on a corpus of labeled scenes");
  train->add_option("corpus", corpus, "Directory of scene directories")->required();
  train->add_option("model", model_out, "Model file to write")->required();
  train->add_option("-c,--config", train_config, "Pipeline config file");
  train->add_option("--holdout", holdout, "Separate corpus for held-out evaluation");

  DetectArgs det;
  auto* detect = app.add_subcommand("detect", "Detect bumps and wrinkles and plan ironing; writes a JSON report");
  detect->add_option("--dir", det.dir, "Scene directory with the standard file names");
  detect->add_option("--height", det.height, "Height map (FGRID)");
  detect->add_option("--light1", det.light1, "Image under light 1 (PGM)");
  detect->add_option("--light2", det.light2, "Image under light 2 (PGM)");
  detect->add_option("--ref1", det.ref1, "Flat reference under light 1 (PGM)");
  detect->add_option("--ref2", det.ref2, "Flat reference under light 2 (PGM)");
  detect->add_option("-m,--model", det.model, "Classifier model (SVMW)")->required();
  detect->add_option("-c,--config", det.config, "Pipeline config file");
  detect->add_option("-o,--out", det.out, "Report file (default stdout)");
  detect->add_option("--waypoints", det.csv, "Also write waypoints as CSV");
  detect->add_flag("--timings", det.timings, "Include per-stage timings in the report");

  std::string plan_report, plan_height, plan_config, plan_out, plan_csv;
  auto* plan = app.add_subcommand("plan", "Re-plan the wrinkles of an existing report");
  plan->add_option("report", plan_report, "Report from detect")->required();
  plan->add_option("--height", plan_height, "Height map (FGRID) for waypoint z")->required();
  plan->add_option("-c,--config", plan_config, "Pipeline config file");
  plan->add_option("-o,--out", plan_out, "Report file (default stdout)");
  plan->add_option("--waypoints", plan_csv, "Also write waypoints as CSV");

  std::string ov_report, ov_height, ov_out;
  auto* overlay = app.add_subcommand("overlay", "Render a report over its height map as SVG");
  overlay->add_option("report", ov_report, "Report from detect or plan")->required();
  overlay->add_option("--height", ov_height, "Height map (FGRID)")->required();
  overlay->add_option("-o,--out", ov_out, "SVG file (default stdout)");

  std::string cfg_out;
  auto* config = app.add_subcommand("config", "Print the default pipeline config");
  config->add_option("-o,--out", cfg_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    apply_thread_env();
    if (*synth) return cmd_synth(spec_path, outdir);
    if (*scene) return cmd_scene(preset, scene_seed, scene_out);
    if (*train) return cmd_train(corpus, model_out, train_config, holdout);
    if (*detect) return cmd_detect(det);
    if (*plan) return cmd_plan(plan_report, plan_height, plan_config, plan_out, plan_csv);
    if (*overlay) return cmd_overlay(ov_report, ov_height, ov_out);
    if (*config) {
      emit(format_config(PipelineConfig{}), cfg_out);
      return 0;
    }
  } catch (const StageError& e) {
    std::cerr << "wrinkle: " << e.what() << '\n';
    return kStageFailure;
  } catch (const ConfigError& e) {
    std::cerr << "wrinkle: " << e.what() << '\n';
    return kUsage;
  } catch (const FormatError& e) {
    std::cerr << "wrinkle: load: " << e.what() << '\n';
    return kStageFailure;
  } catch (const std::exception& e) {
    std::cerr << "wrinkle: " << e.what() << '\n';
    return kStageFailure;
  }
  return kUsage;
}
