#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "wrinkle/scenes.hpp"
#include "wrinkle/synth.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kScratch = WRINKLE_SCRATCH;

/// Runs the CLI with the given arguments; stdout and stderr go to files in the
/// scratch directory. Returns the exit status.
int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + WRINKLE_CLI + "\" " + args + " >\"" +
                          (kScratch / "stdout.txt").string() + "\" 2>\"" +
                          (kScratch / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

/// Scratch directory shared by the cases of this binary, created once.
const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::remove_all(kScratch);
    fs::create_directories(kScratch);
    return kScratch;
  }();
  return dir;
}

/// Small corpus of three training scenes plus a trained model, built once.
const fs::path& corpus_model() {
  static const fs::path model = [] {
    const fs::path corpus = scratch() / "corpus";
    for (int s = 100; s < 103; ++s) {
      const fs::path spec = scratch() / ("training-" + std::to_string(s) + ".scene");
      REQUIRE(run_cli("scene training --seed " + std::to_string(s) + " -o " + q(spec)) == 0);
      REQUIRE(run_cli("synth " + q(spec) + " " + q(corpus / ("s" + std::to_string(s)))) == 0);
    }
    const fs::path m = scratch() / "model.svmw";
    REQUIRE(run_cli("train " + q(corpus) + " " + q(m)) == 0);
    return m;
  }();
  return model;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  scratch();
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("synth") == 2);
  CHECK(run_cli("synth " + q(scratch() / "missing.scene") + " " + q(scratch() / "out")) == 2);
  CHECK(run_cli("detect --dir " + q(scratch() / "nowhere") + " -m " + q(scratch() / "none.svmw")) == 2);

  const fs::path bad_cfg = scratch() / "bad.cfg";
  std::ofstream(bad_cfg) << "colour = red\n";
  CHECK(run_cli("train " + q(scratch()) + " " + q(scratch() / "m.svmw") + " -c " + q(bad_cfg)) == 2);
  CHECK(slurp(scratch() / "stderr.txt").find("colour") != std::string::npos);
}

TEST_CASE("config subcommand prints every default") {
  REQUIRE(run_cli("config") == 0);
  const std::string text = slurp(scratch() / "stdout.txt");
  CHECK(text.find("fusion.p_min = 0.3\n") != std::string::npos);
  CHECK(text.find("plan.home = 0 0\n") != std::string::npos);
}

TEST_CASE("synth writes six deterministic files") {
  const fs::path spec = scratch() / "ridge.scene";
  REQUIRE(run_cli("scene ridge --seed 5 -o " + q(spec)) == 0);
  REQUIRE(run_cli("synth " + q(spec) + " " + q(scratch() / "ridge_a")) == 0);
  REQUIRE(run_cli("synth " + q(spec) + " " + q(scratch() / "ridge_b")) == 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(scratch() / "ridge_a")) {
    ++files;
    CHECK(slurp(e.path()) == slurp(scratch() / "ridge_b" / e.path().filename()));
  }
  CHECK(files == 6);

  const fs::path broken = scratch() / "broken.scene";
  std::ofstream(broken) << "width = 2\n";
  CHECK(run_cli("synth " + q(broken) + " " + q(scratch() / "broken")) == 2);
}

TEST_CASE("empty corpus is a stage failure") {
  fs::create_directories(scratch() / "empty_corpus");
  CHECK(run_cli("train " + q(scratch() / "empty_corpus") + " " + q(scratch() / "m.svmw")) == 1);
}

TEST_CASE("training twice gives the same model") {
  const fs::path& m = corpus_model();
  const fs::path again = scratch() / "model_again.svmw";
  REQUIRE(run_cli("train " + q(scratch() / "corpus") + " " + q(again)) == 0);
  CHECK(slurp(m) == slurp(again));
  CHECK(slurp(scratch() / "stdout.txt").find("held-out pixel accuracy") != std::string::npos);
}

TEST_CASE("detect, plan and overlay") {
  const fs::path& m = corpus_model();
  const fs::path spec = scratch() / "reference.scene";
  REQUIRE(run_cli("scene reference -o " + q(spec)) == 0);
  const fs::path dir = scratch() / "reference";
  REQUIRE(run_cli("synth " + q(spec) + " " + q(dir)) == 0);

  const fs::path r1 = scratch() / "r1.json", r2 = scratch() / "r2.json", csv = scratch() / "wp.csv";
  REQUIRE(run_cli("detect --dir " + q(dir) + " -m " + q(m) + " -o " + q(r1) + " --waypoints " + q(csv)) == 0);
  REQUIRE(run_cli("detect --dir " + q(dir) + " -m " + q(m) + " -o " + q(r2)) == 0);
  CHECK(slurp(r1) == slurp(r2));
  const auto rep = nlohmann::json::parse(slurp(r1));
  CHECK(rep["inputs"]["model"]["sha256"].get<std::string>().size() == 64);
  CHECK(slurp(csv).rfind("t,x,y,z,angle,kind\n", 0) == 0);

  const fs::path timed = scratch() / "timed.json";
  REQUIRE(run_cli("detect --dir " + q(dir) + " -m " + q(m) + " -o " + q(timed) + " --timings") == 0);
  CHECK(nlohmann::json::parse(slurp(timed)).contains("timings_ms"));

  const fs::path strict = scratch() / "strict.cfg";
  std::ofstream(strict) << "fusion.p_min = 1\n";
  const fs::path replanned = scratch() / "replanned.json";
  REQUIRE(run_cli("plan " + q(r1) + " --height " + q(dir / "height.fgrid") + " -c " + q(strict) + " -o " +
                  q(replanned)) == 0);
  CHECK(nlohmann::json::parse(slurp(replanned))["plan"]["actions"].empty());

  const fs::path svg = scratch() / "overlay.svg";
  REQUIRE(run_cli("overlay " + q(r1) + " --height " + q(dir / "height.fgrid") + " -o " + q(svg)) == 0);
  CHECK(slurp(svg).find("</svg>") != std::string::npos);

  std::ofstream(scratch() / "garbage.json") << "{]";
  CHECK(run_cli("overlay " + q(scratch() / "garbage.json") + " --height " + q(dir / "height.fgrid")) == 1);
  std::ofstream(scratch() / "garbage.svmw") << "nope";
  CHECK(run_cli("detect --dir " + q(dir) + " -m " + q(scratch() / "garbage.svmw")) == 1);
  CHECK(slurp(scratch() / "stderr.txt").find("load") != std::string::npos);
}

TEST_CASE("flat scene gives an empty plan") {
  const fs::path& m = corpus_model();
  const fs::path spec = scratch() / "flat.scene";
  std::ofstream(spec) << wrinkle::format_scene_spec(wrinkle::scenes::blank(160, 120, 3));
  REQUIRE(run_cli("synth " + q(spec) + " " + q(scratch() / "flat")) == 0);
  REQUIRE(run_cli("detect --dir " + q(scratch() / "flat") + " -m " + q(m)) == 0);
  const auto rep = nlohmann::json::parse(slurp(scratch() / "stdout.txt"));
  CHECK(rep["bumps"].empty());
  CHECK(rep["plan"]["actions"].empty());
}
