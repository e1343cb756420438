#include <regex>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "wrinkle/digest.hpp"
#include "wrinkle/error.hpp"
#include "wrinkle/overlay.hpp"
#include "wrinkle/report.hpp"

using namespace wrinkle;
using nlohmann::json;

namespace {

const DetectResult& reference_result() {
  static const DetectResult r =
      run_detect(render_scene(scenes::reference()), testing::trained_model(), PipelineConfig{});
  return r;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++n;
  return n;
}

/// Every opening tag has its matching close, in order. Enough for the
/// overlay, which has no CDATA and no '>' in attribute values.
bool balanced_xml(const std::string& text) {
  std::vector<std::string> open;
  const std::regex tag(R"(<(/?)([A-Za-z][\w:-]*)[^>]*?(/?)>)");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), tag); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (m[3].length() > 0) continue;
    if (m[1].length() == 0) {
      open.push_back(m[2]);
    } else {
      if (open.empty() || open.back() != m[2]) return false;
      open.pop_back();
    }
  }
  return open.empty();
}

}  // namespace

TEST_CASE("sha256 known answers") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("reference scene detection") {
  const DetectResult& r = reference_result();
  CHECK(r.bumps.bumps.size() == 2);
  CHECK(r.mixture.size() == 2);
  std::size_t accepted = 0;
  for (const auto& w : r.wrinkles) accepted += w.accepted;
  CHECK(accepted == 1);
  REQUIRE(r.plan.actions.size() == 1);
  CHECK(r.waypoints.size() == 4);
}

TEST_CASE("report layout") {
  const DetectResult& r = reference_result();
  const std::vector<InputDigest> inputs = {{"height", "h.fgrid", sha256_hex("h")}};
  const json rep = make_report(r, PipelineConfig{}, inputs, false);
  for (const char* key : {"schema_version", "inputs", "config", "grid", "bumps", "mixture", "wrinkles",
                          "plan", "diagnostics"}) {
    CHECK(rep.contains(key));
  }
  CHECK_FALSE(rep.contains("timings_ms"));
  CHECK(rep["schema_version"] == kReportSchemaVersion);
  CHECK(rep["inputs"]["height"]["sha256"] == sha256_hex("h"));
  CHECK(rep["config"]["fusion.p_min"] == "0.3");
  CHECK(rep["wrinkles"].size() == r.wrinkles.size());
  CHECK(rep["plan"]["actions"].size() == 1);
  CHECK(make_report(r, PipelineConfig{}, inputs, true).contains("timings_ms"));
}

TEST_CASE("repeated detection gives a byte-identical report") {
  const PipelineConfig cfg;
  const SceneImages scene = render_scene(scenes::reference());
  const std::string a = dump_report(make_report(run_detect(scene, testing::trained_model(), cfg), cfg, {}, false));
  const std::string b = dump_report(make_report(run_detect(scene, testing::trained_model(), cfg), cfg, {}, false));
  CHECK(a == b);
  CHECK(a.back() == '\n');
  CHECK(dump_report(parse_report(a)) == a);
}

TEST_CASE("parse_report rejects bad input") {
  CHECK_THROWS_AS(parse_report("{not json"), FormatError);
  CHECK_THROWS_AS(parse_report("[1, 2]"), FormatError);
  CHECK_THROWS_AS(parse_report(R"({"wrinkles": []})"), FormatError);
  CHECK_THROWS_AS(parse_report(R"({"schema_version": 99})"), FormatError);
  CHECK_THROWS_AS(wrinkles_from_report(json{{"wrinkles", json::array({json{{"id", 1}}})}}), FormatError);
}

TEST_CASE("wrinkles survive a report round trip") {
  const DetectResult& r = reference_result();
  const json rep = parse_report(dump_report(make_report(r, PipelineConfig{}, {}, false)));
  const auto back = wrinkles_from_report(rep);
  REQUIRE(back.size() == r.wrinkles.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].id() == r.wrinkles[i].id());
    CHECK(back[i].p == r.wrinkles[i].p);
    CHECK(back[i].accepted == r.wrinkles[i].accepted);
    CHECK(back[i].discontinuity.world.a == r.wrinkles[i].discontinuity.world.a);
    CHECK(back[i].discontinuity.support.size() == r.wrinkles[i].discontinuity.support.size());
  }
}

TEST_CASE("replanning under a stricter threshold") {
  const DetectResult& r = reference_result();
  json rep = make_report(r, PipelineConfig{}, {}, true);
  const json original = rep;

  replan_report(rep, render_scene(scenes::reference()).height, PipelineConfig{});
  CHECK(rep["plan"] == original["plan"]);
  CHECK(rep["wrinkles"] == original["wrinkles"]);
  CHECK_FALSE(rep.contains("timings_ms"));

  PipelineConfig strict;
  strict.fusion.p_min = 1.0;
  replan_report(rep, render_scene(scenes::reference()).height, strict);
  CHECK(rep["plan"]["actions"].empty());
  for (const auto& w : rep["wrinkles"]) CHECK_FALSE(w["accepted"].get<bool>());
  CHECK(rep["config"]["fusion.p_min"] == "1");
}

TEST_CASE("overlay markup") {
  const SceneImages scene = render_scene(scenes::reference());
  const json rep = make_report(reference_result(), PipelineConfig{}, {}, false);
  const std::string svg = render_overlay(rep, scene.height);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(balanced_xml(svg));
  CHECK(count(svg, "<text") == rep["plan"]["actions"].size());
  CHECK(count(svg, "<ellipse") == 2 * rep["bumps"].size());

  std::size_t sliding = 0;
  for (const auto& a : rep["plan"]["actions"]) sliding += a["kind"] == "sliding";
  CHECK(count(svg, "marker-end") == sliding);

  const std::string bare = render_overlay(json::object(), scene.height);
  CHECK(balanced_xml(bare));
  CHECK(count(bare, "<line") == 0);
  CHECK(count(bare, "<ellipse") == 0);
  CHECK(count(bare, "<rect") > 0);

  CHECK_THROWS_AS(render_overlay(json{{"bumps", json::array({json::object()})}}, scene.height), FormatError);
}

TEST_CASE("flat scene has nothing to iron") {
  const PipelineConfig cfg;
  const DetectResult r = run_detect(render_scene(scenes::blank(200, 150, 1)), testing::trained_model(), cfg);
  CHECK(r.bumps.bumps.empty());
  CHECK(r.plan.actions.empty());
  CHECK(r.waypoints.empty());
}
