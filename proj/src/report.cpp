#include "wrinkle/report.hpp"

#include <sstream>

#include "wrinkle/error.hpp"

using nlohmann::json;

namespace wrinkle {
namespace {

json point(Vec2 p) { return json::array({p.x, p.y}); }

Vec2 to_point(const json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("report: expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json wrinkle_json(const FusedWrinkle& w) {
  const Discontinuity& d = w.discontinuity;
  json support = json::array();
  for (const auto& s : d.support) support.push_back(json::array({s.u, s.v, s.score}));
  return {{"id", d.id},
          {"endpoints", json::array({point(d.world.a), point(d.world.b)})},
          {"pixel_endpoints", json::array({point(d.pixel.a), point(d.pixel.b)})},
          {"length", d.length},
          {"direction", d.direction},
          {"rho", d.rho},
          {"theta", d.theta},
          {"support", std::move(support)},
          {"q", w.q},
          {"r", w.r},
          {"p", w.p},
          {"accepted", w.accepted}};
}

json plan_json(const PlanOutput& out) {
  const IroningPlan& plan = out.plan;
  json actions = json::array();
  for (std::size_t k = 0; k < plan.actions.size(); ++k) {
    const IronAction& a = plan.actions[k];
    actions.push_back({{"order", k + 1},
                       {"kind", to_string(a.kind)},
                       {"wrinkle_id", a.wrinkle_id},
                       {"piece", a.piece},
                       {"p", a.p},
                       {"align_angle", a.align_angle},
                       {"start", point(a.start)},
                       {"end", point(a.end)},
                       {"duration", a.duration},
                       {"force", a.force}});
  }
  json waypoints = json::array();
  for (const Waypoint& w : out.waypoints) {
    waypoints.push_back({{"action", w.action},
                         {"stage", to_string(w.stage)},
                         {"kind", to_string(w.kind)},
                         {"xy", point(w.xy)},
                         {"z", w.z},
                         {"angle", w.angle},
                         {"time", w.time}});
  }
  return {{"home", point(plan.home)},
          {"actions", std::move(actions)},
          {"waypoints", std::move(waypoints)},
          {"totals",
           {{"transit_distance", plan.transit_distance},
            {"slide_distance", plan.slide_distance},
            {"total_travel", plan.total_travel},
            {"total_time", plan.total_time}}}};
}

json config_json(const PipelineConfig& cfg) {
  json config = json::object();
  std::istringstream lines(format_config(cfg));
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find(" = ");
    config[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return config;
}

}  // namespace

json make_report(const DetectResult& r, const PipelineConfig& cfg,
                 std::span<const InputDigest> inputs, bool with_timings) {
  json rep;
  rep["schema_version"] = kReportSchemaVersion;

  json in = json::object();
  for (const auto& d : inputs) in[d.role] = {{"path", d.path}, {"sha256", d.sha256}};
  rep["inputs"] = std::move(in);

  rep["config"] = config_json(cfg);

  rep["grid"] = {{"width", r.width},
                 {"height", r.height},
                 {"cell_size", r.transform.cell_size},
                 {"origin", point(r.transform.origin)}};

  json bumps = json::array();
  for (const HeightBump& b : r.bumps.bumps) {
    bumps.push_back({{"id", b.id},
                     {"center", point(b.center)},
                     {"volume", b.volume},
                     {"d1", b.d1},
                     {"d2", b.d2},
                     {"orientation", b.orientation},
                     {"peak", b.peak},
                     {"pixels", b.pixels.size()}});
  }
  rep["bumps"] = std::move(bumps);

  json mixture = json::array();
  for (const MixtureComponent& c : r.mixture.components) {
    mixture.push_back({{"bump_id", c.bump_id},
                       {"mean", point(c.mean)},
                       {"covariance", json::array({c.covariance.xx, c.covariance.xy, c.covariance.yy})}});
  }
  rep["mixture"] = std::move(mixture);

  json wrinkles = json::array();
  for (const FusedWrinkle& w : r.wrinkles) wrinkles.push_back(wrinkle_json(w));
  rep["wrinkles"] = std::move(wrinkles);

  rep["plan"] = plan_json({r.plan, r.waypoints});

  const BumpDiagnostics& bd = r.bumps.diagnostics;
  rep["diagnostics"] = {{"bump_points", bd.bump_points},
                        {"components", bd.components},
                        {"degenerate_components", bd.degenerate},
                        {"below_min_volume", bd.below_volume},
                        {"rejected_mixture_components", r.rejected_components},
                        {"classified_pixels", r.mask_pixels},
                        {"invalid_pixels", r.invalid_pixels},
                        {"segments", r.segments}};

  if (with_timings) {
    json t = json::object();
    for (const auto& s : r.timings) t[s.stage] = s.ms;
    rep["timings_ms"] = std::move(t);
  }
  return rep;
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

json parse_report(const std::string& text) {
  json rep;
  try {
    rep = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("report is not valid JSON: ") + e.what());
  }
  if (!rep.is_object() || !rep.contains("schema_version")) {
    throw FormatError("report lacks schema_version");
  }
  if (rep["schema_version"] != kReportSchemaVersion) {
    throw FormatError("unsupported report schema_version " + rep["schema_version"].dump());
  }
  return rep;
}

std::vector<FusedWrinkle> wrinkles_from_report(const json& report) {
  std::vector<FusedWrinkle> out;
  try {
    for (const json& j : report.at("wrinkles")) {
      FusedWrinkle w;
      Discontinuity& d = w.discontinuity;
      d.id = j.at("id").get<int>();
      d.world = {to_point(j.at("endpoints").at(0)), to_point(j.at("endpoints").at(1))};
      d.pixel = {to_point(j.at("pixel_endpoints").at(0)), to_point(j.at("pixel_endpoints").at(1))};
      d.length = j.at("length").get<double>();
      d.direction = j.at("direction").get<double>();
      d.rho = j.at("rho").get<double>();
      d.theta = j.at("theta").get<double>();
      for (const json& s : j.at("support")) {
        d.support.push_back({s.at(0).get<int>(), s.at(1).get<int>(), s.at(2).get<double>()});
      }
      w.q = j.at("q").get<double>();
      w.r = j.at("r").get<double>();
      w.p = j.at("p").get<double>();
      w.accepted = j.at("accepted").get<bool>();
      out.push_back(std::move(w));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("report wrinkles malformed: ") + e.what());
  }
  return out;
}

void replan_report(json& report, const FloatGrid& height, const PipelineConfig& cfg) {
  std::vector<FusedWrinkle> wrinkles = wrinkles_from_report(report);
  for (FusedWrinkle& w : wrinkles) w.accepted = w.p >= cfg.fusion.p_min;
  const PlanOutput plan = make_plan(wrinkles, height, cfg);
  json ws = json::array();
  for (const FusedWrinkle& w : wrinkles) ws.push_back(wrinkle_json(w));
  report["wrinkles"] = std::move(ws);
  report["plan"] = plan_json(plan);
  report["config"] = config_json(cfg);
  report.erase("timings_ms");
}

}  // namespace wrinkle
