#include "wrinkle/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "wrinkle/error.hpp"

namespace wrinkle {

void IronSpec::validate() const {
  if (!(long_axis > short_axis) || !(short_axis > 0.0)) {
    throw ConfigError("iron requires long_axis > short_axis > 0");
  }
  if (!(press_depth > 0.0) || !(press_depth < foam_thickness)) {
    throw ConfigError("iron requires 0 < press_depth < foam_thickness");
  }
  if (!(lift_height > 0.0)) throw ConfigError("iron requires lift_height > 0");
  if (!(travel_speed > 0.0) || !(slide_speed > 0.0)) throw ConfigError("iron speeds must be > 0");
  if (dwell_time < 0.0 || foam_stiffness < 0.0) throw ConfigError("iron dwell/stiffness must be >= 0");
}

const char* to_string(Motion m) { return m == Motion::sliding ? "sliding" : "static"; }

const char* to_string(WaypointStage s) {
  switch (s) {
    case WaypointStage::approach: return "approach";
    case WaypointStage::press: return "press";
    case WaypointStage::slide_end: return "slide_end";
    case WaypointStage::retract: return "retract";
  }
  return "?";
}

std::vector<FusedWrinkle> split_wrinkle(const FusedWrinkle& w, const IronSpec& iron) {
  const double len = w.length();
  const double bound = 2.0 * iron.long_axis;
  if (len <= bound) return {w};
  const int pieces = static_cast<int>(std::ceil(len / bound));
  const Discontinuity& d = w.discontinuity;
  const Vec2 dir_pix = d.pixel.b - d.pixel.a;
  const double len2 = dot(dir_pix, dir_pix);

  std::vector<FusedWrinkle> out;
  for (int k = 0; k < pieces; ++k) {
    const double t0 = static_cast<double>(k) / pieces;
    const double t1 = static_cast<double>(k + 1) / pieces;
    FusedWrinkle piece = w;
    piece.piece = k;
    Discontinuity& pd = piece.discontinuity;
    pd.world = {lerp(d.world.a, d.world.b, t0), lerp(d.world.a, d.world.b, t1)};
    pd.pixel = {lerp(d.pixel.a, d.pixel.b, t0), lerp(d.pixel.a, d.pixel.b, t1)};
    pd.length = pd.world.length();
    pd.support.clear();
    for (const auto& px : d.support) {
      const double t = len2 > 0 ? dot(Vec2{double(px.u), double(px.v)} - d.pixel.a, dir_pix) / len2 : 0.0;
      const int bucket = std::clamp(static_cast<int>(std::floor(t * pieces)), 0, pieces - 1);
      if (bucket == k) pd.support.push_back(px);
    }
    out.push_back(std::move(piece));
  }
  return out;
}

Motion select_motion(const FusedWrinkle& w, const IronSpec& iron) {
  return w.length() < 0.7 * iron.long_axis ? Motion::static_press : Motion::sliding;
}

IroningPlan order_actions(std::span<const FusedWrinkle> ws, const IronSpec& iron, Vec2 home) {
  iron.validate();
  IroningPlan plan;
  plan.home = home;
  if (ws.empty()) return plan;

  const std::size_t n = ws.size();
  std::vector<std::size_t> by_rank(n);
  for (std::size_t i = 0; i < n; ++i) by_rank[i] = i;
  auto key_less = [&](std::size_t a, std::size_t b) {
    if (ws[a].id() != ws[b].id()) return ws[a].id() < ws[b].id();
    return ws[a].piece < ws[b].piece;
  };
  const std::size_t first = *std::min_element(by_rank.begin(), by_rank.end(), [&](auto a, auto b) {
    if (ws[a].p != ws[b].p) return ws[a].p > ws[b].p;
    return key_less(a, b);
  });

  std::vector<std::uint8_t> done(n, 0);
  Vec2 pos = home;
  auto visit = [&](std::size_t i, int endpoint) {
    const FusedWrinkle& w = ws[i];
    const Segment& seg = w.discontinuity.world;
    IronAction a;
    a.kind = select_motion(w, iron);
    a.wrinkle_id = w.id();
    a.piece = w.piece;
    a.p = w.p;
    a.align_angle = seg.direction();
    a.force = iron.force();
    if (a.kind == Motion::static_press) {
      a.start = a.end = seg.midpoint();
    } else {
      a.start = endpoint == 0 ? seg.a : seg.b;
      a.end = endpoint == 0 ? seg.b : seg.a;
    }
    const double vertical = 2.0 * (iron.lift_height + iron.press_depth) / iron.travel_speed;
    const double slide = distance(a.start, a.end);
    a.duration = vertical + (a.kind == Motion::sliding ? slide / iron.slide_speed : iron.dwell_time);
    const double transit = distance(pos, a.start);
    plan.transit_distance += transit;
    plan.slide_distance += slide;
    plan.total_time += transit / iron.travel_speed + a.duration;
    plan.actions.push_back(a);
    done[i] = 1;
    pos = a.end;
  };

  {
    const Segment& seg = ws[first].discontinuity.world;
    visit(first, distance(home, seg.b) < distance(home, seg.a) ? 1 : 0);
  }
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t best = n;
    int best_end = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      const Segment& seg = ws[i].discontinuity.world;
      const bool is_static = select_motion(ws[i], iron) == Motion::static_press;
      const Vec2 cands[2] = {is_static ? seg.midpoint() : seg.a, seg.b};
      for (int e = 0; e < (is_static ? 1 : 2); ++e) {
        const double d = distance(pos, cands[e]);
        if (d < best_d || (d == best_d && best < n && key_less(i, best))) {
          best_d = d;
          best = i;
          best_end = e;
        }
      }
    }
    visit(best, best_end);
  }
  plan.total_travel = plan.transit_distance + plan.slide_distance;
  return plan;
}

IroningPlan plan_ironing(std::span<const FusedWrinkle> fused, const IronSpec& iron, Vec2 home) {
  std::vector<FusedWrinkle> pieces;
  for (const auto& f : fused) {
    if (!f.accepted) continue;
    for (auto& piece : split_wrinkle(f, iron)) pieces.push_back(std::move(piece));
  }
  return order_actions(pieces, iron, home);
}

double surface_height(const FloatGrid& surface, Vec2 world) {
  const Vec2 px = surface.transform().to_pixel(world);
  const double eps = 1e-9;
  if (!(px.x >= -eps && px.y >= -eps && px.x <= surface.width() - 1 + eps &&
        px.y <= surface.height() - 1 + eps)) {
    throw StageError("plan", "action point outside the surface grid");
  }
  const double x = std::clamp(px.x, 0.0, surface.width() - 1.0);
  const double y = std::clamp(px.y, 0.0, surface.height() - 1.0);
  const int u0 = std::min(static_cast<int>(x), surface.width() - 2);
  const int v0 = std::min(static_cast<int>(y), surface.height() - 2);
  const double fx = x - u0;
  const double fy = y - v0;
  return (1 - fx) * (1 - fy) * surface(u0, v0) + fx * (1 - fy) * surface(u0 + 1, v0) +
         (1 - fx) * fy * surface(u0, v0 + 1) + fx * fy * surface(u0 + 1, v0 + 1);
}

std::vector<Waypoint> emit_waypoints(const IroningPlan& plan, const IronSpec& iron,
                                     const FloatGrid& surface) {
  std::vector<Waypoint> out;
  Vec2 pos = plan.home;
  double t = 0.0;
  const double vertical = (iron.lift_height + iron.press_depth) / iron.travel_speed;
  for (std::size_t k = 0; k < plan.actions.size(); ++k) {
    const IronAction& a = plan.actions[k];
    const double z_start = surface_height(surface, a.start);
    const double z_end = surface_height(surface, a.end);
    auto push = [&](WaypointStage stage, Vec2 xy, double z) {
      out.push_back({static_cast<int>(k), stage, a.kind, xy, z, a.align_angle, t});
    };
    t += distance(pos, a.start) / iron.travel_speed;
    push(WaypointStage::approach, a.start, z_start + iron.lift_height);
    t += vertical;
    push(WaypointStage::press, a.start, z_start - iron.press_depth);
    if (a.kind == Motion::sliding) {
      t += distance(a.start, a.end) / iron.slide_speed;
      push(WaypointStage::slide_end, a.end, z_end - iron.press_depth);
    } else {
      t += iron.dwell_time;
    }
    t += vertical;
    push(WaypointStage::retract, a.end, z_end + iron.lift_height);
    pos = a.end;
  }
  return out;
}

double waypoint_travel(Vec2 home, std::span<const Waypoint> waypoints) {
  double total = 0.0;
  Vec2 pos = home;
  for (const auto& w : waypoints) {
    total += distance(pos, w.xy);
    pos = w.xy;
  }
  return total;
}

std::string waypoints_csv(std::span<const Waypoint> waypoints) {
  std::ostringstream os;
  os << "t,x,y,z,angle,kind\n";
  char buf[256];
  for (const auto& w : waypoints) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.6f,%s\n", w.time, w.xy.x, w.xy.y, w.z,
                  w.angle, to_string(w.kind));
    os << buf;
  }
  return os.str();
}

}  // namespace wrinkle
