#pragma once

#include <span>
#include <string>
#include <vector>

#include "wrinkle/fusion.hpp"
#include "wrinkle/grid.hpp"

namespace wrinkle {

/// V-head iron over a foam underlay; force is reported from a linear spring model.
struct IronSpec {
  double long_axis = 0.20;      ///< m
  double short_axis = 0.12;     ///< m
  double press_depth = 0.01;    ///< m below the cloth surface
  double foam_thickness = 0.06; ///< m
  double foam_stiffness = 500;  ///< N/m
  double lift_height = 0.05;    ///< m
  double travel_speed = 0.10;   ///< m/s
  double slide_speed = 0.05;    ///< m/s
  double dwell_time = 2.0;      ///< s per static press

  void validate() const;
  double force() const { return foam_stiffness * press_depth; }
};

enum class Motion { static_press, sliding };

const char* to_string(Motion m);

struct IronAction {
  Motion kind = Motion::static_press;
  int wrinkle_id = 0;
  int piece = 0;
  double p = 0.0;
  double align_angle = 0.0;  ///< wrinkle direction in [0, pi)
  Vec2 start;                ///< entry point (midpoint for static presses)
  Vec2 end;                  ///< exit point
  double duration = 0.0;     ///< s
  double force = 0.0;        ///< N
};

struct IroningPlan {
  Vec2 home;
  std::vector<IronAction> actions;
  double transit_distance = 0.0;  ///< m, home and between actions
  double slide_distance = 0.0;    ///< m, while pressed
  double total_travel = 0.0;      ///< transit + slide
  double total_time = 0.0;        ///< s
};

/// Splits into ceil(L / (2 long_axis)) equal collinear pieces when L > 2 long_axis.
std::vector<FusedWrinkle> split_wrinkle(const FusedWrinkle& w, const IronSpec& iron);

/// Static iff the wrinkle is shorter than 70% of the iron's long axis.
Motion select_motion(const FusedWrinkle& w, const IronSpec& iron);

/// Greedy nearest-endpoint ordering starting from the highest-p wrinkle.
IroningPlan order_actions(std::span<const FusedWrinkle> ws, const IronSpec& iron, Vec2 home);

/// Keeps accepted wrinkles, splits long ones, then orders them.
IroningPlan plan_ironing(std::span<const FusedWrinkle> fused, const IronSpec& iron, Vec2 home);

enum class WaypointStage { approach, press, slide_end, retract };

const char* to_string(WaypointStage s);

struct Waypoint {
  int action = 0;
  WaypointStage stage = WaypointStage::approach;
  Motion kind = Motion::static_press;
  Vec2 xy;
  double z = 0.0;
  double angle = 0.0;
  double time = 0.0;  ///< s from the start of the plan
};

/// Approach, press, optional slide and retract for each action; z follows the surface.
std::vector<Waypoint> emit_waypoints(const IroningPlan& plan, const IronSpec& iron,
                                     const FloatGrid& surface);

/// Bilinear surface height at a world point; throws StageError outside the grid.
double surface_height(const FloatGrid& surface, Vec2 world);

/// Home-to-first plus consecutive waypoint xy distances.
double waypoint_travel(Vec2 home, std::span<const Waypoint> waypoints);

/// CSV with header "t,x,y,z,angle,kind".
std::string waypoints_csv(std::span<const Waypoint> waypoints);

}  // namespace wrinkle
