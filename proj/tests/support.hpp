#pragma once

// Shared fixtures for the test binaries and the acceptance runner.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "wrinkle/pipeline.hpp"
#include "wrinkle/rng.hpp"
#include "wrinkle/scenes.hpp"

namespace wrinkle::testing {

inline constexpr double kDegree = std::numbers::pi / 180.0;

inline constexpr std::uint64_t kFirstTrainingSeed = 100;
inline constexpr std::uint64_t kFirstHeldOutSeed = 200;

/// Classifier trained once per process on training scenes 100..109.
inline const SvmModel& trained_model() {
  static const SvmModel model = [] {
    const PipelineConfig cfg;
    std::vector<LabeledScene> scenes;
    for (std::uint64_t s = kFirstTrainingSeed; s < kFirstTrainingSeed + 10; ++s) {
      scenes.push_back(labeled_scene(scenes::training(s), "training-" + std::to_string(s), cfg));
    }
    return train_on(scenes, cfg);
  }();
  return model;
}

inline NormalizedImage normalized(const SceneSpec& spec) {
  const SceneImages s = render_scene(spec);
  return normalize(s.light1, s.light2, s.ref1, s.ref2);
}

/// Ridge length in pixels for the single-ridge scene of a given seed, in [30, 200).
inline double ridge_length_px(std::uint64_t seed) {
  return 30.0 + 170.0 * to_unit(keyed_hash(seed, 99, 0));
}

/// Larger endpoint distance under the better of the two endpoint pairings.
inline double endpoint_error(const Segment& got, const Segment& want) {
  const double same = std::max(distance(got.a, want.a), distance(got.b, want.b));
  const double swapped = std::max(distance(got.a, want.b), distance(got.b, want.a));
  return std::min(same, swapped);
}

/// Segments found in a scene with the given model and default parameters.
inline std::vector<Discontinuity> segments_in(const SceneSpec& spec, const SvmModel& model,
                                              NormalizedImage* image = nullptr) {
  const NormalizedImage n = normalized(spec);
  const ScoreMap sm = score_map(n, model);
  const HoughParams hp;
  auto segs = extract_segments(sm.mask, sm.scores, hp, spec.transform());
  refine_segments(segs, n, hp, spec.transform());
  if (image) *image = n;
  return segs;
}

/// Entry of one wrinkle in a visiting order.
struct Visit {
  int id = 0;
  int piece = 0;
  Vec2 start;
  Vec2 end;
};

/// Straightforward restatement of the greedy rule: highest p first, entered at
/// the end nearer home, then always the closest unvisited entry point (static
/// wrinkles offer only their midpoint). Ties go to the lower (id, piece, end).
inline std::vector<Visit> greedy_oracle(const std::vector<FusedWrinkle>& ws, const IronSpec& iron,
                                        Vec2 home) {
  std::vector<Visit> out;
  if (ws.empty()) return out;
  auto is_static = [&](const FusedWrinkle& w) { return w.length() < 0.7 * iron.long_axis; };
  auto visit = [&](const FusedWrinkle& w, int end) {
    const Segment& s = w.discontinuity.world;
    if (is_static(w)) return Visit{w.id(), w.piece, s.midpoint(), s.midpoint()};
    return end == 0 ? Visit{w.id(), w.piece, s.a, s.b} : Visit{w.id(), w.piece, s.b, s.a};
  };
  std::vector<bool> used(ws.size(), false);
  std::size_t first = 0;
  for (std::size_t i = 1; i < ws.size(); ++i) {
    if (std::make_tuple(-ws[i].p, ws[i].id(), ws[i].piece) <
        std::make_tuple(-ws[first].p, ws[first].id(), ws[first].piece)) {
      first = i;
    }
  }
  const Segment& fs = ws[first].discontinuity.world;
  out.push_back(visit(ws[first], distance(home, fs.b) < distance(home, fs.a) ? 1 : 0));
  used[first] = true;
  Vec2 pos = out.back().end;
  for (std::size_t step = 1; step < ws.size(); ++step) {
    std::tuple<double, int, int, int> best{std::numeric_limits<double>::infinity(), 0, 0, 0};
    std::size_t best_i = ws.size();
    for (std::size_t i = 0; i < ws.size(); ++i) {
      if (used[i]) continue;
      for (int e = 0; e < (is_static(ws[i]) ? 1 : 2); ++e) {
        const auto cand = std::make_tuple(distance(pos, visit(ws[i], e).start), ws[i].id(), ws[i].piece, e);
        if (cand < best) {
          best = cand;
          best_i = i;
        }
      }
    }
    out.push_back(visit(ws[best_i], std::get<3>(best)));
    used[best_i] = true;
    pos = out.back().end;
  }
  return out;
}

/// Accepted wrinkle with a world segment and probability, for planner tests.
inline FusedWrinkle planner_wrinkle(int id, Segment world, double p) {
  FusedWrinkle w;
  w.discontinuity.id = id;
  w.discontinuity.world = world;
  w.discontinuity.pixel = world;
  w.discontinuity.length = world.length();
  w.discontinuity.direction = world.direction();
  w.q = 1.0;
  w.r = p;
  w.p = p;
  w.accepted = true;
  return w;
}

/// Random instance of n segments in the unit square, lengths 0.02-0.5 m, p on a
/// coarse grid so that ties happen.
inline std::vector<FusedWrinkle> random_instance(std::uint64_t seed, int n) {
  std::vector<FusedWrinkle> ws;
  for (int i = 0; i < n; ++i) {
    const Vec2 a{to_unit(keyed_hash(seed, 1, i)), to_unit(keyed_hash(seed, 2, i))};
    const double ang = std::numbers::pi * to_unit(keyed_hash(seed, 3, i));
    const double len = 0.02 + 0.48 * to_unit(keyed_hash(seed, 4, i));
    const Vec2 b = a + len * Vec2{std::cos(ang), std::sin(ang)};
    const double p = 0.3 + 0.1 * static_cast<double>(keyed_hash(seed, 5, i) % 8);
    ws.push_back(planner_wrinkle(i + 1, {a, b}, p));
  }
  return ws;
}

/// Transit plus slide distance of visiting ws in `order`, each wrinkle entered at
/// its end nearer the current position.
inline double ordering_travel(const std::vector<FusedWrinkle>& ws, const std::vector<std::size_t>& order,
                              const IronSpec& iron, Vec2 home) {
  double total = 0.0;
  Vec2 pos = home;
  for (std::size_t i : order) {
    const Segment& s = ws[i].discontinuity.world;
    if (ws[i].length() < 0.7 * iron.long_axis) {
      total += distance(pos, s.midpoint());
      pos = s.midpoint();
    } else if (distance(pos, s.a) <= distance(pos, s.b)) {
      total += distance(pos, s.a) + s.length();
      pos = s.b;
    } else {
      total += distance(pos, s.b) + s.length();
      pos = s.a;
    }
  }
  return total;
}

/// Mean travel of `count` seeded random orderings.
inline double random_orderings_mean(const std::vector<FusedWrinkle>& ws, const IronSpec& iron,
                                    Vec2 home, std::uint64_t seed, int count) {
  double sum = 0.0;
  for (int k = 0; k < count; ++k) {
    std::vector<std::size_t> order(ws.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    // Fisher-Yates with keyed draws.
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = keyed_hash(seed, 0x5eed + k, i) % i;
      std::swap(order[i - 1], order[j]);
    }
    sum += ordering_travel(ws, order, iron, home);
  }
  return sum / count;
}

}  // namespace wrinkle::testing
