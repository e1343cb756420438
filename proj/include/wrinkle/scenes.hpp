#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wrinkle/synth.hpp"

namespace wrinkle::scenes {

// Seeded scene presets at the standard 2 mm cell size. Ridges default to
// 4 mm half-width and 2 mm height; bumps are 10-30 mm tall.

inline constexpr double kCell = 0.002;
inline constexpr double kRidgeHalfWidth = 0.004;
inline constexpr double kRidgeHeight = 0.002;

/// Empty scene with the default lights and mild sensor noise.
SceneSpec blank(int width, int height, std::uint64_t seed);

/// One random anisotropic bump, no ridges.
SceneSpec single_bump(std::uint64_t seed);

/// One straight ridge of `length_px` pixels at a random orientation.
SceneSpec single_ridge(std::uint64_t seed, double length_px);

/// Mixed bumps and ridges for classifier training and evaluation.
SceneSpec training(std::uint64_t seed);

/// One bump with a short ridge through its center and one ridge well clear of it.
SceneSpec fusion(std::uint64_t seed);

/// 640x480: two bumps and one ridge clear of both.
SceneSpec reference(std::uint64_t seed = 7);

/// Names accepted by `by_name`.
std::vector<std::string> names();
SceneSpec by_name(const std::string& name, std::uint64_t seed);

}  // namespace wrinkle::scenes
