#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "wrinkle/grid.hpp"

namespace wrinkle {

/// Anisotropic Gaussian height bump: peak * exp(-0.5 m^T S^-1 m) in its own frame.
struct BumpSpec {
  Vec2 center;               ///< world meters
  double sigma_major = 0.0;  ///< meters, along `orientation`
  double sigma_minor = 0.0;  ///< meters
  double orientation = 0.0;  ///< radians
  double peak_height = 0.0;  ///< meters
};

/// Sharp ridge with a cos^2 cross profile around a world polyline.
struct WrinkleSpec {
  std::vector<Vec2> polyline;
  double half_width = 0.0;  ///< meters
  double height = 0.0;      ///< meters
};

struct LightSpec {
  std::array<double, 3> direction{0.0, 0.0, 1.0};  ///< unit vector towards the light
  double intensity = 1.0;
};

struct SceneSpec {
  int width = 0;
  int height = 0;
  double cell_size = 0.002;
  Vec2 origin;
  std::vector<BumpSpec> bumps;
  std::vector<WrinkleSpec> wrinkles;
  double albedo = 0.8;
  std::optional<Field> albedo_map;  ///< per-pixel override of `albedo`
  std::array<LightSpec, 2> lights{};
  double height_noise = 0.0;  ///< meters
  double image_noise = 0.0;   ///< intensity units
  std::uint64_t seed = 0;

  /// Throws ConfigError on any invariant violation.
  void validate() const;
  WorldTransform transform() const { return {cell_size, origin}; }
};

/// Two orthogonal lights at 45 degree elevation (azimuth 0 and 90 degrees).
std::array<LightSpec, 2> default_lights();

/// Plain-text scene description; `base_dir` resolves a relative `albedo_map`.
SceneSpec parse_scene_spec(std::istream& in, const std::filesystem::path& base_dir = {});
SceneSpec load_scene_spec(const std::filesystem::path& path);
/// Inverse of parse_scene_spec (an albedo map is not serialized).
std::string format_scene_spec(const SceneSpec& spec);

/// Height of one ridge at distance `d` from its polyline.
double ridge_profile(double d, double half_width, double height);

/// Distance from a world point to a polyline.
double polyline_distance(Vec2 p, const std::vector<Vec2>& polyline);

/// Sum of bump Gaussians and ridge profiles plus keyed Gaussian noise.
FloatGrid generate_height(const SceneSpec& spec);

/// Lambertian rendering of `height` under light 1 or 2.
GrayImage render_illumination(const FloatGrid& height, const SceneSpec& spec, int light_index);

/// Flat-cloth calibration capture for light 1 or 2.
GrayImage render_reference(const SceneSpec& spec, int light_index);

/// Wrinkle band, bump support (> 10% of peak), background; wrinkle wins ties.
LabelMask ground_truth(const SceneSpec& spec);

namespace detail {
/// Lambertian render with an explicit noise stream; shared by the public renderers.
GrayImage render(const FloatGrid& height, const SceneSpec& spec, int light_index,
                 std::uint64_t noise_stream);
double albedo_at(const SceneSpec& spec, int u, int v);
}  // namespace detail

}  // namespace wrinkle
