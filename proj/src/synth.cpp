#include "wrinkle/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "wrinkle/gridio.hpp"
#include "wrinkle/keyvalue.hpp"
#include "wrinkle/rng.hpp"

namespace wrinkle {
namespace {

constexpr std::uint64_t kHeightStream = 0;
constexpr std::uint64_t kReferenceStreamBase = 2;

// Precomputed inverse covariance of one bump in world axes.
struct BumpEval {
  Vec2 center;
  Sym2 inv_cov;
  double peak;

  explicit BumpEval(const BumpSpec& b)
      : center(b.center),
        inv_cov(inverse(rotate_diag(b.sigma_major * b.sigma_major,
                                    b.sigma_minor * b.sigma_minor, b.orientation))),
        peak(b.peak_height) {}

  double relative(Vec2 p) const { return std::exp(-0.5 * quad_form(inv_cov, p - center)); }
};

std::vector<BumpEval> bump_evals(const SceneSpec& spec) {
  std::vector<BumpEval> out;
  out.reserve(spec.bumps.size());
  for (const auto& b : spec.bumps) out.emplace_back(b);
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

LightSpec parse_light(const KeyValue& kv) {
  const auto v = parse_numbers(kv);
  if (v.size() != 3 && v.size() != 4) {
    throw ConfigError("line " + std::to_string(kv.line) + ": light expects 'dx dy dz [intensity]'");
  }
  LightSpec l;
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (std::abs(n - 1.0) > 1e-3) {
    throw ConfigError("line " + std::to_string(kv.line) + ": light direction must be unit length");
  }
  l.direction = {v[0] / n, v[1] / n, v[2] / n};
  if (v.size() == 4) l.intensity = v[3];
  return l;
}

}  // namespace

std::array<LightSpec, 2> default_lights() {
  const double c = std::sqrt(0.5);
  return {LightSpec{{c, 0.0, c}, 1.0}, LightSpec{{0.0, c, c}, 1.0}};
}

void SceneSpec::validate() const {
  if (width < 3 || height < 3) throw ConfigError("scene grid must be at least 3x3");
  if (!(cell_size > 0.0)) throw ConfigError("scene cell_size must be positive");
  for (const auto& b : bumps) {
    if (!(b.sigma_minor > 0.0) || b.sigma_major < b.sigma_minor) {
      throw ConfigError("bump requires sigma_major >= sigma_minor > 0");
    }
  }
  for (const auto& w : wrinkles) {
    if (!(w.half_width > 0.0)) throw ConfigError("wrinkle requires half_width > 0");
    if (w.polyline.size() < 2) throw ConfigError("wrinkle polyline needs at least two points");
  }
  for (const auto& l : lights) {
    const auto& d = l.direction;
    const double n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    if (std::abs(n - 1.0) > 1e-6) throw ConfigError("light direction must be unit length");
    if (!(d[2] > 0.0)) throw ConfigError("light direction must have positive z");
    if (!(l.intensity >= 0.0)) throw ConfigError("light intensity must be non-negative");
  }
  if (height_noise < 0.0 || image_noise < 0.0) throw ConfigError("noise sigmas must be >= 0");
  if (albedo_map && (albedo_map->width() != width || albedo_map->height() != height)) {
    throw ConfigError("albedo map dimensions do not match the scene grid");
  }
}

SceneSpec parse_scene_spec(std::istream& in, const std::filesystem::path& base_dir) {
  SceneSpec spec;
  spec.lights = default_lights();
  for (const auto& kv : parse_key_values(in)) {
    if (kv.key == "width") {
      spec.width = static_cast<int>(parse_integer(kv));
    } else if (kv.key == "height") {
      spec.height = static_cast<int>(parse_integer(kv));
    } else if (kv.key == "cell_size") {
      spec.cell_size = parse_number(kv);
    } else if (kv.key == "origin") {
      const auto v = parse_numbers(kv);
      if (v.size() != 2) throw ConfigError("origin expects 'x y'");
      spec.origin = {v[0], v[1]};
    } else if (kv.key == "seed") {
      try {
        spec.seed = std::stoull(kv.value, nullptr, 0);
      } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(kv.line) + ": seed expects an unsigned integer");
      }
    } else if (kv.key == "albedo") {
      spec.albedo = parse_number(kv);
    } else if (kv.key == "albedo_map") {
      spec.albedo_map = to_field(read_gray(base_dir / kv.value));
    } else if (kv.key == "light1") {
      spec.lights[0] = parse_light(kv);
    } else if (kv.key == "light2") {
      spec.lights[1] = parse_light(kv);
    } else if (kv.key == "height_noise") {
      spec.height_noise = parse_number(kv);
    } else if (kv.key == "image_noise") {
      spec.image_noise = parse_number(kv);
    } else if (kv.key == "bump") {
      const auto v = parse_numbers(kv);
      if (v.size() != 6) {
        throw ConfigError("line " + std::to_string(kv.line) +
                          ": bump expects 'cx cy sigma_major sigma_minor orientation peak'");
      }
      spec.bumps.push_back({{v[0], v[1]}, v[2], v[3], v[4], v[5]});
    } else if (kv.key == "wrinkle") {
      const auto v = parse_numbers(kv);
      if (v.size() < 6 || v.size() % 2 != 0) {
        throw ConfigError("line " + std::to_string(kv.line) +
                          ": wrinkle expects 'half_width height x0 y0 x1 y1 [...]'");
      }
      WrinkleSpec w;
      w.half_width = v[0];
      w.height = v[1];
      for (std::size_t i = 2; i < v.size(); i += 2) w.polyline.push_back({v[i], v[i + 1]});
      spec.wrinkles.push_back(std::move(w));
    } else {
      throw ConfigError("line " + std::to_string(kv.line) + ": unknown scene key '" + kv.key + "'");
    }
  }
  if (spec.albedo_map) {
    spec.albedo_map = Field(spec.albedo_map->width(), spec.albedo_map->height(), spec.cell_size,
                            spec.origin, spec.albedo_map->values());
  }
  spec.validate();
  return spec;
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scene file " + path.string());
  return parse_scene_spec(in, path.parent_path());
}

std::string format_scene_spec(const SceneSpec& spec) {
  std::ostringstream os;
  os << "width = " << spec.width << "\nheight = " << spec.height
     << "\ncell_size = " << fmt(spec.cell_size) << "\norigin = " << fmt(spec.origin.x) << ' '
     << fmt(spec.origin.y) << "\nseed = " << spec.seed << "\nalbedo = " << fmt(spec.albedo)
     << '\n';
  for (int i = 0; i < 2; ++i) {
    const auto& l = spec.lights[i];
    os << "light" << (i + 1) << " = " << fmt(l.direction[0]) << ' ' << fmt(l.direction[1]) << ' '
       << fmt(l.direction[2]) << ' ' << fmt(l.intensity) << '\n';
  }
  os << "height_noise = " << fmt(spec.height_noise) << "\nimage_noise = " << fmt(spec.image_noise)
     << '\n';
  for (const auto& b : spec.bumps) {
    os << "bump = " << fmt(b.center.x) << ' ' << fmt(b.center.y) << ' ' << fmt(b.sigma_major)
       << ' ' << fmt(b.sigma_minor) << ' ' << fmt(b.orientation) << ' ' << fmt(b.peak_height)
       << '\n';
  }
  for (const auto& w : spec.wrinkles) {
    os << "wrinkle = " << fmt(w.half_width) << ' ' << fmt(w.height);
    for (const auto& p : w.polyline) os << ' ' << fmt(p.x) << ' ' << fmt(p.y);
    os << '\n';
  }
  return os.str();
}

double ridge_profile(double d, double half_width, double height) {
  if (d > half_width) return 0.0;
  const double c = std::cos(std::numbers::pi * d / (2.0 * half_width));
  return height * c * c;
}

double polyline_distance(Vec2 p, const std::vector<Vec2>& polyline) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    best = std::min(best, point_segment_distance(p, polyline[i], polyline[i + 1]));
  }
  return best;
}

FloatGrid generate_height(const SceneSpec& spec) {
  spec.validate();
  FloatGrid out(spec.width, spec.height, spec.cell_size, spec.origin);
  const auto bumps = bump_evals(spec);
  const WorldTransform t = spec.transform();
  const int w = spec.width;
  const int h = spec.height;

#pragma omp parallel for schedule(static)
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const Vec2 p = t.to_world(u, v);
      double z = 0.0;
      for (const auto& b : bumps) z += b.peak * b.relative(p);
      for (const auto& wr : spec.wrinkles) {
        z += ridge_profile(polyline_distance(p, wr.polyline), wr.half_width, wr.height);
      }
      if (spec.height_noise > 0.0) {
        z += spec.height_noise *
             keyed_normal(spec.seed, kHeightStream, static_cast<std::uint64_t>(v) * w + u);
      }
      out(u, v) = static_cast<float>(z);
    }
  }
  return out;
}

namespace detail {

double albedo_at(const SceneSpec& spec, int u, int v) {
  return spec.albedo_map ? (*spec.albedo_map)(u, v) : spec.albedo;
}

GrayImage render(const FloatGrid& height, const SceneSpec& spec, int light_index,
                 std::uint64_t noise_stream) {
  if (light_index != 1 && light_index != 2) throw ConfigError("light_index must be 1 or 2");
  const LightSpec& light = spec.lights[light_index - 1];
  const auto& s = light.direction;
  GrayImage out(height.width(), height.height(), height.cell_size(), height.origin());
  const double inv2c = 1.0 / (2.0 * height.cell_size());
  const int w = height.width();
  const int h = height.height();

#pragma omp parallel for schedule(static)
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const double gx = (double(height.reflect(u + 1, v)) - double(height.reflect(u - 1, v))) * inv2c;
      const double gy = (double(height.reflect(u, v + 1)) - double(height.reflect(u, v - 1))) * inv2c;
      const double inv_n = 1.0 / std::sqrt(gx * gx + gy * gy + 1.0);
      const double ndots = (-gx * s[0] - gy * s[1] + s[2]) * inv_n;
      double value = std::clamp(albedo_at(spec, u, v) * light.intensity * std::max(0.0, ndots),
                                0.0, 1.0);
      if (spec.image_noise > 0.0) {
        value += spec.image_noise *
                 keyed_normal(spec.seed, noise_stream, static_cast<std::uint64_t>(v) * w + u);
        value = std::clamp(value, 0.0, 1.0);
      }
      out(u, v) = static_cast<float>(value);
    }
  }
  return out;
}

}  // namespace detail

GrayImage render_illumination(const FloatGrid& height, const SceneSpec& spec, int light_index) {
  return detail::render(height, spec, light_index, static_cast<std::uint64_t>(light_index));
}

GrayImage render_reference(const SceneSpec& spec, int light_index) {
  spec.validate();
  const FloatGrid flat(spec.width, spec.height, spec.cell_size, spec.origin);
  return detail::render(flat, spec, light_index,
                        kReferenceStreamBase + static_cast<std::uint64_t>(light_index));
}

LabelMask ground_truth(const SceneSpec& spec) {
  spec.validate();
  LabelMask out(spec.width, spec.height, spec.cell_size, spec.origin, Label::background);
  const auto bumps = bump_evals(spec);
  const WorldTransform t = spec.transform();

#pragma omp parallel for schedule(static)
  for (int v = 0; v < spec.height; ++v) {
    for (int u = 0; u < spec.width; ++u) {
      const Vec2 p = t.to_world(u, v);
      Label label = Label::background;
      for (const auto& b : bumps) {
        if (b.relative(p) > 0.1) {
          label = Label::bump;
          break;
        }
      }
      for (const auto& wr : spec.wrinkles) {
        if (polyline_distance(p, wr.polyline) <= wr.half_width) {
          label = Label::wrinkle;
          break;
        }
      }
      out(u, v) = label;
    }
  }
  return out;
}

}  // namespace wrinkle
