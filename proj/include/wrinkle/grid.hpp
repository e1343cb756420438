#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wrinkle/error.hpp"
#include "wrinkle/geometry.hpp"

namespace wrinkle {

/// Maps pixel centers to world meters: world = origin + (u, v) * cell_size.
struct WorldTransform {
  double cell_size = 1.0;
  Vec2 origin;

  Vec2 to_world(double u, double v) const {
    return {origin.x + u * cell_size, origin.y + v * cell_size};
  }
  Vec2 to_world(Vec2 pixel) const { return to_world(pixel.x, pixel.y); }
  Vec2 to_pixel(Vec2 world) const {
    return {(world.x - origin.x) / cell_size, (world.y - origin.y) / cell_size};
  }
};

/// Index of a mirrored coordinate for out-of-range samples (edge pixel not repeated).
inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

/// Row-major raster over a regular grid with a world placement.
template <class T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;

  Grid(int width, int height, double cell_size = 1.0, Vec2 origin = {}, T fill = T{})
      : width_(width), height_(height), transform_{cell_size, origin} {
    check_shape();
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  Grid(int width, int height, double cell_size, Vec2 origin, std::vector<T> data)
      : width_(width), height_(height), transform_{cell_size, origin}, data_(std::move(data)) {
    check_shape();
    if (data_.size() != static_cast<std::size_t>(width) * height) {
      throw FormatError("grid data length " + std::to_string(data_.size()) +
                        " does not match " + std::to_string(width) + "x" +
                        std::to_string(height));
    }
  }

  /// Same shape and placement as `other`, filled with `fill`.
  template <class U>
  static Grid like(const Grid<U>& other, T fill = T{}) {
    return Grid(other.width(), other.height(), other.cell_size(), other.origin(), fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  double cell_size() const { return transform_.cell_size; }
  Vec2 origin() const { return transform_.origin; }
  const WorldTransform& transform() const { return transform_; }

  bool contains(int u, int v) const { return u >= 0 && v >= 0 && u < width_ && v < height_; }
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * width_ + u;
  }

  T& operator()(int u, int v) { return data_[index(u, v)]; }
  const T& operator()(int u, int v) const { return data_[index(u, v)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  /// Sample with mirrored boundaries.
  T reflect(int u, int v) const {
    return (*this)(reflect_index(u, width_), reflect_index(v, height_));
  }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  template <class U>
  bool same_shape(const Grid<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ &&
           a.transform_.cell_size == b.transform_.cell_size &&
           a.transform_.origin == b.transform_.origin && a.data_ == b.data_;
  }

 private:
  void check_shape() const {
    if (width_ < 3 || height_ < 3) {
      throw FormatError("grid must be at least 3x3, got " + std::to_string(width_) + "x" +
                        std::to_string(height_));
    }
    if (!(transform_.cell_size > 0.0)) throw FormatError("cell size must be positive");
  }

  int width_ = 0;
  int height_ = 0;
  WorldTransform transform_;
  std::vector<T> data_;
};

/// Height map / scalar field as stored on disk (f32).
using FloatGrid = Grid<float>;
/// Double-precision working field used by the numerical stages.
using Field = Grid<double>;

/// Intensity image with values in [0, 1].
class GrayImage : public Grid<float> {
 public:
  using Grid<float>::Grid;
  GrayImage() = default;
  explicit GrayImage(Grid<float> g) : Grid<float>(std::move(g)) {}
};

enum class Label : std::uint8_t { background = 0, wrinkle = 1, bump = 2 };

using LabelMask = Grid<Label>;

template <class To, class From>
Grid<To> convert(const Grid<From>& in) {
  Grid<To> out = Grid<To>::like(in);
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = static_cast<To>(in[i]);
  return out;
}

inline Field to_field(const Grid<float>& g) { return convert<double>(g); }

}  // namespace wrinkle
