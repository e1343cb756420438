#include "wrinkle/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

namespace wrinkle {

std::vector<double> gaussian_kernel(double sigma_pixels) {
  if (!(sigma_pixels > 0.0)) return {1.0};
  const int radius = static_cast<int>(std::ceil(3.0 * sigma_pixels));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma_pixels * sigma_pixels));
    sum += k[i + radius];
  }
  for (auto& x : k) x /= sum;
  return k;
}

Field smooth(const Field& grid, double sigma_pixels) {
  if (sigma_pixels < 0.0) throw ConfigError("smoothing sigma must be >= 0");
  if (sigma_pixels == 0.0) return grid;
  const auto k = gaussian_kernel(sigma_pixels);
  const int r = static_cast<int>(k.size() / 2);
  const int w = grid.width();
  const int h = grid.height();
  Field tmp = Field::like(grid);
  Field out = Field::like(grid);

#pragma omp parallel for schedule(static)
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * grid(reflect_index(u + i, w), v);
      tmp(u, v) = acc;
    }
  }
#pragma omp parallel for schedule(static)
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp(u, reflect_index(v + i, h));
      out(u, v) = acc;
    }
  }
  return out;
}

Field smooth(const FloatGrid& grid, double sigma_pixels) {
  return smooth(to_field(grid), sigma_pixels);
}

CurvatureField hessian(const Field& f) {
  const int w = f.width();
  const int h = f.height();
  const double inv_c2 = 1.0 / (f.cell_size() * f.cell_size());
  CurvatureField cf{Field::like(f), Field::like(f), Field::like(f),
                    Grid<std::uint8_t>::like(f, std::uint8_t{0}), 0.0};

  double max_abs = 0.0;
#pragma omp parallel for schedule(static) reduction(max : max_abs)
  for (int v = 0; v < h; ++v) {
    const bool edge_row = v == 0 || v == h - 1;
    for (int u = 0; u < w; ++u) {
      double fxx, fyy, fxy;
      if (edge_row || u == 0 || u == w - 1) {
        const double c = f(u, v);
        fxx = f.reflect(u + 1, v) - 2.0 * c + f.reflect(u - 1, v);
        fyy = f.reflect(u, v + 1) - 2.0 * c + f.reflect(u, v - 1);
        fxy = 0.25 * (f.reflect(u + 1, v + 1) - f.reflect(u + 1, v - 1) - f.reflect(u - 1, v + 1) +
                      f.reflect(u - 1, v - 1));
      } else {
        const double* up = &f(u, v - 1);
        const double* mid = &f(u, v);
        const double* down = &f(u, v + 1);
        fxx = mid[1] - 2.0 * mid[0] + mid[-1];
        fyy = down[0] - 2.0 * mid[0] + up[0];
        fxy = 0.25 * (down[1] - up[1] - down[-1] + up[-1]);
      }
      fxx *= inv_c2;
      fyy *= inv_c2;
      fxy *= inv_c2;
      const double mean = 0.5 * (fxx + fyy);
      const double rad = std::hypot(0.5 * (fxx - fyy), fxy);
      cf.lambda1(u, v) = mean + rad;
      cf.lambda2(u, v) = mean - rad;
      max_abs = std::max(max_abs, std::abs(mean) + rad);
    }
  }

  const double eps = 1e-9 * max_abs;
#pragma omp parallel for schedule(static)
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const auto si = shape_index(cf.lambda1(u, v), cf.lambda2(u, v), eps);
      cf.defined(u, v) = si.has_value();
      cf.shape_index(u, v) = si.value_or(0.0);
    }
  }
  return cf;
}

std::optional<double> shape_index(double lambda1, double lambda2, double eps_umbilic) {
  const double diff = lambda1 - lambda2;
  if (std::abs(diff) < eps_umbilic || diff == 0.0) return std::nullopt;
  return 2.0 / std::numbers::pi * std::atan((lambda1 + lambda2) / diff);
}

Grid<std::uint8_t> fill_holes(const Grid<std::uint8_t>& mask) {
  const int w = mask.width();
  const int h = mask.height();
  Grid<std::uint8_t> outside = Grid<std::uint8_t>::like(mask, std::uint8_t{0});
  std::deque<std::pair<int, int>> queue;
  auto seed = [&](int u, int v) {
    if (!mask(u, v) && !outside(u, v)) {
      outside(u, v) = 1;
      queue.emplace_back(u, v);
    }
  };
  for (int u = 0; u < w; ++u) {
    seed(u, 0);
    seed(u, h - 1);
  }
  for (int v = 0; v < h; ++v) {
    seed(0, v);
    seed(w - 1, v);
  }
  while (!queue.empty()) {
    const auto [u, v] = queue.front();
    queue.pop_front();
    if (u > 0) seed(u - 1, v);
    if (u + 1 < w) seed(u + 1, v);
    if (v > 0) seed(u, v - 1);
    if (v + 1 < h) seed(u, v + 1);
  }
  Grid<std::uint8_t> out = mask;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = outside[i] ? 0 : 1;
  return out;
}

Grid<int> label_components(const Grid<std::uint8_t>& mask, int* count) {
  const int w = mask.width();
  const int h = mask.height();
  Grid<int> labels = Grid<int>::like(mask, 0);
  int next = 0;
  std::vector<std::pair<int, int>> stack;
  for (int v0 = 0; v0 < h; ++v0) {
    for (int u0 = 0; u0 < w; ++u0) {
      if (!mask(u0, v0) || labels(u0, v0)) continue;
      ++next;
      labels(u0, v0) = next;
      stack.assign(1, {u0, v0});
      while (!stack.empty()) {
        const auto [u, v] = stack.back();
        stack.pop_back();
        for (int dv = -1; dv <= 1; ++dv) {
          for (int du = -1; du <= 1; ++du) {
            const int uu = u + du;
            const int vv = v + dv;
            if (!mask.contains(uu, vv) || !mask(uu, vv) || labels(uu, vv)) continue;
            labels(uu, vv) = next;
            stack.emplace_back(uu, vv);
          }
        }
      }
    }
  }
  if (count) *count = next;
  return labels;
}

BumpResult detect_bumps(const FloatGrid& grid, const BumpParams& params) {
  BumpResult result;
  const Field s = smooth(grid, params.smoothing_sigma);
  const int w = s.width();
  const int h = s.height();

  std::vector<double> sorted(s.values());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double table = sorted[sorted.size() / 2];

  Field oriented = s;
  if (params.polarity == Polarity::negated) {
    for (auto& x : oriented.values()) x = -x;
  }
  const CurvatureField cf = hessian(oriented);

  Grid<std::uint8_t> points = Grid<std::uint8_t>::like(s, std::uint8_t{0});
  for (std::size_t i = 0; i < s.size(); ++i) {
    points[i] = cf.defined[i] && in_bump_range(cf.shape_index[i]) &&
                s[i] - table >= params.height_floor;
    result.diagnostics.bump_points += points[i];
  }
  if (params.fill_holes) points = fill_holes(points);

  int n = 0;
  const Grid<int> labels = label_components(points, &n);
  result.diagnostics.components = static_cast<std::size_t>(n);
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) members[labels[i] - 1].push_back(i);
  }

  const WorldTransform t = s.transform();
  const double cell_area = s.cell_size() * s.cell_size();
  for (int c = 0; c < n; ++c) {
    auto& px = members[c];
    if (static_cast<int>(px.size()) < params.min_pixels) {
      ++result.diagnostics.degenerate;
      continue;
    }
    const int label = c + 1;
    double boundary_min = std::numeric_limits<double>::infinity();
    double sw = 0.0, sx = 0.0, sy = 0.0, peak = 0.0;
    for (const std::size_t i : px) {
      const int u = static_cast<int>(i % w);
      const int v = static_cast<int>(i / w);
      const bool boundary = u == 0 || v == 0 || u == w - 1 || v == h - 1 ||
                            labels(u - 1, v) != label || labels(u + 1, v) != label ||
                            labels(u, v - 1) != label || labels(u, v + 1) != label;
      if (boundary) boundary_min = std::min(boundary_min, s[i]);
      const double wt = std::max(0.0, s[i] - table);
      const Vec2 p = t.to_world(u, v);
      sw += wt;
      sx += wt * p.x;
      sy += wt * p.y;
      peak = std::max(peak, s[i] - table);
    }
    if (!(sw > 0.0)) {
      ++result.diagnostics.degenerate;
      continue;
    }
    const Vec2 center{sx / sw, sy / sw};
    Sym2 cov;
    double volume = 0.0;
    for (const std::size_t i : px) {
      const int u = static_cast<int>(i % w);
      const int v = static_cast<int>(i / w);
      const double wt = std::max(0.0, s[i] - table);
      const Vec2 d = t.to_world(u, v) - center;
      cov.xx += wt * d.x * d.x;
      cov.xy += wt * d.x * d.y;
      cov.yy += wt * d.y * d.y;
      volume += (s[i] - boundary_min) * cell_area;
    }
    cov = {cov.xx / sw, cov.xy / sw, cov.yy / sw};
    const Eigen2 e = eigen(cov);
    if (!(e.minor > 0.0)) {
      ++result.diagnostics.degenerate;
      continue;
    }
    if (!(volume > 0.0) || volume < params.min_volume) {
      ++result.diagnostics.below_volume;
      continue;
    }
    HeightBump b;
    b.pixels = std::move(px);
    b.center = center;
    b.volume = volume;
    b.d1 = std::sqrt(e.major);
    b.d2 = std::sqrt(e.minor);
    b.orientation = e.major_angle;
    b.peak = peak;
    result.bumps.push_back(std::move(b));
  }

  std::sort(result.bumps.begin(), result.bumps.end(), [](const HeightBump& a, const HeightBump& b) {
    if (a.volume != b.volume) return a.volume > b.volume;
    if (a.center.y != b.center.y) return a.center.y < b.center.y;
    return a.center.x < b.center.x;
  });
  for (std::size_t i = 0; i < result.bumps.size(); ++i) result.bumps[i].id = static_cast<int>(i);
  return result;
}

}  // namespace wrinkle
