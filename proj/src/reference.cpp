#include "wrinkle/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wrinkle/error.hpp"

namespace wrinkle::reference {

Field smooth(const Field& grid, double sigma_pixels) {
  if (sigma_pixels < 0.0) throw ConfigError("smoothing sigma must be >= 0");
  if (sigma_pixels == 0.0) return grid;
  const auto k = gaussian_kernel(sigma_pixels);
  const int r = static_cast<int>(k.size() / 2);
  const int w = grid.width();
  const int h = grid.height();
  Field out = Field::like(grid);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      double acc = 0.0;
      for (int j = -r; j <= r; ++j) {
        for (int i = -r; i <= r; ++i) {
          acc += k[j + r] * k[i + r] * grid(reflect_index(u + i, w), reflect_index(v + j, h));
        }
      }
      out(u, v) = acc;
    }
  }
  return out;
}

CurvatureField hessian(const Field& f) {
  const int w = f.width();
  const int h = f.height();
  const double c2 = f.cell_size() * f.cell_size();
  CurvatureField cf{Field::like(f), Field::like(f), Field::like(f),
                    Grid<std::uint8_t>::like(f, std::uint8_t{0}), 0.0};
  double max_abs = 0.0;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const double fxx = (f.reflect(u + 1, v) - 2.0 * f(u, v) + f.reflect(u - 1, v)) / c2;
      const double fyy = (f.reflect(u, v + 1) - 2.0 * f(u, v) + f.reflect(u, v - 1)) / c2;
      const double fxy = (f.reflect(u + 1, v + 1) - f.reflect(u + 1, v - 1) -
                          f.reflect(u - 1, v + 1) + f.reflect(u - 1, v - 1)) /
                         (4.0 * c2);
      const double mean = 0.5 * (fxx + fyy);
      const double rad = std::sqrt(0.25 * (fxx - fyy) * (fxx - fyy) + fxy * fxy);
      cf.lambda1(u, v) = mean + rad;
      cf.lambda2(u, v) = mean - rad;
      max_abs = std::max({max_abs, std::abs(mean + rad), std::abs(mean - rad)});
    }
  }
  const double eps = 1e-9 * max_abs;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const double l1 = cf.lambda1(u, v), l2 = cf.lambda2(u, v);
      const bool ok = l1 - l2 != 0.0 && !(l1 - l2 < eps);
      cf.defined(u, v) = ok;
      cf.shape_index(u, v) = ok ? 2.0 / std::numbers::pi * std::atan((l1 + l2) / (l1 - l2)) : 0.0;
    }
  }
  return cf;
}

PixelDescriptor descriptor_at(const Field& img, int u, int v, const DescriptorParams& params) {
  constexpr int cells = 4, bins = 8, half = kPatchSize / 2;
  constexpr double sigma = 0.5 * kPatchSize;
  const int w = img.width();
  const int h = img.height();
  std::array<double, kDescriptorSize> hist{};
  for (int dy = -half; dy < half; ++dy) {
    for (int dx = -half; dx < half; ++dx) {
      const int su = reflect_index(u + dx, w);
      const int sv = reflect_index(v + dy, h);
      const double gx = 0.5 * (img.reflect(su + 1, sv) - img.reflect(su - 1, sv));
      const double gy = 0.5 * (img.reflect(su, sv + 1) - img.reflect(su, sv - 1));
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      const double px = dx + 0.5, py = dy + 0.5;
      const double weight = mag * std::exp(-(px * px + py * py) / (2.0 * sigma * sigma));
      double ob = std::atan2(gy, gx) * (bins / (2.0 * std::numbers::pi));
      if (ob < 0.0) ob += bins;
      const double cx = (px + half) / (kPatchSize / cells) - 0.5;
      const double cy = (py + half) / (kPatchSize / cells) - 0.5;
      for (int yc = 0; yc < cells; ++yc) {
        const double wy = 1.0 - std::abs(cy - yc);
        if (wy <= 0.0) continue;
        for (int xc = 0; xc < cells; ++xc) {
          const double wx = 1.0 - std::abs(cx - xc);
          if (wx <= 0.0) continue;
          for (int o = 0; o < bins; ++o) {
            double d = std::abs(ob - o);
            d = std::min(d, bins - d);
            if (d < 1.0) hist[(yc * cells + xc) * bins + o] += weight * wy * wx * (1.0 - d);
          }
        }
      }
    }
  }
  return detail::finish_descriptor(hist, params);
}

ScoreMap score_map(const NormalizedImage& img, const SvmModel& model, double threshold) {
  ScoreMap out{Grid<std::uint8_t>::like(img.combined, std::uint8_t{0}), Field::like(img.combined)};
  for (int v = 0; v < img.combined.height(); ++v) {
    for (int u = 0; u < img.combined.width(); ++u) {
      if (!img.valid(u, v)) continue;
      const double s = score_pixel(model, reference::descriptor_at(img.combined, u, v, model.descriptor));
      out.scores(u, v) = s;
      out.mask(u, v) = s >= threshold;
    }
  }
  return out;
}

HoughAccumulator hough_accumulate(const Grid<std::uint8_t>& mask, const Field& scores,
                                  const HoughParams& params) {
  HoughAccumulator acc;
  acc.theta_bins = std::max(1, static_cast<int>(std::lround(std::numbers::pi / params.theta_resolution)));
  acc.center_u = 0.5 * (mask.width() - 1);
  acc.center_v = 0.5 * (mask.height() - 1);
  acc.rho_offset =
      static_cast<int>(std::ceil(0.5 * std::hypot(mask.width(), mask.height()) / params.rho_resolution)) + 1;
  acc.rho_bins = 2 * acc.rho_offset + 1;
  acc.votes.assign(static_cast<std::size_t>(acc.theta_bins) * acc.rho_bins, 0);
  for (int v = 0; v < mask.height(); ++v) {
    for (int u = 0; u < mask.width(); ++u) {
      if (!mask(u, v)) continue;
      const auto vote = std::llround((params.weighted ? scores(u, v) : 1.0) * kVoteScale);
      for (int j = 0; j < acc.theta_bins; ++j) {
        const double theta = j * params.theta_resolution;
        const double rho = (u - acc.center_u) * std::cos(theta) + (v - acc.center_v) * std::sin(theta);
        const int r = static_cast<int>(std::lround(rho / params.rho_resolution)) + acc.rho_offset;
        acc.votes[static_cast<std::size_t>(j) * acc.rho_bins + r] += vote;
      }
    }
  }
  return acc;
}

}  // namespace wrinkle::reference
