#include "wrinkle/discont.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <optional>

namespace wrinkle {
namespace {

struct Point {
  double x;  // pixel u relative to the accumulator center
  double y;
  int u;
  int v;
  double score;
  std::int64_t vote;
};

std::vector<Point> masked_points(const Grid<std::uint8_t>& mask, const Field& scores,
                                 const HoughParams& params, double cu, double cv) {
  std::vector<Point> pts;
  for (int v = 0; v < mask.height(); ++v) {
    for (int u = 0; u < mask.width(); ++u) {
      if (!mask(u, v)) continue;
      const double s = scores(u, v);
      const double w = params.weighted ? s : 1.0;
      pts.push_back({u - cu, v - cv, u, v, s, std::llround(w * kVoteScale)});
    }
  }
  return pts;
}

HoughAccumulator make_accumulator(int width, int height, const HoughParams& params) {
  if (!(params.rho_resolution > 0.0) || !(params.theta_resolution > 0.0)) {
    throw ConfigError("hough resolutions must be positive");
  }
  HoughAccumulator acc;
  acc.theta_bins = std::max(1, static_cast<int>(std::lround(std::numbers::pi / params.theta_resolution)));
  acc.center_u = 0.5 * (width - 1);
  acc.center_v = 0.5 * (height - 1);
  const double max_rho = 0.5 * std::hypot(width, height);
  acc.rho_offset = static_cast<int>(std::ceil(max_rho / params.rho_resolution)) + 1;
  acc.rho_bins = 2 * acc.rho_offset + 1;
  acc.votes.assign(static_cast<std::size_t>(acc.theta_bins) * acc.rho_bins, 0);
  return acc;
}

// Weighted total-least-squares line through points: centroid + unit direction.
struct LineFit {
  Vec2 centroid;
  Vec2 dir;
  bool ok = false;
};

LineFit fit_line(const std::vector<const Point*>& pts) {
  LineFit f;
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (const Point* p : pts) {
    sw += p->score;
    sx += p->score * p->u;
    sy += p->score * p->v;
  }
  if (!(sw > 0.0)) return f;
  f.centroid = {sx / sw, sy / sw};
  Sym2 c;
  for (const Point* p : pts) {
    const double dx = p->u - f.centroid.x;
    const double dy = p->v - f.centroid.y;
    c.xx += p->score * dx * dx;
    c.xy += p->score * dx * dy;
    c.yy += p->score * dy * dy;
  }
  const Eigen2 e = eigen(c);
  f.dir = {std::cos(e.major_angle), std::sin(e.major_angle)};
  f.ok = e.major > 0.0;
  return f;
}

// Normal-form parameters (rho relative to the accumulator center, theta in [0, pi)).
std::pair<double, double> normal_form(Vec2 point, Vec2 dir, double cu, double cv) {
  double theta = std::atan2(dir.x, -dir.y);  // normal = (-dir.y, dir.x)
  Vec2 n{-dir.y, dir.x};
  if (theta < 0.0 || theta >= std::numbers::pi) {
    theta = fold_angle_pi(theta);
    n = {-n.x, -n.y};
  }
  const double rho = (point.x - cu) * n.x + (point.y - cv) * n.y;
  return {rho, theta};
}

}  // namespace

NormalizedImage normalize(const GrayImage& i1, const GrayImage& i2, const GrayImage& ref1,
                          const GrayImage& ref2, double eps_ref) {
  if (!i1.same_shape(i2) || !i1.same_shape(ref1) || !i1.same_shape(ref2)) {
    throw ConfigError("illumination and reference images must have identical dimensions");
  }
  NormalizedImage out{Field::like(i1), Field::like(i1), Field::like(i1),
                      Grid<std::uint8_t>::like(i1, std::uint8_t{1})};
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(i1.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double r1 = ref1[i];
    const double r2 = ref2[i];
    if (r1 < eps_ref || r2 < eps_ref) {
      out.valid[i] = 0;
      continue;
    }
    const double a = i1[i] / r1;
    const double b = i2[i] / r2;
    out.first[i] = a;
    out.second[i] = b;
    out.combined[i] = std::sqrt(a * a + b * b);
  }
  return out;
}

ScoreMap score_map(const NormalizedImage& img, const SvmModel& model, double threshold) {
  ScoreMap out{Grid<std::uint8_t>::like(img.combined, std::uint8_t{0}), Field::like(img.combined)};
  const GradientField g(img.combined);
  const int w = img.combined.width();
  const int h = img.combined.height();
#pragma omp parallel for schedule(dynamic, 4)
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (!img.valid(u, v)) continue;
      const double s = score_pixel(model, descriptor_at(g, u, v, model.descriptor));
      out.scores(u, v) = s;
      out.mask(u, v) = s >= threshold;
    }
  }
  return out;
}

HoughAccumulator hough_accumulate(const Grid<std::uint8_t>& mask, const Field& scores,
                                  const HoughParams& params) {
  HoughAccumulator acc = make_accumulator(mask.width(), mask.height(), params);
  const auto pts = masked_points(mask, scores, params, acc.center_u, acc.center_v);
  std::vector<double> cs(acc.theta_bins), sn(acc.theta_bins);
  for (int j = 0; j < acc.theta_bins; ++j) {
    cs[j] = std::cos(j * params.theta_resolution);
    sn[j] = std::sin(j * params.theta_resolution);
  }
  const double inv_res = 1.0 / params.rho_resolution;

#pragma omp parallel
  {
    std::vector<std::int64_t> local(acc.votes.size(), 0);
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(pts.size()); ++k) {
      const Point& p = pts[k];
      for (int j = 0; j < acc.theta_bins; ++j) {
        const int r = static_cast<int>(std::lround((p.x * cs[j] + p.y * sn[j]) * inv_res)) +
                      acc.rho_offset;
        local[static_cast<std::size_t>(j) * acc.rho_bins + r] += p.vote;
      }
    }
#pragma omp critical
    for (std::size_t i = 0; i < local.size(); ++i) acc.votes[i] += local[i];
  }
  return acc;
}

std::vector<std::size_t> hough_peaks(const HoughAccumulator& acc, const HoughParams& params) {
  const auto min_votes = static_cast<std::int64_t>(std::ceil(params.min_votes * kVoteScale));
  const int rw = std::max(1, static_cast<int>(std::ceil(params.nms_rho / params.rho_resolution)) - 1);
  const int tw =
      std::max(1, static_cast<int>(std::ceil(params.nms_theta / params.theta_resolution)) - 1);
  std::vector<std::size_t> peaks;
  for (int j = 0; j < acc.theta_bins; ++j) {
    for (int r = 0; r < acc.rho_bins; ++r) {
      const std::int64_t here = acc.at(j, r);
      if (here < min_votes || here <= 0) continue;
      const std::size_t idx = static_cast<std::size_t>(j) * acc.rho_bins + r;
      bool is_max = true;
      for (int dj = -tw; dj <= tw && is_max; ++dj) {
        int jj = j + dj;
        bool flip = false;
        if (jj < 0) {
          jj += acc.theta_bins;
          flip = true;
        } else if (jj >= acc.theta_bins) {
          jj -= acc.theta_bins;
          flip = true;
        }
        for (int dr = -rw; dr <= rw; ++dr) {
          if (dj == 0 && dr == 0) continue;
          int rr = r + dr;
          if (flip) rr = 2 * acc.rho_offset - rr;
          if (rr < 0 || rr >= acc.rho_bins) continue;
          const std::int64_t other = acc.at(jj, rr);
          const std::size_t oidx = static_cast<std::size_t>(jj) * acc.rho_bins + rr;
          if (other > here || (other == here && oidx < idx)) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.push_back(idx);
    }
  }
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) {
    if (acc.votes[a] != acc.votes[b]) return acc.votes[a] > acc.votes[b];
    return a < b;
  });
  return peaks;
}

std::pair<double, double> line_distance(double rho_a, double theta_a, double rho_b,
                                        double theta_b) {
  const double d = std::abs(theta_a - theta_b);
  if (d <= 0.5 * std::numbers::pi) return {std::abs(rho_a - rho_b), d};
  return {std::abs(rho_a + rho_b), std::numbers::pi - d};
}

std::vector<Discontinuity> extract_segments(const Grid<std::uint8_t>& mask, const Field& scores,
                                            const HoughParams& params,
                                            const WorldTransform& transform) {
  std::vector<Discontinuity> out;
  const HoughAccumulator acc = hough_accumulate(mask, scores, params);
  const auto pts = masked_points(mask, scores, params, acc.center_u, acc.center_v);
  if (pts.empty()) return out;
  const auto peaks = hough_peaks(acc, params);
  std::vector<std::uint8_t> claimed(pts.size(), 0);

  auto gather = [&](auto&& dist) {
    std::vector<const Point*> sel;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (!claimed[k] && dist(pts[k]) <= params.gating_distance) sel.push_back(&pts[k]);
    }
    return sel;
  };

  for (const std::size_t peak : peaks) {
    const int j = static_cast<int>(peak / acc.rho_bins);
    const int r = static_cast<int>(peak % acc.rho_bins);
    const double theta = j * params.theta_resolution;
    const double rho = (r - acc.rho_offset) * params.rho_resolution;
    const double c = std::cos(theta);
    const double s = std::sin(theta);

    auto support = gather([&](const Point& p) { return std::abs(p.x * c + p.y * s - rho); });
    if (support.size() < 2) continue;
    LineFit fit = fit_line(support);
    if (!fit.ok) continue;
    auto off_line = [&fit](const Point& p) {
      return std::abs(cross(fit.dir, Vec2{p.u - fit.centroid.x, p.v - fit.centroid.y}));
    };
    support = gather(off_line);
    if (support.size() < 2) continue;

    // Split the projections into runs and keep the heaviest one.
    auto along = [&fit](const Point* p) {
      return dot(fit.dir, Vec2{p->u - fit.centroid.x, p->v - fit.centroid.y});
    };
    std::sort(support.begin(), support.end(), [&](const Point* a, const Point* b) {
      const double ta = along(a), tb = along(b);
      if (ta != tb) return ta < tb;
      return a < b;
    });
    std::size_t best_lo = 0, best_hi = 0;
    double best_weight = -1.0;
    for (std::size_t lo = 0; lo < support.size();) {
      std::size_t hi = lo + 1;
      double weight = support[lo]->score;
      while (hi < support.size() && along(support[hi]) - along(support[hi - 1]) <= params.gap_tolerance) {
        weight += support[hi]->score;
        ++hi;
      }
      if (along(support[hi - 1]) - along(support[lo]) >= params.min_length && weight > best_weight) {
        best_weight = weight;
        best_lo = lo;
        best_hi = hi;
      }
      lo = hi;
    }
    if (best_weight < 0.0) continue;
    std::vector<const Point*> run(support.begin() + static_cast<std::ptrdiff_t>(best_lo),
                                  support.begin() + static_cast<std::ptrdiff_t>(best_hi));

    if (params.max_length > 0.0 && along(run.back()) - along(run.front()) > params.max_length) {
      // Keep the heaviest window of max_length.
      std::size_t wlo = 0, bl = 0, bh = 0;
      double acc_w = 0.0, bw = -1.0;
      for (std::size_t hi = 0; hi < run.size(); ++hi) {
        acc_w += run[hi]->score;
        while (along(run[hi]) - along(run[wlo]) > params.max_length) acc_w -= run[wlo++]->score;
        if (acc_w > bw) {
          bw = acc_w;
          bl = wlo;
          bh = hi + 1;
        }
      }
      run = std::vector<const Point*>(run.begin() + static_cast<std::ptrdiff_t>(bl),
                                      run.begin() + static_cast<std::ptrdiff_t>(bh));
    }

    const LineFit seg_fit = fit_line(run);
    if (!seg_fit.ok) continue;
    double tmin = 0.0, tmax = 0.0;
    std::vector<SupportPixel> pixels;
    bool first = true;
    for (const Point* p : run) {
      const Vec2 d{p->u - seg_fit.centroid.x, p->v - seg_fit.centroid.y};
      if (std::abs(cross(seg_fit.dir, d)) > params.gating_distance) continue;
      const double t = dot(seg_fit.dir, d);
      tmin = first ? t : std::min(tmin, t);
      tmax = first ? t : std::max(tmax, t);
      first = false;
      pixels.push_back({p->u, p->v, p->score});
    }
    if (pixels.size() < 2) continue;
    if (tmax - tmin < params.min_length) continue;

    const Segment pix{seg_fit.centroid + tmin * seg_fit.dir, seg_fit.centroid + tmax * seg_fit.dir};
    const auto [seg_rho, seg_theta] =
        normal_form(seg_fit.centroid, seg_fit.dir, acc.center_u, acc.center_v);

    // Claim everything near the segment so no neighbouring peak re-detects it.
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (!claimed[k] && point_segment_distance(Vec2{double(pts[k].u), double(pts[k].v)}, pix.a,
                                                pix.b) < params.nms_rho) {
        claimed[k] = 1;
      }
    }
    bool suppressed = false;
    for (const auto& d : out) {
      const auto [dr, dt] = line_distance(seg_rho, seg_theta, d.rho, d.theta);
      if (dr < params.nms_rho && dt < params.nms_theta) {
        suppressed = true;
        break;
      }
    }
    if (suppressed) continue;

    Discontinuity d;
    d.id = static_cast<int>(out.size());
    d.pixel = pix;
    d.world = {transform.to_world(pix.a), transform.to_world(pix.b)};
    d.length = d.world.length();
    d.direction = d.world.direction();
    d.rho = seg_rho;
    d.theta = seg_theta;
    std::sort(pixels.begin(), pixels.end(), [](const SupportPixel& a, const SupportPixel& b) {
      return a.v != b.v ? a.v < b.v : a.u < b.u;
    });
    d.support = std::move(pixels);
    out.push_back(std::move(d));
  }
  return out;
}

namespace {

double sample_clamped(const Field& f, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0, fy = y - y0;
  auto at = [&f](int u, int v) {
    return f(std::clamp(u, 0, f.width() - 1), std::clamp(v, 0, f.height() - 1));
  };
  return (1 - fx) * (1 - fy) * at(x0, y0) + fx * (1 - fy) * at(x0 + 1, y0) +
         (1 - fx) * fy * at(x0, y0 + 1) + fx * fy * at(x0 + 1, y0 + 1);
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}


double cross_contrast(const NormalizedImage& img, Vec2 p, Vec2 nrm, int reach) {
  double c = 0.0;
  for (int h = 1; h <= reach; ++h) {
    const Vec2 pa = p + static_cast<double>(h) * nrm;
    const Vec2 pb = p - static_cast<double>(h) * nrm;
    c += std::abs(sample_clamped(img.first, pa.x, pa.y) - sample_clamped(img.first, pb.x, pb.y));
    c += std::abs(sample_clamped(img.second, pa.x, pa.y) - sample_clamped(img.second, pb.x, pb.y));
  }
  return c;
}

// Re-centres the line on the ridge: at stations along the segment the lateral
// offset of peak cross-line contrast is found and a line fitted through them.
Segment recentre(const NormalizedImage& img, const Segment& seg, int reach) {
  const double len = seg.length();
  const Vec2 dir = (seg.b - seg.a) * (1.0 / len);
  const Vec2 nrm{-dir.y, dir.x};
  constexpr double dstep = 0.25;
  const int nd = static_cast<int>(std::lround(reach / dstep));
  std::vector<Vec2> centres;
  std::vector<double> weights;
  for (double t = 2.0; t <= len - 2.0; t += 1.0) {
    const Vec2 p = seg.a + t * dir;
    std::vector<double> c(static_cast<std::size_t>(2 * nd + 1));
    std::size_t best = 0;
    for (int k = -nd; k <= nd; ++k) {
      const auto i = static_cast<std::size_t>(k + nd);
      c[i] = cross_contrast(img, p + (k * dstep) * nrm, nrm, reach);
      if (c[i] > c[best]) best = i;
    }
    if (best == 0 || best + 1 == c.size()) continue;
    const double denom = c[best - 1] - 2.0 * c[best] + c[best + 1];
    const double frac = denom < 0.0 ? 0.5 * (c[best - 1] - c[best + 1]) / denom : 0.0;
    const double off = (static_cast<double>(best) - nd + frac) * dstep;
    centres.push_back(p + off * nrm);
    weights.push_back(c[best]);
  }
  if (centres.size() < 3) return seg;
  double wsum = 0.0;
  Vec2 mean{0.0, 0.0};
  for (std::size_t i = 0; i < centres.size(); ++i) {
    mean = mean + weights[i] * centres[i];
    wsum += weights[i];
  }
  mean = mean * (1.0 / wsum);
  Sym2 cov{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < centres.size(); ++i) {
    const Vec2 d = centres[i] - mean;
    cov.xx += weights[i] * d.x * d.x;
    cov.xy += weights[i] * d.x * d.y;
    cov.yy += weights[i] * d.y * d.y;
  }
  const double angle = eigen(cov).major_angle;
  Vec2 ndir{std::cos(angle), std::sin(angle)};
  if (dot(ndir, dir) < 0.0) ndir = ndir * -1.0;
  return {mean + dot(seg.a - mean, ndir) * ndir, mean + dot(seg.b - mean, ndir) * ndir};
}

}  // namespace

void refine_segments(std::vector<Discontinuity>& segments, const NormalizedImage& img,
                     const HoughParams& params, const WorldTransform& transform) {
  constexpr double step = 0.5;
  const double search = params.refine_search;
  for (Discontinuity& d : segments) {
    if (d.pixel.length() <= 0.0) continue;
    const Segment line = recentre(img, d.pixel, params.refine_reach);
    const double len = line.length();
    const Vec2 dir = (line.b - line.a) * (1.0 / len);
    const Vec2 nrm{-dir.y, dir.x};

    // Cross-line contrast sampled along the line, beyond both ends.
    const double t_lo = -search - 4.0;
    const int n = static_cast<int>(std::ceil((len + 2.0 * (search + 4.0)) / step)) + 1;
    std::vector<double> prof(static_cast<std::size_t>(n));
    std::vector<double> inner, outer;
    for (int i = 0; i < n; ++i) {
      const double t = t_lo + i * step;
      const double c = cross_contrast(img, line.a + t * dir, nrm, params.refine_reach);
      prof[static_cast<std::size_t>(i)] = c;
      if (t > 0.25 * len && t < 0.75 * len) inner.push_back(c);
      if (t < -search + 1.0 || t > len + search - 1.0) outer.push_back(c);
    }
    if (inner.empty() || outer.empty()) continue;
    const double top = median(inner);
    const double floor = median(outer);
    if (top <= floor) continue;
    const double level = 0.5 * (top + floor);

    // Walk in from outside the mask extent to the first half-contrast crossing.
    auto crossing = [&](int i, int di) -> std::optional<double> {
      while (i >= 0 && i < n && prof[static_cast<std::size_t>(i)] < level) i += di;
      if (i < 0 || i >= n || i - di < 0 || i - di >= n) return std::nullopt;
      const double hi = prof[static_cast<std::size_t>(i)];
      const double lo = prof[static_cast<std::size_t>(i - di)];
      return t_lo + (i - di * (hi - level) / (hi - lo)) * step;
    };
    const auto t0 = crossing(static_cast<int>(std::lround(4.0 / step)), 1);
    const auto t1 = crossing(n - 1 - static_cast<int>(std::lround(4.0 / step)), -1);
    if (!t0 || !t1 || *t1 - *t0 < params.min_length) continue;

    d.pixel = {line.a + *t0 * dir, line.a + *t1 * dir};
    d.world = {transform.to_world(d.pixel.a), transform.to_world(d.pixel.b)};
    d.length = d.world.length();
    d.direction = d.world.direction();
    std::erase_if(d.support, [&](const SupportPixel& s) {
      return point_segment_distance(Vec2{double(s.u), double(s.v)}, d.pixel.a, d.pixel.b) >
             params.gating_distance;
    });
  }
}

}  // namespace wrinkle
