#include "wrinkle/classify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "wrinkle/gridio.hpp"
#include "wrinkle/rng.hpp"

namespace wrinkle {
namespace {

constexpr int kCells = 4;
constexpr int kBins = 8;
constexpr double kClamp = 0.2;

std::uint64_t content_hash(const PixelDescriptor& d, int label) {
  std::uint64_t h = 0xcbf29ce484222325ull ^ static_cast<std::uint64_t>(label + 2);
  for (const float x : d) {
    h ^= std::bit_cast<std::uint32_t>(x);
    h *= 0x100000001b3ull;
  }
  return mix64(h);
}

}  // namespace

GradientField::GradientField(const Field& img)
    : magnitude(Field::like(img)), angle(Field::like(img)), bin(Field::like(img)) {
  constexpr double bins_per_rad = kBins / (2.0 * std::numbers::pi);
  const int w = img.width();
  const int h = img.height();
#pragma omp parallel for schedule(static)
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const double gx = 0.5 * (img.reflect(u + 1, v) - img.reflect(u - 1, v));
      const double gy = 0.5 * (img.reflect(u, v + 1) - img.reflect(u, v - 1));
      magnitude(u, v) = std::hypot(gx, gy);
      angle(u, v) = std::atan2(gy, gx);
      double ob = angle(u, v) * bins_per_rad;
      if (ob < 0.0) ob += kBins;
      bin(u, v) = ob;
    }
  }
}

namespace {

// Spatial part of the descriptor weights, one entry per patch offset.
struct PatchTable {
  std::array<double, kPatchSize * kPatchSize> weight;
  std::array<int, kPatchSize * kPatchSize> x0, y0;
  std::array<double, kPatchSize * kPatchSize> fx, fy;

  PatchTable() {
    constexpr int half = kPatchSize / 2;
    constexpr double sigma = 0.5 * kPatchSize;
    for (int dy = -half; dy < half; ++dy) {
      for (int dx = -half; dx < half; ++dx) {
        const int k = (dy + half) * kPatchSize + (dx + half);
        const double px = dx + 0.5, py = dy + 0.5;
        weight[k] = std::exp(-(px * px + py * py) / (2.0 * sigma * sigma));
        const double cx = (px + half) / (kPatchSize / kCells) - 0.5;
        const double cy = (py + half) / (kPatchSize / kCells) - 0.5;
        x0[k] = static_cast<int>(std::floor(cx));
        y0[k] = static_cast<int>(std::floor(cy));
        fx[k] = cx - x0[k];
        fy[k] = cy - y0[k];
      }
    }
  }
};

const PatchTable& patch_table() {
  static const PatchTable table;
  return table;
}

}  // namespace

PixelDescriptor descriptor_at(const GradientField& g, int u, int v,
                              const DescriptorParams& params) {
  std::array<double, kDescriptorSize> hist{};
  constexpr int half = kPatchSize / 2;
  const PatchTable& tab = patch_table();
  const int w = g.magnitude.width();
  const int h = g.magnitude.height();

  for (int dy = -half; dy < half; ++dy) {
    const int sv = reflect_index(v + dy, h);
    for (int dx = -half; dx < half; ++dx) {
      const int su = reflect_index(u + dx, w);
      const double mag = g.magnitude(su, sv);
      if (mag == 0.0) continue;
      const int k = (dy + half) * kPatchSize + (dx + half);
      const double weight = mag * tab.weight[k];
      const double ob = g.bin(su, sv);
      int o0 = static_cast<int>(std::floor(ob));
      const double fo = ob - o0;
      o0 %= kBins;
      const int o1 = (o0 + 1) % kBins;
      for (int iy = 0; iy < 2; ++iy) {
        const int yc = tab.y0[k] + iy;
        if (yc < 0 || yc >= kCells) continue;
        const double wy = iy ? tab.fy[k] : 1.0 - tab.fy[k];
        for (int ix = 0; ix < 2; ++ix) {
          const int xc = tab.x0[k] + ix;
          if (xc < 0 || xc >= kCells) continue;
          const double wxy = weight * wy * (ix ? tab.fx[k] : 1.0 - tab.fx[k]);
          const int base = (yc * kCells + xc) * kBins;
          hist[base + o0] += wxy * (1.0 - fo);
          hist[base + o1] += wxy * fo;
        }
      }
    }
  }
  return detail::finish_descriptor(hist, params);
}

namespace detail {

PixelDescriptor finish_descriptor(std::array<double, kDescriptorSize>& hist,
                                  const DescriptorParams& params) {
  PixelDescriptor out{};
  double n2 = 0.0;
  for (const double x : hist) n2 += x * x;
  const double n = std::sqrt(n2);
  if (!(n >= params.contrast_threshold) || n == 0.0) return out;
  double m2 = 0.0;
  for (auto& x : hist) {
    x = std::min(x / n, kClamp);
    m2 += x * x;
  }
  const double m = std::sqrt(m2);
  for (int i = 0; i < kDescriptorSize; ++i) out[i] = static_cast<float>(hist[i] / m);
  return out;
}

}  // namespace detail

PixelDescriptor descriptor_at(const Field& img, int u, int v, const DescriptorParams& params) {
  // Only the 18x18 neighbourhood matters, but a full gradient pass keeps this simple.
  return descriptor_at(GradientField(img), u, v, params);
}

PixelDescriptor descriptor_at(const GrayImage& img, int u, int v, const DescriptorParams& params) {
  return descriptor_at(to_field(img), u, v, params);
}

double descriptor_norm(const PixelDescriptor& d) {
  double s = 0.0;
  for (const float x : d) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

void TrainingSet::append(const TrainingSet& other) {
  positives.insert(positives.end(), other.positives.begin(), other.positives.end());
  negatives.insert(negatives.end(), other.negatives.begin(), other.negatives.end());
  provenance.insert(provenance.end(), other.provenance.begin(), other.provenance.end());
}

TrainingSet build_training_set(const Field& img, const LabelMask& mask, int negatives_per_positive,
                               std::uint64_t seed, const DescriptorParams& params,
                               const Grid<std::uint8_t>* valid) {
  if (!img.same_shape(mask)) throw ConfigError("training image and label mask differ in size");
  if (negatives_per_positive < 0) throw ConfigError("negatives_per_positive must be >= 0");
  std::vector<std::size_t> pos;
  std::vector<std::pair<std::uint64_t, std::size_t>> neg_keys;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (valid && !(*valid)[i]) continue;
    if (mask[i] == Label::wrinkle) {
      pos.push_back(i);
    } else {
      neg_keys.emplace_back(keyed_hash(seed, 0x6e6567ull, i), i);
    }
  }
  if (pos.empty()) throw StageError("train", "label mask has no wrinkle pixels");

  const std::size_t want =
      std::min(neg_keys.size(), pos.size() * static_cast<std::size_t>(negatives_per_positive));
  std::partial_sort(neg_keys.begin(), neg_keys.begin() + static_cast<std::ptrdiff_t>(want),
                    neg_keys.end());
  std::vector<std::size_t> neg(want);
  for (std::size_t k = 0; k < want; ++k) neg[k] = neg_keys[k].second;
  std::sort(neg.begin(), neg.end());

  const GradientField g(img);
  const int w = img.width();
  auto describe = [&](const std::vector<std::size_t>& idx) {
    std::vector<PixelDescriptor> out(idx.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(idx.size()); ++k) {
      out[k] = descriptor_at(g, static_cast<int>(idx[k] % w), static_cast<int>(idx[k] / w), params);
    }
    return out;
  };
  TrainingSet ts;
  ts.positives = describe(pos);
  ts.negatives = describe(neg);
  return ts;
}

double SvmModel::margin(const PixelDescriptor& d) const {
  double s = bias;
  for (int i = 0; i < kDescriptorSize; ++i) s += weights[i] * d[i];
  return s;
}

bool operator==(const SvmModel& a, const SvmModel& b) {
  return a.weights == b.weights && a.bias == b.bias && a.slope == b.slope &&
         a.offset == b.offset && a.hyper.lambda == b.hyper.lambda &&
         a.hyper.epochs == b.hyper.epochs && a.hyper.seed == b.hyper.seed &&
         a.hyper.calibrate == b.hyper.calibrate &&
         a.descriptor.contrast_threshold == b.descriptor.contrast_threshold;
}

namespace {

struct Example {
  const PixelDescriptor* x;
  int y;
  double weight;
  std::uint64_t key;
};

// Platt scaling: fits sigmoid(A m + B) to labels by Newton's method.
void calibrate(SvmModel& model, const std::vector<Example>& ex) {
  double a = 1.0, b = 0.0;
  for (int it = 0; it < 100; ++it) {
    double ga = 0, gb = 0, haa = 0, hab = 0, hbb = 0;
    for (const auto& e : ex) {
      const double m = model.margin(*e.x);
      const double p = sigmoid_score(a * m + b);
      const double t = e.y > 0 ? 1.0 : 0.0;
      const double r = (p - t) * e.weight;
      const double s = std::max(p * (1.0 - p), 1e-12) * e.weight;
      ga += r * m;
      gb += r;
      haa += s * m * m;
      hab += s * m;
      hbb += s;
    }
    haa += 1e-9;
    hbb += 1e-9;
    const double det = haa * hbb - hab * hab;
    if (!(det > 0.0)) break;
    const double da = (hbb * ga - hab * gb) / det;
    const double db = (haa * gb - hab * ga) / det;
    a -= da;
    b -= db;
    if (std::abs(da) + std::abs(db) < 1e-10) break;
  }
  if (std::isfinite(a) && std::isfinite(b)) {
    model.slope = a;
    model.offset = b;
  }
}

}  // namespace

SvmModel train(const TrainingSet& ts, const SvmHyper& hyper, const DescriptorParams& descriptor) {
  if (ts.positives.empty() || ts.negatives.empty()) {
    throw StageError("train", "both positive and negative examples are required");
  }
  if (!(hyper.lambda > 0.0) || hyper.epochs < 1) {
    throw ConfigError("svm requires lambda > 0 and epochs >= 1");
  }

  std::map<std::pair<int, PixelDescriptor>, std::size_t> counts;
  for (const auto& d : ts.positives) ++counts[{+1, d}];
  for (const auto& d : ts.negatives) ++counts[{-1, d}];
  double total = 0.0;
  for (const auto& kv : counts) total += static_cast<double>(kv.second);
  const double mean_count = total / static_cast<double>(counts.size());

  std::vector<Example> ex;
  ex.reserve(counts.size());
  for (const auto& [key, count] : counts) {
    ex.push_back({&key.second, key.first, static_cast<double>(count) / mean_count,
                  content_hash(key.second, key.first)});
  }

  SvmModel model;
  model.hyper = hyper;
  model.descriptor = descriptor;
  std::array<double, kDescriptorSize>& w = model.weights;
  double b = 0.0;
  std::array<double, kDescriptorSize> avg_w{};
  double avg_b = 0.0;
  std::size_t avg_n = 0;

  const double lambda = hyper.lambda;
  const double t0 = 1.0 / lambda;
  double t = 0.0;
  std::vector<std::pair<std::uint64_t, std::size_t>> order(ex.size());
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (std::size_t i = 0; i < ex.size(); ++i) {
      order[i] = {keyed_hash(hyper.seed, static_cast<std::uint64_t>(epoch), ex[i].key), i};
    }
    std::sort(order.begin(), order.end());
    const bool last = epoch + 1 == hyper.epochs;
    for (const auto& [h, i] : order) {
      const Example& e = ex[i];
      const double eta = 1.0 / (lambda * (t + t0));
      t += 1.0;
      double m = b;
      for (int k = 0; k < kDescriptorSize; ++k) m += w[k] * (*e.x)[k];
      const double shrink = 1.0 - eta * lambda;
      for (auto& wk : w) wk *= shrink;
      if (e.y * m < 1.0) {
        const double step = eta * e.weight * e.y;
        for (int k = 0; k < kDescriptorSize; ++k) w[k] += step * (*e.x)[k];
        b += step;
      }
      if (last) {
        for (int k = 0; k < kDescriptorSize; ++k) avg_w[k] += w[k];
        avg_b += b;
        ++avg_n;
      }
    }
    for (const double wk : w) {
      if (!std::isfinite(wk) || !std::isfinite(b)) {
        throw StageError("train", "hinge-loss SGD diverged (lambda=" +
                                      std::to_string(lambda) + ")");
      }
    }
  }
  for (int k = 0; k < kDescriptorSize; ++k) w[k] = avg_w[k] / static_cast<double>(avg_n);
  model.bias = avg_b / static_cast<double>(avg_n);
  if (hyper.calibrate) calibrate(model, ex);
  return model;
}

double sigmoid_score(double z) {
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  const double hi = std::nextafter(1.0, 0.0);
  const double s = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  return std::clamp(s, lo, hi);
}

double score_pixel(const SvmModel& model, const PixelDescriptor& d) {
  return sigmoid_score(model.slope * model.margin(d) + model.offset);
}

void save_model(const SvmModel& model, std::ostream& out) {
  char head[256];
  std::snprintf(head, sizeof head, "SVMW %d %.17g %d %llu %d %.17g\n", kDescriptorSize,
                model.hyper.lambda, model.hyper.epochs,
                static_cast<unsigned long long>(model.hyper.seed), model.hyper.calibrate ? 1 : 0,
                model.descriptor.contrast_threshold);
  out << head;
  std::vector<double> values(model.weights.begin(), model.weights.end());
  values.push_back(model.bias);
  values.push_back(model.slope);
  values.push_back(model.offset);
  for (const double v : values) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
}

void save_model(const SvmModel& model, const std::filesystem::path& path) {
  std::ostringstream os;
  save_model(model, os);
  write_file_atomic(path, os.str());
}

SvmModel load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("malformed header: empty model file");
  std::istringstream hs(line);
  std::string magic;
  int dim = 0, epochs = 0, cal = 0;
  unsigned long long seed = 0;
  double lambda = 0.0, contrast = 0.0;
  if (!(hs >> magic >> dim >> lambda >> epochs >> seed >> cal >> contrast) || magic != "SVMW") {
    throw FormatError("malformed header: expected SVMW model");
  }
  if (dim != kDescriptorSize) throw FormatError("model dimension must be 128");
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t n = kDescriptorSize + 3;
  if (raw.size() != n * 8) throw FormatError("length mismatch in model payload");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[8 * i + k])) << (8 * k);
    }
    v[i] = std::bit_cast<double>(bits);
    if (!std::isfinite(v[i])) throw FormatError("non-finite model parameter");
  }
  SvmModel m;
  std::copy_n(v.begin(), kDescriptorSize, m.weights.begin());
  m.bias = v[kDescriptorSize];
  m.slope = v[kDescriptorSize + 1];
  m.offset = v[kDescriptorSize + 2];
  m.hyper = {lambda, epochs, seed, cal != 0};
  m.descriptor.contrast_threshold = contrast;
  return m;
}

SvmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open model " + path.string());
  return load_model(in);
}

double ClassifierMetrics::accuracy() const {
  const std::size_t n = positives + negatives;
  return n ? static_cast<double>(true_positives + true_negatives) / n : 0.0;
}

double ClassifierMetrics::recall() const {
  return positives ? static_cast<double>(true_positives) / positives : 0.0;
}

void ClassifierMetrics::add(const ClassifierMetrics& o) {
  positives += o.positives;
  negatives += o.negatives;
  true_positives += o.true_positives;
  true_negatives += o.true_negatives;
}

ClassifierMetrics evaluate(const SvmModel& model, const TrainingSet& ts, double threshold) {
  ClassifierMetrics m;
  m.positives = ts.positives.size();
  m.negatives = ts.negatives.size();
  for (const auto& d : ts.positives) m.true_positives += score_pixel(model, d) >= threshold;
  for (const auto& d : ts.negatives) m.true_negatives += score_pixel(model, d) < threshold;
  return m;
}

}  // namespace wrinkle
