#include "wrinkle/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "wrinkle/error.hpp"

using nlohmann::json;

namespace wrinkle {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// Dark blue through teal to yellow.
std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  static constexpr double stops[3][3] = {{0.15, 0.10, 0.40}, {0.10, 0.55, 0.55}, {0.98, 0.90, 0.15}};
  const double x = t * 2.0;
  const int i = std::min(1, static_cast<int>(x));
  const double f = x - i;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(255 * (stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                static_cast<int>(255 * (stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                static_cast<int>(255 * (stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
  return buf;
}

// Grey for p = 0 to red for p = 1.
std::string p_color(double p) {
  p = std::clamp(p, 0.0, 1.0);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(150 + 105 * p),
                static_cast<int>(150 - 130 * p), static_cast<int>(150 - 130 * p));
  return buf;
}

Vec2 pt(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

std::string render_overlay(const json& report, const FloatGrid& height) {
  const int w = height.width();
  const int h = height.height();
  const WorldTransform tf = height.transform();
  auto px = [&tf](Vec2 world) { return tf.to_pixel(world); };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w << "\" height=\""
     << h << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
     << "<defs>\n<marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" "
        "markerHeight=\"6\" orient=\"auto\"><path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#ffffff\"/></marker>\n"
     << "</defs>\n";

  // Heat layer, block-averaged to at most ~160 blocks across.
  const int block = std::max(1, (std::max(w, h) + 159) / 160);
  double lo = height[0], hi = height[0];
  for (const float v : height.values()) {
    lo = std::min(lo, static_cast<double>(v));
    hi = std::max(hi, static_cast<double>(v));
  }
  const double span = hi > lo ? hi - lo : 1.0;
  os << "<g id=\"height\" shape-rendering=\"crispEdges\">\n";
  for (int by = 0; by < h; by += block) {
    for (int bx = 0; bx < w; bx += block) {
      const int ex = std::min(w, bx + block), ey = std::min(h, by + block);
      double sum = 0.0;
      for (int v = by; v < ey; ++v) {
        for (int u = bx; u < ex; ++u) sum += height(u, v);
      }
      const double mean = sum / ((ex - bx) * (ey - by));
      os << "<rect x=\"" << bx << "\" y=\"" << by << "\" width=\"" << ex - bx << "\" height=\""
         << ey - by << "\" fill=\"" << ramp((mean - lo) / span) << "\"/>\n";
    }
  }
  os << "</g>\n";

  try {
    if (report.contains("bumps")) {
      os << "<g id=\"bumps\" fill=\"none\" stroke=\"#ffffff\">\n";
      for (const json& b : report["bumps"]) {
        const Vec2 c = px(pt(b.at("center")));
        const double deg = b.at("orientation").get<double>() * 180.0 / std::numbers::pi;
        for (const int k : {1, 2}) {
          os << "<ellipse cx=\"" << fmt(c.x) << "\" cy=\"" << fmt(c.y) << "\" rx=\""
             << fmt(k * b.at("d1").get<double>() / tf.cell_size) << "\" ry=\""
             << fmt(k * b.at("d2").get<double>() / tf.cell_size) << "\" transform=\"rotate("
             << fmt(deg) << ' ' << fmt(c.x) << ' ' << fmt(c.y) << ")\" stroke-width=\""
             << (k == 1 ? "1.5" : "0.8") << "\"" << (k == 2 ? " stroke-dasharray=\"4 3\"" : "")
             << "/>\n";
        }
      }
      os << "</g>\n";
    }
    if (report.contains("wrinkles")) {
      os << "<g id=\"wrinkles\" stroke-linecap=\"round\">\n";
      for (const json& wr : report["wrinkles"]) {
        const Vec2 a = px(pt(wr.at("endpoints").at(0)));
        const Vec2 b = px(pt(wr.at("endpoints").at(1)));
        const bool accepted = wr.at("accepted").get<bool>();
        os << "<line x1=\"" << fmt(a.x) << "\" y1=\"" << fmt(a.y) << "\" x2=\"" << fmt(b.x)
           << "\" y2=\"" << fmt(b.y) << "\" stroke=\"" << p_color(wr.at("p").get<double>())
           << "\" stroke-width=\"3\"" << (accepted ? "" : " stroke-dasharray=\"5 4\"") << "/>\n";
      }
      os << "</g>\n";
    }
    if (report.contains("plan")) {
      const json& plan = report["plan"];
      os << "<g id=\"plan\">\n";
      Vec2 pos = px(pt(plan.at("home")));
      for (const json& a : plan.at("actions")) {
        const Vec2 s = px(pt(a.at("start")));
        const Vec2 e = px(pt(a.at("end")));
        os << "<line x1=\"" << fmt(pos.x) << "\" y1=\"" << fmt(pos.y) << "\" x2=\"" << fmt(s.x)
           << "\" y2=\"" << fmt(s.y) << "\" stroke=\"#dddddd\" stroke-width=\"1\" "
           << "stroke-dasharray=\"2 3\"/>\n";
        if (a.at("kind").get<std::string>() == "sliding") {
          os << "<line x1=\"" << fmt(s.x) << "\" y1=\"" << fmt(s.y) << "\" x2=\"" << fmt(e.x)
             << "\" y2=\"" << fmt(e.y) << "\" stroke=\"#ffffff\" stroke-width=\"1.5\" "
             << "marker-end=\"url(#arrow)\"/>\n";
        } else {
          os << "<circle cx=\"" << fmt(s.x) << "\" cy=\"" << fmt(s.y)
             << "\" r=\"4\" fill=\"none\" stroke=\"#ffffff\" stroke-width=\"1.5\"/>\n";
        }
        os << "<text x=\"" << fmt(s.x + 4) << "\" y=\"" << fmt(s.y - 4)
           << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#ffffff\">"
           << a.at("order").get<int>() << "</text>\n";
        pos = e;
      }
      os << "</g>\n";
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("report malformed for overlay: ") + e.what());
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace wrinkle
