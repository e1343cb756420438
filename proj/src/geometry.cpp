#include "wrinkle/geometry.hpp"

#include <algorithm>

namespace wrinkle {

double Segment::direction() const {
  const Vec2 d = b - a;
  return fold_angle_pi(std::atan2(d.y, d.x));
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

double fold_angle_pi(double angle) {
  constexpr double pi = std::numbers::pi;
  double r = std::fmod(angle, pi);
  if (r < 0.0) r += pi;
  if (r >= pi) r -= pi;
  return r;
}

double angle_diff_pi(double a, double b) {
  const double d = fold_angle_pi(a - b);
  return std::min(d, std::numbers::pi - d);
}

Eigen2 eigen(const Sym2& m) {
  const double mean = 0.5 * (m.xx + m.yy);
  const double half_diff = 0.5 * (m.xx - m.yy);
  const double radius = std::hypot(half_diff, m.xy);
  Eigen2 e;
  e.major = mean + radius;
  e.minor = mean - radius;
  // Major eigenvector angle: 0.5 * atan2(2 xy, xx - yy).
  e.major_angle = fold_angle_pi(0.5 * std::atan2(2.0 * m.xy, m.xx - m.yy));
  return e;
}

Sym2 rotate_diag(double a, double b, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {a * c * c + b * s * s, (a - b) * c * s, a * s * s + b * c * c};
}

Sym2 inverse(const Sym2& m) {
  const double d = m.det();
  return {m.yy / d, -m.xy / d, m.xx / d};
}

double quad_form(const Sym2& m, Vec2 v) {
  return m.xx * v.x * v.x + 2.0 * m.xy * v.x * v.y + m.yy * v.y * v.y;
}

}  // namespace wrinkle
