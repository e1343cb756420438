#pragma once

#include <cmath>
#include <numbers>

namespace wrinkle {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
constexpr Vec2 lerp(Vec2 a, Vec2 b, double t) { return a + t * (b - a); }

/// Closed line segment between two world points.
struct Segment {
  Vec2 a;
  Vec2 b;

  double length() const { return distance(a, b); }
  Vec2 midpoint() const { return lerp(a, b, 0.5); }
  /// Direction angle folded into [0, pi).
  double direction() const;
};

/// Shortest distance from p to the closed segment [a, b].
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Folds an undirected line angle into [0, pi).
double fold_angle_pi(double angle);

/// Smallest difference between two undirected angles, in [0, pi/2].
double angle_diff_pi(double a, double b);

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double det() const { return xx * yy - xy * xy; }
  double trace() const { return xx + yy; }
};

struct Eigen2 {
  double major = 0.0;        ///< larger eigenvalue
  double minor = 0.0;        ///< smaller eigenvalue
  double major_angle = 0.0;  ///< direction of the major eigenvector, [0, pi)
};

/// Closed-form eigen-decomposition of a symmetric 2x2 matrix.
Eigen2 eigen(const Sym2& m);

/// R(angle) * diag(a, b) * R(angle)^T.
Sym2 rotate_diag(double a, double b, double angle);

/// Inverse of an SPD matrix; caller guarantees det > 0.
Sym2 inverse(const Sym2& m);

/// v^T M v.
double quad_form(const Sym2& m, Vec2 v);

}  // namespace wrinkle
