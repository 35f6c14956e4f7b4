#pragma once

#include <cmath>
#include <numbers>

namespace slipform {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 &operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2 &operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2 &operator*=(double k) { x *= k; y *= k; return *this; }

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double k) { return {k * a.x, k * a.y}; }
  friend constexpr Vec2 operator/(Vec2 a, double k) { return {a.x / k, a.y / k}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
constexpr double norm2(Vec2 a) { return dot(a, a); }
/// Quarter turn counterclockwise: a^perp = R_{pi/2} a.
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline double angle_of(Vec2 a) { return std::atan2(a.y, a.x); }

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 from_columns(Vec2 c0, Vec2 c1) { return {c0.x, c1.x, c0.y, c1.y}; }

  constexpr Vec2 col0() const { return {a, c}; }
  constexpr Vec2 col1() const { return {b, d}; }
  constexpr double det() const { return a * d - b * c; }
  constexpr double trace() const { return a + d; }
  constexpr Mat2 transpose() const { return {a, c, b, d}; }
  constexpr double frobenius2() const { return a * a + b * b + c * c + d * d; }
  double frobenius() const { return std::sqrt(frobenius2()); }

  friend constexpr Mat2 operator+(Mat2 p, Mat2 q) { return {p.a + q.a, p.b + q.b, p.c + q.c, p.d + q.d}; }
  friend constexpr Mat2 operator-(Mat2 p, Mat2 q) { return {p.a - q.a, p.b - q.b, p.c - q.c, p.d - q.d}; }
  friend constexpr Mat2 operator*(double k, Mat2 p) { return {k * p.a, k * p.b, k * p.c, k * p.d}; }
  friend constexpr Mat2 operator*(Mat2 p, Mat2 q) {
    return {p.a * q.a + p.b * q.c, p.a * q.b + p.b * q.d,
            p.c * q.a + p.d * q.c, p.c * q.b + p.d * q.d};
  }
  friend constexpr Vec2 operator*(Mat2 p, Vec2 v) { return {p.a * v.x + p.b * v.y, p.c * v.x + p.d * v.y}; }
  friend constexpr bool operator==(Mat2, Mat2) = default;
};

/// u (x) v = u v^T.
constexpr Mat2 outer(Vec2 u, Vec2 v) { return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y}; }

/// Largest absolute entry.
inline double max_abs(Mat2 p) {
  return std::fmax(std::fmax(std::fabs(p.a), std::fabs(p.b)), std::fmax(std::fabs(p.c), std::fabs(p.d)));
}

/// Singular values (largest first) of a 2x2 matrix, closed form.
struct SingularValues {
  double largest;
  double smallest;
};

inline SingularValues singular_values(Mat2 p) {
  // Split into conformal and anti-conformal parts: sigma = (|q| +- |r|) with
  // q = ((a+d)/2, (c-b)/2), r = ((a-d)/2, (b+c)/2).
  const double q = std::hypot(0.5 * (p.a + p.d), 0.5 * (p.c - p.b));
  const double r = std::hypot(0.5 * (p.a - p.d), 0.5 * (p.b + p.c));
  return {q + r, std::fabs(q - r)};
}

}  // namespace slipform
