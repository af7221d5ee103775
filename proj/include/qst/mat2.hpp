#pragma once

#include <cmath>

namespace qst {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Row-major [[a, b], [c, d]].
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  double det() const { return a * d - b * c; }
};

inline Mat2 operator*(const Mat2& l, const Mat2& r) {
  return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
          l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
}
inline Vec2 operator*(const Mat2& l, const Vec2& v) {
  return {l.a * v.x + l.b * v.y, l.c * v.x + l.d * v.y};
}
inline Mat2 operator-(const Mat2& l, const Mat2& r) {
  return {l.a - r.a, l.b - r.b, l.c - r.c, l.d - r.d};
}
inline Mat2 operator*(double s, const Mat2& m) {
  return {s * m.a, s * m.b, s * m.c, s * m.d};
}
inline Mat2 transpose(const Mat2& m) { return {m.a, m.c, m.b, m.d}; }

inline Vec2 operator+(const Vec2& u, const Vec2& v) { return {u.x + v.x, u.y + v.y}; }
inline Vec2 operator-(const Vec2& u, const Vec2& v) { return {u.x - v.x, u.y - v.y}; }
inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
inline double dot(const Vec2& u, const Vec2& v) { return u.x * v.x + u.y * v.y; }
// v^perp = (v2, -v1)
inline Vec2 perp(const Vec2& v) { return {v.y, -v.x}; }
inline double norm2(const Vec2& v) { return std::hypot(v.x, v.y); }

// Entrywise absolute sum.
inline double norm1(const Mat2& m) {
  return std::abs(m.a) + std::abs(m.b) + std::abs(m.c) + std::abs(m.d);
}

}  // namespace qst
