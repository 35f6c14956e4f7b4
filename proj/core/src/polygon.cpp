#include "slipform/polygon.hpp"

#include <algorithm>

namespace slipform {

double signed_area(const Polygon &poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  // Shoelace relative to the first vertex keeps cancellation small.
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    twice += cross(poly[i] - poly[0], poly[i + 1] - poly[0]);
  }
  return 0.5 * twice;
}

Vec2 centroid(const Polygon &poly) {
  const std::size_t n = poly.size();
  if (n == 0) return {};
  if (n < 3) {
    Vec2 sum{};
    for (const Vec2 &v : poly) sum += v;
    return sum / static_cast<double>(n);
  }
  Vec2 acc{};
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double w = cross(poly[i] - poly[0], poly[i + 1] - poly[0]);
    acc += w * (poly[0] + poly[i] + poly[i + 1]);
    twice += w;
  }
  if (twice == 0.0) return poly[0];
  return acc / (3.0 * twice);
}

Box bounding_box(const Polygon &poly) {
  Box b{poly.front().x, poly.front().x, poly.front().y, poly.front().y};
  for (const Vec2 &v : poly) {
    b.x_lo = std::min(b.x_lo, v.x);
    b.x_hi = std::max(b.x_hi, v.x);
    b.y_lo = std::min(b.y_lo, v.y);
    b.y_hi = std::max(b.y_hi, v.y);
  }
  return b;
}

bool boxes_overlap(const Box &a, const Box &b, double slack) {
  return a.x_lo <= b.x_hi + slack && b.x_lo <= a.x_hi + slack && a.y_lo <= b.y_hi + slack &&
         b.y_lo <= a.y_hi + slack;
}

bool is_convex_ccw(const Polygon &poly, double tol) {
  const std::size_t n = poly.size();
  if (n < 3 || signed_area(poly) <= 0.0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e0 = poly[(i + 1) % n] - poly[i];
    const Vec2 e1 = poly[(i + 2) % n] - poly[(i + 1) % n];
    if (cross(e0, e1) < -tol * norm(e0) * norm(e1)) return false;
  }
  return true;
}

Polygon rectangle(double x_lo, double x_hi, double y_lo, double y_hi) {
  return {{x_lo, y_lo}, {x_hi, y_lo}, {x_hi, y_hi}, {x_lo, y_hi}};
}

namespace {

void push_distinct(Polygon &out, Vec2 v) {
  if (!out.empty() && out.back() == v) return;
  out.push_back(v);
}

}  // namespace

Polygon clip_halfplane(const Polygon &poly, Vec2 normal, double level) {
  Polygon out;
  const std::size_t n = poly.size();
  if (n == 0) return out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % n];
    const double da = dot(normal, a) - level;
    const double db = dot(normal, b) - level;
    if (da <= 0.0) push_distinct(out, a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      const double t = da / (da - db);
      push_distinct(out, a + t * (b - a));
    }
  }
  while (out.size() > 1 && out.back() == out.front()) out.pop_back();
  if (out.size() < 3) out.clear();
  return out;
}

Polygon clip_box(const Polygon &poly, const Box &box) {
  Polygon p = clip_halfplane(poly, {-1.0, 0.0}, -box.x_lo);
  p = clip_halfplane(p, {1.0, 0.0}, box.x_hi);
  p = clip_halfplane(p, {0.0, -1.0}, -box.y_lo);
  return clip_halfplane(p, {0.0, 1.0}, box.y_hi);
}

Polygon intersect_convex(const Polygon &a, const Polygon &b) {
  Polygon out = a;
  const std::size_t n = b.size();
  for (std::size_t i = 0; i < n && !out.empty(); ++i) {
    const Vec2 p = b[i];
    const Vec2 q = b[(i + 1) % n];
    // Interior of a CCW polygon is to the left: cross(q - p, x - p) >= 0.
    const Vec2 outward{q.y - p.y, p.x - q.x};
    out = clip_halfplane(out, outward, dot(outward, p));
  }
  return out;
}

Polygon transform(const Polygon &poly, Mat2 M, Vec2 shift) {
  Polygon out;
  out.reserve(poly.size());
  for (const Vec2 &v : poly) out.push_back(M * v + shift);
  if (M.det() < 0.0) std::reverse(out.begin(), out.end());
  return out;
}

Polygon simplify(const Polygon &poly, double tol) {
  Polygon pts;
  for (const Vec2 &v : poly) {
    if (pts.empty() || norm(v - pts.back()) > tol) pts.push_back(v);
  }
  while (pts.size() > 1 && norm(pts.back() - pts.front()) <= tol) pts.pop_back();
  bool changed = true;
  while (changed && pts.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec2 prev = pts[(i + pts.size() - 1) % pts.size()];
      const Vec2 next = pts[(i + 1) % pts.size()];
      const Vec2 d = next - prev;
      const double len = norm(d);
      if (len > 0.0 && std::fabs(cross(d, pts[i] - prev)) / len <= tol &&
          dot(pts[i] - prev, d) > 0.0 && dot(next - pts[i], d) > 0.0) {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  if (pts.size() < 3) pts.clear();
  return pts;
}

bool contains(const Polygon &poly, Vec2 x, double tol) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = poly[i];
    const Vec2 q = poly[(i + 1) % n];
    const double len = norm(q - p);
    if (len == 0.0) continue;
    if (cross(q - p, x - p) / len < -tol) return false;
  }
  return n >= 3;
}

}  // namespace slipform
