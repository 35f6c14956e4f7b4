#pragma once

// Convex polygon helpers. Polygons are vertex lists in counterclockwise
// order without repeating the first vertex.

#include <vector>

#include "slipform/matrix2.hpp"

namespace slipform {

using Polygon = std::vector<Vec2>;

struct Segment {
  Vec2 p;
  Vec2 q;
};

struct Box {
  double x_lo, x_hi, y_lo, y_hi;
};

double signed_area(const Polygon &poly);
inline double area(const Polygon &poly) { return std::fabs(signed_area(poly)); }

Vec2 centroid(const Polygon &poly);
Box bounding_box(const Polygon &poly);
bool boxes_overlap(const Box &a, const Box &b, double slack);

/// Counterclockwise and every turn left (collinear turns within `tol` allowed).
bool is_convex_ccw(const Polygon &poly, double tol = 1e-12);

Polygon rectangle(double x_lo, double x_hi, double y_lo, double y_hi);

/// Keeps the part with dot(normal, x) <= level. Drops vertices that coincide
/// after clipping; the result may be empty.
Polygon clip_halfplane(const Polygon &poly, Vec2 normal, double level);

Polygon clip_box(const Polygon &poly, const Box &box);

/// Intersection of two convex polygons (Sutherland-Hodgman).
Polygon intersect_convex(const Polygon &a, const Polygon &b);

/// x -> M x + shift applied to every vertex; reverses order when det M < 0 so
/// the result stays counterclockwise.
Polygon transform(const Polygon &poly, Mat2 M, Vec2 shift = {});

/// Edge i runs from vertex i to vertex i+1.
inline Segment edge(const Polygon &poly, std::size_t i) {
  return {poly[i], poly[(i + 1) % poly.size()]};
}

/// Removes consecutive duplicates and collinear middle vertices.
Polygon simplify(const Polygon &poly, double tol);

/// Closed containment with absolute slack `tol`.
bool contains(const Polygon &poly, Vec2 x, double tol);

}  // namespace slipform
