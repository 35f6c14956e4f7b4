#pragma once

// Continuous piecewise-affine deformations of a strip window, one affine map
// x -> gradient * x + offset per convex cell.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slipform/polygon.hpp"
#include "slipform/slip_geometry.hpp"

namespace slipform {

struct Cell {
  Polygon vertices;
  Mat2 gradient = Mat2::identity();
  Vec2 offset;

  Vec2 evaluate(Vec2 x) const { return gradient * x + offset; }
};

/// [x_lo, x_hi] x [-half_height, half_height].
struct Window {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double half_height = 0.0;

  double width() const { return x_hi - x_lo; }
  double area() const { return 2.0 * half_height * width(); }
  Box box() const { return {x_lo, x_hi, -half_height, half_height}; }
};

struct Provenance {
  std::string builder;
  std::vector<std::pair<std::string, double>> parameters;
};

/// Outside [core_lo, core_hi] every cell carries make_shear(left_state) on the
/// left and make_shear(right_state) on the right.
struct PiecewiseAffineMap {
  SlipSystem slip = SlipSystem::e1();
  Window window;
  double core_lo = 0.0;
  double core_hi = 0.0;
  ShearState left_state;
  ShearState right_state;
  std::vector<Cell> cells;
  Provenance provenance;

  /// First cell containing x (closed, slack 1e-12 relative to the window).
  std::optional<std::size_t> locate(Vec2 x) const;
  /// Throws Errc::InvalidRange if x lies outside every cell.
  Vec2 evaluate(Vec2 x) const;
};

/// Overlap of one edge of cell `a` with one edge of cell `b`; the segment is
/// oriented along cell `a`'s boundary.
struct SharedEdge {
  std::size_t a;
  std::size_t b;
  Segment segment;
};

/// Collinear, opposite-direction edge overlaps longer than `rel_tol` times
/// the window scale. T-junctions appear as partial overlaps.
std::vector<SharedEdge> shared_edges(const PiecewiseAffineMap &map, double rel_tol = 1e-9);

/// Shared overlap of two cells, if any.
std::optional<Segment> common_edge(const Cell &a, const Cell &b, double abs_tol);

/// Recomputes offsets so the map is continuous: cell 0 keeps its offset, the
/// rest follow by breadth-first continuity across shared edges. Throws
/// Errc::InvalidMap if the adjacency graph is disconnected.
void propagate_offsets(PiecewiseAffineMap &map);

/// Adds a constant so that the map takes `value` at `point`.
void anchor(PiecewiseAffineMap &map, Vec2 point, Vec2 value);

/// v'(x) = v(x - shift); window and core move with it.
PiecewiseAffineMap translated(const PiecewiseAffineMap &map, double shift_x);

/// v'(x) = Q v(Q^T x) for a rotation Q of the domain and range.
PiecewiseAffineMap conjugated(const PiecewiseAffineMap &map, Mat2 Q);

/// v'(x) = A v(A x) with A = diag(1, -1).
PiecewiseAffineMap mirrored(const PiecewiseAffineMap &map);

/// Extends both constant tails out to [x_lo, x_hi] by appending rectangles.
/// Requires the current tails to be constant at the window edges.
PiecewiseAffineMap extend_window(const PiecewiseAffineMap &map, double x_lo, double x_hi);

/// Clips every cell to `box` and discards slivers; window becomes the box.
PiecewiseAffineMap clipped(const PiecewiseAffineMap &map, const Box &box);

}  // namespace slipform
