#include "slipform/compatibility.hpp"

#include <algorithm>
#include <limits>

#include "slipform/error.hpp"

namespace slipform {

ConnectionResult rank_one_gap(const SlipSystem &sys, ShearState from, ShearState to,
                              double tol) {
  // Canonical difference in (-pi, pi].
  double dtheta = canonical_angle(to.theta - from.theta);
  if (dtheta == -kPi) dtheta = kPi;
  const double dgamma = to.gamma - from.gamma;
  if (std::fabs(dtheta) <= tol) {
    if (std::fabs(dgamma) <= tol) return EqualStates{};
    return RankOneConnection{dgamma * (rotation(from.theta) * sys.s()), sys.m(),
                             ConnectionKind::SameAngle};
  }
  if (dtheta >= kPi) return NotConnected{std::numeric_limits<double>::infinity()};
  const double defect = std::fabs(dgamma - 2.0 * std::tan(0.5 * dtheta));
  if (defect > tol) return NotConnected{defect};
  const Vec2 dir = dgamma * sys.s() + 2.0 * sys.m();
  const Vec2 a = (dgamma / (4.0 + dgamma * dgamma)) * (rotation(to.theta) * dir);
  const Vec2 n = 2.0 * sys.s() + (from.gamma + to.gamma) * sys.m();
  return RankOneConnection{a, n, ConnectionKind::Kink};
}

double kink_shear_for_angle(double theta) {
  if (!(theta > -kPi && theta < kPi)) {
    throw Error(Errc::AngleOutOfRange, "kink angle must lie in (-pi, pi)");
  }
  return 2.0 * std::tan(0.5 * theta);
}

double InterfaceReport::worst() const {
  return std::max({endpoint_mismatch, rank_one_residual, normal_residual});
}

InterfaceReport check_interface(const Cell &a, const Cell &b, const Segment &shared) {
  InterfaceReport r;
  r.endpoint_mismatch = std::max(norm(a.evaluate(shared.p) - b.evaluate(shared.p)),
                                 norm(a.evaluate(shared.q) - b.evaluate(shared.q)));
  const Mat2 jump = b.gradient - a.gradient;
  r.rank_one_residual = singular_values(jump).smallest;
  const Vec2 d = shared.q - shared.p;
  const double len = norm(d);
  r.normal_residual = len > 0.0 ? norm(jump * (d / len)) : 0.0;
  return r;
}

InterfaceReport check_interface(const Cell &a, const Cell &b, double edge_tol) {
  const auto seg = common_edge(a, b, edge_tol);
  if (!seg) throw Error(Errc::NoSharedEdge, "cells do not share an edge");
  return check_interface(a, b, *seg);
}

bool MapValidation::tiling_ok(const ValidationTolerances &tol) const {
  return cells_convex && area_residual <= tol.tiling && overlap_residual <= tol.tiling &&
         containment_residual <= tol.tiling;
}

bool MapValidation::ok(const ValidationTolerances &tol) const {
  return tiling_ok(tol) && admissibility_residual <= tol.admissibility &&
         interface_residual <= tol.interface && tail_residual <= tol.tail;
}

MapValidation validate_map(const PiecewiseAffineMap &map) {
  MapValidation v;
  const Window &w = map.window;
  const double window_area = w.area();
  if (map.cells.empty() || !(window_area > 0.0)) {
    throw Error(Errc::InvalidMap, "map has no cells or an empty window");
  }
  const double scale = std::max(w.width(), 2.0 * w.half_height);

  double area_sum = 0.0;
  std::vector<Box> boxes;
  boxes.reserve(map.cells.size());
  for (const Cell &c : map.cells) {
    if (!is_convex_ccw(c.vertices, 1e-9)) v.cells_convex = false;
    area_sum += signed_area(c.vertices);
    boxes.push_back(bounding_box(c.vertices));
    for (const Vec2 &p : c.vertices) {
      const double excess = std::max({w.x_lo - p.x, p.x - w.x_hi, -w.half_height - p.y,
                                      p.y - w.half_height, 0.0});
      v.containment_residual = std::max(v.containment_residual, excess / scale);
    }
    v.admissibility_residual = std::max(
        v.admissibility_residual, is_admissible(map.slip, c.gradient, 0.0).residual);
  }
  v.area_residual = std::fabs(area_sum - window_area) / window_area;

  double overlap = 0.0;
  for (std::size_t i = 0; i < map.cells.size(); ++i) {
    for (std::size_t j = i + 1; j < map.cells.size(); ++j) {
      if (!boxes_overlap(boxes[i], boxes[j], 0.0)) continue;
      const Polygon common = intersect_convex(map.cells[i].vertices, map.cells[j].vertices);
      if (common.size() >= 3) overlap += area(common);
    }
  }
  v.overlap_residual = overlap / window_area;

  const auto edges = shared_edges(map);
  v.shared_edge_count = edges.size();
  for (const SharedEdge &e : edges) {
    const InterfaceReport r = check_interface(map.cells[e.a], map.cells[e.b], e.segment);
    // Endpoint mismatch scales with the window; measure it relative to it.
    v.interface_residual =
        std::max({v.interface_residual, r.endpoint_mismatch / std::max(scale, 1.0),
                  r.rank_one_residual, r.normal_residual});
  }

  const Mat2 left = make_shear(map.slip, map.left_state);
  const Mat2 right = make_shear(map.slip, map.right_state);
  const double slack = 1e-12 * scale;
  for (std::size_t i = 0; i < map.cells.size(); ++i) {
    const Mat2 &G = map.cells[i].gradient;
    if (boxes[i].x_lo < map.core_lo - slack) {
      v.tail_residual = std::max(v.tail_residual, max_abs(G - left));
    }
    if (boxes[i].x_hi > map.core_hi + slack) {
      v.tail_residual = std::max(v.tail_residual, max_abs(G - right));
    }
  }
  return v;
}

}  // namespace slipform
