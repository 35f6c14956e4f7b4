#include "slipform/piecewise_affine_map.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "slipform/error.hpp"

namespace slipform {

namespace {

double window_scale(const Window &w) {
  return std::max({w.width(), 2.0 * w.half_height, 1e-300});
}

}  // namespace

std::optional<std::size_t> PiecewiseAffineMap::locate(Vec2 x) const {
  const double tol = 1e-12 * window_scale(window);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (contains(cells[i].vertices, x, tol)) return i;
  }
  return std::nullopt;
}

Vec2 PiecewiseAffineMap::evaluate(Vec2 x) const {
  const auto idx = locate(x);
  if (!idx) throw Error(Errc::InvalidRange, "point lies outside the map's cells");
  return cells[*idx].evaluate(x);
}

std::optional<Segment> common_edge(const Cell &a, const Cell &b, double abs_tol) {
  const Polygon &pa = a.vertices;
  const Polygon &pb = b.vertices;
  std::optional<Segment> best;
  double best_len = abs_tol;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const Segment ea = edge(pa, i);
    const Vec2 da = ea.q - ea.p;
    const double la = norm(da);
    if (la <= abs_tol) continue;
    const Vec2 ua = da / la;
    for (std::size_t j = 0; j < pb.size(); ++j) {
      const Segment eb = edge(pb, j);
      // Opposite orientation: shared boundary of two CCW cells.
      if (dot(eb.q - eb.p, ua) >= 0.0) continue;
      if (std::fabs(cross(ua, eb.p - ea.p)) > abs_tol) continue;
      if (std::fabs(cross(ua, eb.q - ea.p)) > abs_tol) continue;
      const double t0 = std::max(0.0, dot(eb.q - ea.p, ua));
      const double t1 = std::min(la, dot(eb.p - ea.p, ua));
      if (t1 - t0 > best_len) {
        best_len = t1 - t0;
        best = Segment{ea.p + t0 * ua, ea.p + t1 * ua};
      }
    }
  }
  return best;
}

std::vector<SharedEdge> shared_edges(const PiecewiseAffineMap &map, double rel_tol) {
  const double tol = rel_tol * window_scale(map.window);
  std::vector<Box> boxes;
  boxes.reserve(map.cells.size());
  for (const Cell &c : map.cells) boxes.push_back(bounding_box(c.vertices));
  std::vector<SharedEdge> out;
  for (std::size_t i = 0; i < map.cells.size(); ++i) {
    for (std::size_t j = i + 1; j < map.cells.size(); ++j) {
      if (!boxes_overlap(boxes[i], boxes[j], tol)) continue;
      const Polygon &pa = map.cells[i].vertices;
      const Polygon &pb = map.cells[j].vertices;
      for (std::size_t ei = 0; ei < pa.size(); ++ei) {
        const Segment ea = edge(pa, ei);
        const Vec2 da = ea.q - ea.p;
        const double la = norm(da);
        if (la <= tol) continue;
        const Vec2 ua = da / la;
        for (std::size_t ej = 0; ej < pb.size(); ++ej) {
          const Segment eb = edge(pb, ej);
          if (dot(eb.q - eb.p, ua) >= 0.0) continue;
          if (std::fabs(cross(ua, eb.p - ea.p)) > tol) continue;
          if (std::fabs(cross(ua, eb.q - ea.p)) > tol) continue;
          const double t0 = std::max(0.0, dot(eb.q - ea.p, ua));
          const double t1 = std::min(la, dot(eb.p - ea.p, ua));
          if (t1 - t0 > tol) out.push_back({i, j, {ea.p + t0 * ua, ea.p + t1 * ua}});
        }
      }
    }
  }
  return out;
}

void propagate_offsets(PiecewiseAffineMap &map) {
  const std::size_t n = map.cells.size();
  if (n == 0) return;
  const auto edges = shared_edges(map);
  std::vector<std::vector<std::pair<std::size_t, Vec2>>> adjacency(n);
  for (const SharedEdge &e : edges) {
    const Vec2 mid = 0.5 * (e.segment.p + e.segment.q);
    adjacency[e.a].push_back({e.b, mid});
    adjacency[e.b].push_back({e.a, mid});
  }
  // Neighbours in cell-id order keep the propagation deterministic.
  for (auto &adj : adjacency) {
    std::stable_sort(adj.begin(), adj.end(),
                     [](const auto &l, const auto &r) { return l.first < r.first; });
  }
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  std::size_t visited = 1;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for (const auto &[j, mid] : adjacency[i]) {
      if (seen[j]) continue;
      seen[j] = true;
      ++visited;
      map.cells[j].offset = map.cells[i].evaluate(mid) - map.cells[j].gradient * mid;
      queue.push_back(j);
    }
  }
  if (visited != n) {
    throw Error(Errc::InvalidMap, "cell adjacency is disconnected (" + std::to_string(visited) +
                                      " of " + std::to_string(n) + " cells reached)");
  }
}

void anchor(PiecewiseAffineMap &map, Vec2 point, Vec2 value) {
  const Vec2 shift = value - map.evaluate(point);
  for (Cell &c : map.cells) c.offset += shift;
}

PiecewiseAffineMap translated(const PiecewiseAffineMap &map, double shift_x) {
  PiecewiseAffineMap out = map;
  const Vec2 t{shift_x, 0.0};
  for (Cell &c : out.cells) {
    for (Vec2 &v : c.vertices) v += t;
    c.offset -= c.gradient * t;
  }
  out.window.x_lo += shift_x;
  out.window.x_hi += shift_x;
  out.core_lo += shift_x;
  out.core_hi += shift_x;
  return out;
}

PiecewiseAffineMap conjugated(const PiecewiseAffineMap &map, Mat2 Q) {
  PiecewiseAffineMap out = map;
  const Mat2 Qt = Q.transpose();
  for (Cell &c : out.cells) {
    c.vertices = transform(c.vertices, Q);
    c.gradient = Q * c.gradient * Qt;
    c.offset = Q * c.offset;
  }
  return out;
}

PiecewiseAffineMap mirrored(const PiecewiseAffineMap &map) {
  constexpr Mat2 A{1.0, 0.0, 0.0, -1.0};
  PiecewiseAffineMap out = map;
  for (Cell &c : out.cells) {
    c.vertices = transform(c.vertices, A);
    c.gradient = A * c.gradient * A;
    c.offset = A * c.offset;
  }
  return out;
}

PiecewiseAffineMap extend_window(const PiecewiseAffineMap &map, double x_lo, double x_hi) {
  PiecewiseAffineMap out = map;
  const double H = map.window.half_height;
  const auto tail_cell = [&](double lo, double hi, Vec2 probe) {
    const auto idx = map.locate(probe);
    if (!idx) throw Error(Errc::InvalidMap, "tail probe outside the map");
    Cell c = map.cells[*idx];
    c.vertices = rectangle(lo, hi, -H, H);
    return c;
  };
  if (x_lo < map.window.x_lo) {
    out.cells.push_back(tail_cell(x_lo, map.window.x_lo, {map.window.x_lo, 0.0}));
    out.window.x_lo = x_lo;
  }
  if (x_hi > map.window.x_hi) {
    out.cells.push_back(tail_cell(map.window.x_hi, x_hi, {map.window.x_hi, 0.0}));
    out.window.x_hi = x_hi;
  }
  return out;
}

PiecewiseAffineMap clipped(const PiecewiseAffineMap &map, const Box &box) {
  PiecewiseAffineMap out = map;
  out.cells.clear();
  out.window = {box.x_lo, box.x_hi, 0.5 * (box.y_hi - box.y_lo)};
  const double scale = window_scale(out.window);
  const double min_area = 1e-14 * scale * scale;
  for (const Cell &c : map.cells) {
    Polygon p = simplify(clip_box(c.vertices, box), 1e-13 * scale);
    if (p.size() < 3 || area(p) <= min_area) continue;
    out.cells.push_back({std::move(p), c.gradient, c.offset});
  }
  out.core_lo = std::max(out.core_lo, box.x_lo);
  out.core_hi = std::min(out.core_hi, box.x_hi);
  return out;
}

}  // namespace slipform
