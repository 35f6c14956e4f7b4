#include "slipform/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "slipform/error.hpp"

namespace slipform {

namespace {

struct Frame {
  double x0, y0;    // model point drawn at the panel's top-left corner
  double sx, sy;    // px per model unit
  double top;       // panel offset in px
  double margin;

  std::string point(Vec2 p) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f,%.3f", margin + (p.x - x0) * sx,
                  top + (y0 - p.y) * sy);
    return buf;
  }
};

/// Rotation angle and shear read off F = R (I + gamma s (x) m): F s = R s and
/// F m . F s = gamma.
std::pair<double, double> shear_coordinates(const SlipSystem &sys, const Mat2 &F) {
  const Vec2 fs = F * sys.s();
  const double theta = canonical_angle(angle_of(fs) - angle_of(sys.s()));
  return {theta, dot(F * sys.m(), fs)};
}

std::string fill_for(const SlipSystem &sys, const Mat2 &F) {
  const auto [theta, gamma] = shear_coordinates(sys, F);
  const double hue = (theta + kPi) / (2.0 * kPi) * 360.0;
  const double sat = 100.0 * std::tanh(std::fabs(gamma));
  char buf[64];
  std::snprintf(buf, sizeof buf, "hsl(%.1f,%.1f%%,60%%)", hue, sat);
  return buf;
}

Box extent(const std::vector<Polygon> &polys) {
  Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Polygon &p : polys) {
    for (const Vec2 &v : p) {
      b.x_lo = std::min(b.x_lo, v.x);
      b.x_hi = std::max(b.x_hi, v.x);
      b.y_lo = std::min(b.y_lo, v.y);
      b.y_hi = std::max(b.y_hi, v.y);
    }
  }
  return b;
}

}  // namespace

std::string render_svg(const PiecewiseAffineMap &map, const SvgOptions &opt) {
  if (map.cells.empty()) throw Error(Errc::InvalidMap, "nothing to render");
  std::vector<Polygon> reference;
  std::vector<Polygon> deformed;
  for (const Cell &c : map.cells) {
    reference.push_back(c.vertices);
    Polygon image;
    for (const Vec2 &v : c.vertices) image.push_back(c.evaluate(v));
    deformed.push_back(std::move(image));
  }
  const Box rb = extent(reference);
  const Box db = extent(deformed);
  const double margin = 10.0;
  const double inner = opt.width_px - 2.0 * margin;
  const double sx_ref = inner / std::max(rb.x_hi - rb.x_lo, 1e-300);
  const double sx_def = inner / std::max({db.x_hi - db.x_lo, db.y_hi - db.y_lo, 1e-300});
  const auto stretch = [&](double sx, const Box &b) {
    return std::max(1.0, opt.min_strip_px / (sx * std::max(b.y_hi - b.y_lo, 1e-300)));
  };
  const Frame ref{rb.x_lo, rb.y_hi, sx_ref, sx_ref * stretch(sx_ref, rb), margin, margin};
  const double ref_h = (rb.y_hi - rb.y_lo) * ref.sy;
  const Frame def{db.x_lo, db.y_hi, sx_def, sx_def * stretch(sx_def, db), ref_h + 3.0 * margin,
                  margin};
  const double height = def.top + (db.y_hi - db.y_lo) * def.sy + margin;

  // Dashes along s, in page orientation (y grows downward).
  const double hatch_deg = -angle_of({map.slip.s().x * ref.sx, map.slip.s().y * ref.sy}) * 180.0 / kPi;

  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "viewBox=\"0 0 %.3f %.3f\">\n",
                opt.width_px, height, opt.width_px, height);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<defs><pattern id=\"slip\" patternUnits=\"userSpaceOnUse\" width=\"12\" "
                "height=\"6\" patternTransform=\"rotate(%.4f)\"><line x1=\"0\" y1=\"3\" x2=\"12\" "
                "y2=\"3\" stroke=\"#333\" stroke-width=\"0.6\" stroke-dasharray=\"4,2\"/>"
                "</pattern></defs>\n",
                hatch_deg);
  out << buf;

  const auto polygons = [&](const std::vector<Polygon> &polys, const Frame &f) {
    for (std::size_t i = 0; i < polys.size(); ++i) {
      out << "  <polygon data-cell=\"" << i << "\" fill=\"" << fill_for(map.slip, map.cells[i].gradient)
          << "\" stroke=\"#222\" stroke-width=\"0.4\" points=\"";
      for (std::size_t k = 0; k < polys[i].size(); ++k) {
        out << (k ? " " : "") << f.point(polys[i][k]);
      }
      out << "\"/>\n";
    }
  };
  out << "<g id=\"reference\">\n";
  polygons(reference, ref);
  std::snprintf(buf, sizeof buf,
                "  <rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"url(#slip)\"/>\n",
                margin, margin, (rb.x_hi - rb.x_lo) * ref.sx, ref_h);
  out << buf << "</g>\n";
  out << "<g id=\"deformed\">\n";
  polygons(deformed, def);
  out << "</g>\n</svg>\n";
  return out.str();
}

void write_svg(const std::filesystem::path &path, const PiecewiseAffineMap &map,
               const SvgOptions &options) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::ParseError, "cannot open " + path.string() + " for writing");
  out << render_svg(map, options);
}

}  // namespace slipform
