#pragma once

// SVG rendering of a map: the reference window above the deformed
// configuration, one polygon per cell in each.

#include <filesystem>
#include <string>

#include "slipform/piecewise_affine_map.hpp"

namespace slipform {

struct SvgOptions {
  double width_px = 1200.0;
  /// Strips are thin; both panels are stretched vertically so the reference
  /// strip is at least this tall.
  double min_strip_px = 80.0;
};

/// Cells are filled with hue from the rotation angle and saturation from the
/// shear magnitude; the reference panel carries dashed hatching along s.
std::string render_svg(const PiecewiseAffineMap &map, const SvgOptions &options = {});

void write_svg(const std::filesystem::path &path, const PiecewiseAffineMap &map,
               const SvgOptions &options = {});

}  // namespace slipform
