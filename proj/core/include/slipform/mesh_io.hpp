#pragma once

// Versioned JSON documents for piecewise-affine maps. Doubles are written in
// shortest round-trip form, so read(write(m)) is bit-equal to m.

#include <filesystem>
#include <string>
#include <string_view>

#include "slipform/piecewise_affine_map.hpp"

namespace slipform {

inline constexpr std::string_view kMeshSchema = "slipform-mesh/1";

std::string mesh_to_json(const PiecewiseAffineMap &map);

/// Throws Errc::ParseError on malformed or truncated input and on a schema
/// other than kMeshSchema.
PiecewiseAffineMap mesh_from_json(std::string_view text);

void write_mesh(const std::filesystem::path &path, const PiecewiseAffineMap &map);
PiecewiseAffineMap read_mesh(const std::filesystem::path &path);

}  // namespace slipform
