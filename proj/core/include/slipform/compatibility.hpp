#pragma once

// Rank-one connections between rotated shears and residual checks for the
// gluing of affine pieces.

#include <variant>

#include "slipform/piecewise_affine_map.hpp"
#include "slipform/slip_geometry.hpp"

namespace slipform {

enum class ConnectionKind { SameAngle, Kink };

/// make_shear(to) - make_shear(from) = amplitude (x) normal.
struct RankOneConnection {
  Vec2 amplitude;
  Vec2 normal;
  ConnectionKind kind;
};

struct NotConnected {
  /// Distance from the compatibility condition: |dgamma| for equal angles,
  /// |dgamma - 2 tan(dtheta/2)| otherwise, +inf for a half turn.
  double defect;
};

struct EqualStates {};

using ConnectionResult = std::variant<RankOneConnection, NotConnected, EqualStates>;

ConnectionResult rank_one_gap(const SlipSystem &sys, ShearState from, ShearState to,
                              double tol = 1e-10);

/// 2 tan(theta / 2); throws Errc::AngleOutOfRange unless theta in (-pi, pi).
double kink_shear_for_angle(double theta);

struct InterfaceReport {
  /// Mismatch of the two affine maps at the ends of the shared segment.
  double endpoint_mismatch = 0.0;
  /// Smallest singular value of the gradient jump.
  double rank_one_residual = 0.0;
  /// |jump * t| for the unit edge tangent t.
  double normal_residual = 0.0;

  double worst() const;
  bool passes(double tol) const { return worst() <= tol; }
};

InterfaceReport check_interface(const Cell &a, const Cell &b, const Segment &shared);

/// Locates the shared segment itself; throws Errc::NoSharedEdge if the cells
/// have none longer than `edge_tol`.
InterfaceReport check_interface(const Cell &a, const Cell &b, double edge_tol = 1e-12);

struct ValidationTolerances {
  double admissibility = kConstructionTol;
  double interface = 1e-10;
  double tiling = 1e-10;
  double tail = 1e-12;
};

struct MapValidation {
  /// |sum of cell areas - window area| / window area.
  double area_residual = 0.0;
  /// Pairwise overlap area / window area.
  double overlap_residual = 0.0;
  /// Vertex excursion outside the window / window scale.
  double containment_residual = 0.0;
  bool cells_convex = true;
  double admissibility_residual = 0.0;
  double interface_residual = 0.0;
  /// Largest gradient deviation from the tail state outside the core.
  double tail_residual = 0.0;
  std::size_t shared_edge_count = 0;

  bool tiling_ok(const ValidationTolerances &tol) const;
  bool ok(const ValidationTolerances &tol) const;
};

MapValidation validate_map(const PiecewiseAffineMap &map);

}  // namespace slipform
