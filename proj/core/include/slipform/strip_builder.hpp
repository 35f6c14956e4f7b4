#pragma once

// Explicit piecewise-affine maps on finite windows of the strip R x (-B, B)
// whose gradients lie exactly on M_s and are rank-one compatible across every
// interface.

#include <utility>

#include "slipform/piecewise_affine_map.hpp"

namespace slipform {

/// Axis family a kink fan is built from.
enum class KinkFamily { E1, E2 };

/// +-e1 slips use the E1 fan, +-e2 the E2 fan. Throws Errc::InvalidRange for
/// other directions.
KinkFamily axis_family(const SlipSystem &axis);

/// Largest angle one fan can turn: 4 atan(1/4) - 2 atan(1/2) for E1,
/// 4 atan(1/4) for E2.
double theta_max(KinkFamily family);

/// Fan angle phi in (0, atan(1/4)] whose fan turns by `theta` >= 0.
double fan_angle(KinkFamily family, double theta);

/// Four-cell kink fan on [-B, B]^2 turning the identity into R_theta, with
/// apex (0, -B) and cut lines to (-+2B tan phi, B). Core [-B/2, B/2].
/// Negative angles mirror the positive fan through diag(1, -1).
/// Throws Errc::AngleTooLarge when |theta| > theta_max.
PiecewiseAffineMap kink_axis(const SlipSystem &axis, double theta, double B);

/// Energy of kink_axis: 16 B^2 tan^3 phi (E1) or 16 B^2 cot phi (E2); 0 at theta = 0.
double kink_energy(KinkFamily family, double theta, double B);

/// Re-expresses `inner` (half-height B, core within [-B/2, B/2]-type bounds)
/// for the slip `to` = R_psi `from`, |psi| <= pi/4: v(x) = R_psi w(R_{-psi} x)
/// restricted to [-7B/8, 7B/8] x [-B/8, B/8]. Throws Errc::SlipAngleTooLarge.
PiecewiseAffineMap change_slip(const SlipSystem &from, const SlipSystem &to,
                               const PiecewiseAffineMap &inner, double B);

/// Replaces the tail shears of `inner` (constant beyond |x1| = A) by
/// `new_gammas` across two interfaces parallel to s. Output core half-width
/// (A + 2|m2| B)/|m1|, window one B wider on each side.
/// Throws Errc::AxisSlip for s = +-e1.
PiecewiseAffineMap change_shear(const PiecewiseAffineMap &inner,
                                std::pair<double, double> new_gammas, double A, double B);

/// v = R_theta w.
PiecewiseAffineMap rotate_global(const PiecewiseAffineMap &inner, double theta);

/// Fan for an arbitrary slip: axis fan at half-height 8B, then change_slip.
/// Window [-7B, 7B] x [-B, B].
PiecewiseAffineMap kink_any(const SlipSystem &sys, double theta, double B);

/// Family kink_any uses for `sys`: E1 when |s1| >= 1/sqrt(2).
KinkFamily kink_family_for(const SlipSystem &sys);

struct TransitionSpec {
  ShearState from;
  ShearState to;
  double B = 1.0;
  /// Minimum window half-width in units of B; the window grows to meet it.
  double r = 0.0;
};

struct TransitionResult {
  PiecewiseAffineMap map;
  /// Gradient is M(from) for x1 < -r B and M(to) for x1 > r B. Computed from
  /// B-free quantities so it is identical for every B.
  double r;
  /// Number of kink fans in the chain.
  int kinks;
};

/// Chain of equal kinks turning theta_from into theta_to, followed by a shear
/// change when s != +-e1. Throws Errc::AxisShearUnsupported for s = +-e1 with
/// a nonzero shear.
TransitionResult transition(const SlipSystem &sys, const TransitionSpec &spec);

}  // namespace slipform
