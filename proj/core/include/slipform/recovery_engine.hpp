#pragma once

// Recovery sequences for limit profiles: exact piecewise-affine strips under
// the hard constraint, zig-zag laminations for short segments, and a smooth
// deformation under the soft constraint.

#include <cstdint>
#include <optional>
#include <vector>

#include "slipform/energy_densities.hpp"
#include "slipform/limit_profile.hpp"
#include "slipform/strip_builder.hpp"

namespace slipform {

/// Per-segment (theta, gamma) with make_shear(.) e1 = u'. Throws
/// Errc::ShortSegment when a segment cannot be lifted (|u'| < 1, or |u'| != 1
/// for s = +-e1).
std::vector<ShearState> lift_profile(const SlipSystem &sys, const LimitProfile &u);

/// 2 * integral of relaxed(u') over (0, L); +inf when u' leaves the domain.
double limit_energy(const SlipSystem &sys, const LimitProfile &u);

struct Recovery {
  PiecewiseAffineMap map;
  EnergyReport report;
  /// Achieved transition radius (units of h) per interior breakpoint.
  std::vector<double> transition_r;
};

/// Constant strips M(theta_n, gamma_n) joined by transitions centred at the
/// interior breakpoints, on (0, L) x (-h, h), with v(0, 0) = u(0).
/// Throws Errc::HTooLarge when transition windows overlap or leave (0, L).
Recovery build_recovery(const SlipSystem &sys, const LimitProfile &u, double h);

/// Lamination data for one short segment.
struct ZigZagSpec {
  std::size_t segment;
  int oscillations;
  /// cos(half_angle) = |xi|.
  double half_angle;
  Mat2 frame;
};

/// Segments that zigzag_approximate refines: those with |xi| < 1.
std::vector<ZigZagSpec> zigzag_specs(const SlipSystem &sys, const LimitProfile &u, int i);

/// Replaces each short segment by i periods of R R_{+half} e1, R R_{-half} e1
/// halves. Other segments pass through. Throws Errc::InvalidRange for i < 1.
LimitProfile zigzag_approximate(const SlipSystem &sys, const LimitProfile &u, int i);

/// u_h(x) = U(x1) + h x2 G(x1) e2 in rescaled coordinates x in (0, L) x (-1, 1),
/// G = M(theta(x1), gamma(x1)), U' = G e1. The shear state follows the lifted
/// profile and switches on [t_n, t_n + h^beta] (beta = 2 - alpha) through a
/// quintic smoothstep with vanishing end derivatives.
class SmoothSoftRecovery {
 public:
  /// Throws Errc::AxisSlip (s = +-e1), Errc::BadAlpha (alpha outside (0, 2)),
  /// Errc::NonPositiveEps, Errc::ShortSegment, Errc::HTooLarge.
  SmoothSoftRecovery(const SlipSystem &sys, const LimitProfile &u, double eps, double h,
                     double alpha);

  double h() const { return h_; }
  double eps() const { return eps_; }
  double beta() const { return beta_; }
  double transition_width() const { return width_; }

  ShearState state_at(double x1) const;
  Mat2 shear_field(double x1) const;
  /// d/dx1 of shear_field.
  Mat2 shear_field_derivative(double x1) const;
  /// Rescaled-coordinate deformation.
  Vec2 deformation(Vec2 x) const;
  /// (d1 u, d2 u / h) = G + h x2 (G' e2) (x) e1.
  Mat2 rescaled_gradient(Vec2 x) const;

  /// Soft energy by quadrature (Gauss-Legendre, refined until the relative
  /// change is below 1e-8); limit_energy is set.
  EnergyReport energy() const;
  /// h^{2 - beta} / eps + h^beta.
  double error_scale() const;

  /// Largest relative Frobenius error between rescaled_gradient and central
  /// differences of deformation with the given step, over `n_points` random
  /// points (half inside transition windows).
  double fd_gradient_check(std::size_t n_points, double step, std::uint64_t seed) const;

 private:
  struct Window {
    double start;
    ShearState from;
    ShearState to;
    Vec2 U_start;
  };
  /// Index of the transition window containing x1, if any.
  std::optional<std::size_t> window_of(double x1) const;
  Vec2 U(double x1) const;

  SlipSystem sys_;
  LimitProfile profile_;
  std::vector<ShearState> states_;
  std::vector<Window> windows_;
  std::vector<Vec2> U_end_;  // U at the end of each transition window
  double eps_, h_, beta_, width_;
};

struct ConvergenceRow {
  double h;
  double eps;
  double rescaled_energy;
  double limit_energy;
  double gap;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log gap against log h over the finest three rows;
  /// empty when undefined (nonpositive gaps or fewer than two rows).
  std::optional<double> rate;
};

/// Rows ordered by decreasing h.
ConvergenceTable recovery_sweep(const SlipSystem &sys, const LimitProfile &u,
                                std::vector<double> hs);

/// eps = eps_scale * h^eps_power for every h.
ConvergenceTable soft_sweep(const SlipSystem &sys, const LimitProfile &u, std::vector<double> hs,
                            double alpha, double eps_scale, double eps_power);

}  // namespace slipform
