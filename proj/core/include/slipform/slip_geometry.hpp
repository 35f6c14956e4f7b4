#pragma once

// Rotated shears M(theta, gamma; s) = R_theta (Id + gamma s (x) m) and the
// manifold M_s = {F : det F = 1, |F s| = 1} they parametrize.

#include "slipform/matrix2.hpp"

namespace slipform {

inline constexpr double kPi = std::numbers::pi;

/// Default membership tolerance for matrices coming from outside the library.
inline constexpr double kMembershipTol = 1e-9;
/// Tolerance for matrices produced by the closed-form constructions.
inline constexpr double kConstructionTol = 1e-12;

/// Slip direction s and slip-plane normal m = s^perp, both unit vectors.
class SlipSystem {
 public:
  /// Normalizes `direction`; throws Errc::InvalidRange for a (near) zero vector.
  static SlipSystem from_direction(Vec2 direction);
  static SlipSystem e1() { return from_direction({1.0, 0.0}); }
  static SlipSystem e2() { return from_direction({0.0, 1.0}); }

  Vec2 s() const { return s_; }
  Vec2 m() const { return m_; }

  /// True for s = +-e1, where the limit density degenerates to 0 / +inf.
  bool is_axis_e1() const { return s_.y == 0.0; }
  bool is_axis_e2() const { return s_.x == 0.0; }

 private:
  SlipSystem(Vec2 s, Vec2 m) : s_(s), m_(m) {}
  Vec2 s_;
  Vec2 m_;
};

/// Coordinates (theta, gamma) on M_s. Builders keep theta unwrapped; API
/// results are canonicalized to [-pi, pi).
struct ShearState {
  double theta = 0.0;
  double gamma = 0.0;

  friend bool operator==(ShearState, ShearState) = default;
};

/// Representative of `angle` modulo 2 pi in [-pi, pi).
double canonical_angle(double angle);

Mat2 rotation(double phi);

Mat2 make_shear(const SlipSystem &sys, ShearState state);

struct Admissibility {
  bool admissible = false;
  /// max(|det F - 1|, ||F s| - 1|)
  double residual = 0.0;
};

Admissibility is_admissible(const SlipSystem &sys, Mat2 F, double tol = kMembershipTol);

/// Inverse of make_shear. Throws Errc::NotOnManifold when F is not in M_s
/// within `tol`.
ShearState decompose(const SlipSystem &sys, Mat2 F, double tol = kMembershipTol);

}  // namespace slipform
