#pragma once

// Hard, reduced, relaxed and soft energy densities for one slip system, and
// cellwise integration of them over piecewise-affine maps.

#include <optional>
#include <string>
#include <vector>

#include "slipform/piecewise_affine_map.hpp"
#include "slipform/slip_geometry.hpp"

namespace slipform {

/// Extended-real density value. Infeasibility is a state, never a sentinel.
class DensityValue {
 public:
  static DensityValue finite(double v) { return DensityValue(v, true, 0.0); }
  /// `residual` records how far the input was from feasibility.
  static DensityValue infinite(double residual) { return DensityValue(0.0, false, residual); }

  bool is_finite() const { return finite_; }
  /// Throws Errc::Infeasible for the infinite state.
  double value() const;
  double residual() const { return residual_; }
  /// value() or +inf.
  double as_double() const;
  /// "+inf" or the value at 17 significant digits.
  std::string to_string() const;

 private:
  DensityValue(double v, bool finite, double residual)
      : value_(v), finite_(finite), residual_(residual) {}
  double value_;
  bool finite_;
  double residual_;
};

/// |F m|^2 - 1 on M_s, +inf elsewhere.
DensityValue hard_density(const SlipSystem &sys, Mat2 F, double tol = kMembershipTol);

/// min over second columns d of the hard density of (xi | d).
DensityValue reduced_density(const SlipSystem &sys, Vec2 xi);

/// Convex envelope of reduced_density, closed form.
DensityValue relaxed_density(const SlipSystem &sys, Vec2 xi);

/// (theta, gamma) with make_shear(theta, gamma) e1 = xi and |gamma| minimal;
/// ties (s1 = 0) resolve to the positive root. Throws Errc::Infeasible when
/// |xi| < 1 - tol, or for s = +-e1 when ||xi| - 1| > tol.
ShearState lift_vector(const SlipSystem &sys, Vec2 xi, double tol = 1e-12);

struct EnvelopeSample {
  double radius;
  double value;
};

/// Independent envelope: lower convex hull of reduced_density sampled along a
/// diameter (n_samples radii in [0, r_max] mirrored, plus the unit radius).
/// Throws Errc::InvalidRange for r_max <= 1, n_samples < 100, or s = +-e1.
std::vector<EnvelopeSample> convexify_oracle(const SlipSystem &sys, double r_max,
                                             std::size_t n_samples);

/// Constants with c|xi|^2 - C <= relaxed <= C(1 + |xi|^2); s != +-e1.
struct GrowthConstants {
  double c;
  double C;
};
GrowthConstants growth_constants(const SlipSystem &sys);

/// Squared Frobenius distance to SO(2) via singular values.
double dist2_to_rotations(Mat2 A);

/// Rotation nearest to A in Frobenius norm.
Mat2 nearest_rotation(Mat2 A);

struct SoftDensity {
  double value;
  /// Inner minimizer.
  double gamma;
};

/// inf over gamma of dist^2(F (Id - gamma s (x) m), SO(2)) / eps + gamma^2.
/// Throws Errc::NonPositiveEps.
SoftDensity soft_density(const SlipSystem &sys, Mat2 F, double eps);

struct EnergyMode {
  enum class Kind { Hard, Soft } kind = Kind::Hard;
  double eps = 0.0;

  static EnergyMode hard() { return {}; }
  static EnergyMode soft(double eps) { return {Kind::Soft, eps}; }
};

struct CellEnergy {
  std::size_t id;
  double area;
  /// NaN for inadmissible cells in hard mode.
  double gamma;
  /// +inf for inadmissible cells in hard mode.
  double contribution;
};

struct EnergyReport {
  /// Strip half-thickness (the window half-height).
  double h = 0.0;
  double total_energy = 0.0;
  /// total_energy / h.
  double rescaled_energy = 0.0;
  /// Set by recovery builders: the limit functional of the target profile.
  std::optional<double> limit_energy;
  /// (1/h) sum of area * relaxed(F e1): the pointwise lower bound.
  double relaxed_lower_bound = 0.0;
  std::vector<CellEnergy> per_cell;
  std::vector<std::size_t> infeasible_cells;
  double max_constraint_residual = 0.0;
  double max_interface_residual = 0.0;

  bool finite() const { return infeasible_cells.empty(); }
  /// rescaled_energy - *limit_energy.
  double gap() const;
};

/// Exact cellwise integration (densities are constant per cell). Throws
/// Errc::InvalidMap for an empty map.
EnergyReport energy_of_map(const PiecewiseAffineMap &map, EnergyMode mode = EnergyMode::hard());

}  // namespace slipform
