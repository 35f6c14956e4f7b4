#pragma once

// Smooth solutions of the e1 hard constraint written as a transport system
// d2 theta = (theta + alpha) d1 theta, gamma = theta + alpha, and the
// smooth-versus-kinked energy comparison under boundary squeezing.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "slipform/piecewise_affine_map.hpp"

namespace slipform {

/// Nodal fields on [0, L] x [-h, h], row-major with rows indexed by y2.
struct ConstraintField {
  double L = 0.0;
  double h = 0.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> theta;
  std::vector<double> gamma;
  /// gamma - theta per row.
  std::vector<double> alpha_profile;
  /// Reconstructed deformation; empty unless produced by the solver.
  std::vector<Vec2> deformation;

  double dy1() const { return L / static_cast<double>(nx - 1); }
  double dy2() const { return 2.0 * h / static_cast<double>(ny - 1); }
  double y1(std::size_t i) const { return dy1() * static_cast<double>(i); }
  double y2(std::size_t j) const { return -h + dy2() * static_cast<double>(j); }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }

  /// Uniform grid filled from functions of (y1, y2); alpha_profile = gamma - theta
  /// at the first node of each row.
  static ConstraintField sample(double L, double h, std::size_t nx, std::size_t ny,
                                const std::function<double(double, double)> &theta,
                                const std::function<double(double, double)> &gamma);
};

struct CurlResidual {
  /// max |d1 theta - d1 gamma|
  double r1;
  /// max |d2 theta - gamma d1 theta|
  double r2;
  /// max |d2 (M e1) - d1 (M e2)| for M = M(theta, gamma; e1)
  double rcurl;
};

/// Central differences on interior nodes. Throws Errc::GridTooSmall below 3 x 3.
CurlResidual curl_residual(const ConstraintField &field);

struct EvolveOptions {
  std::size_t nx = 401;
  std::size_t ny = 41;
  /// Output rows may be coarser than the stable step; substeps keep
  /// max|gamma| dy2 / dy1 <= 1/2. With substeps disabled a coarser grid throws
  /// Errc::CFLViolation.
  bool allow_substeps = true;
  /// Errc::BlowUp when |d1 theta| grows by more than this factor, either along
  /// a characteristic or on the grid.
  double blowup_factor = 50.0;
};

/// Integrates the transport system up and down from the midline y2 = 0 with
/// theta(., 0) = theta0 (second-order upwind differences, SSP-RK3 steps), sets
/// gamma = theta + alpha and reconstructs v from dv = M(theta, gamma; e1).
/// theta0 must be defined on all of R (characteristics enter from outside).
ConstraintField evolve_constraint_family(const std::function<double(double)> &theta0,
                                         double alpha, double L, double h,
                                         const EvolveOptions &options = {});

struct SqueezeReport {
  /// max over rows of |v(0, y2) - v(L, y2)| / L
  double delta_measured = 0.0;
  /// Unrescaled energy: integral of gamma^2 over the strip.
  double energy = 0.0;
  double h = 0.0;

  double rescaled_energy() const { return energy / h; }
};

/// Trapezoid energy on the grid; needs a reconstructed deformation.
SqueezeReport squeeze_measure(const ConstraintField &field);

/// Exact cellwise energy; the squeeze is sampled on `rows` equally spaced rows.
SqueezeReport squeeze_measure(const PiecewiseAffineMap &map, double L, double h,
                              std::size_t rows = 21);

/// theta0(y1) = amplitude * sin(frequency * y1 + phase), plus the constant alpha.
struct SineAnsatz {
  double amplitude = 0.0;
  double frequency = 1.0;
  double phase = 0.0;
  double alpha = 0.0;

  double operator()(double y1) const;
};

struct GapOptions {
  /// Leaves room outside the e1 kink chains (width 2h per kink) at h = 0.1.
  double L = 40.0;
  int restarts = 20;
  std::uint64_t seed = 1;
  /// Grid for the smooth branch during optimization; the curl convergence
  /// check doubles it.
  std::size_t nx = 201;
  std::size_t ny = 11;
  std::size_t max_iterations = 1500;
};

struct GapRow {
  double h;
  int kinks;
  double kinked_energy;
  double kinked_rescaled;
  double kinked_delta;
  bool smooth_feasible;
  double smooth_energy;
  double smooth_rescaled;
  double smooth_delta;
  SineAnsatz smooth_params;
  /// Observed orders of r2 and rcurl under grid doubling at the optimum.
  double curl_order_r2;
  double curl_order_rcurl;
};

struct GapTable {
  std::vector<GapRow> rows;
  /// min over feasible rows of the smooth rescaled energy.
  std::optional<double> fitted_c;
  /// log-log slope of kinked rescaled energy against h.
  std::optional<double> kinked_rate;
};

/// Bent profile meeting the squeeze: two unit-speed segments turning by the
/// smallest angle whose recovery map has measured squeeze <= delta_target.
struct KinkedSqueeze {
  PiecewiseAffineMap map;
  SqueezeReport squeeze;
  int kinks;
  double half_angle;
};
KinkedSqueeze kinked_squeeze(const SlipSystem &sys, double delta_target, double L, double h);

/// Smooth-branch optimum over SineAnsatz for one h. Throws
/// Errc::InfeasibleSqueeze when no restart meets the squeeze.
struct SmoothSqueeze {
  ConstraintField field;
  SqueezeReport squeeze;
  SineAnsatz params;
};
SmoothSqueeze smooth_squeeze(double delta_target, double h, const GapOptions &options);

/// Throws Errc::InvalidRange unless s = +-e1 and delta_target in [0, 1].
GapTable gap_experiment(const SlipSystem &sys, double delta_target, std::vector<double> hs,
                        const GapOptions &options = {});

}  // namespace slipform
