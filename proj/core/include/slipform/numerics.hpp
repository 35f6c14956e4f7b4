#pragma once

// Small numerical kernels shared across modules.

#include <functional>
#include <vector>

#include "slipform/matrix2.hpp"

namespace slipform::numerics {

struct Minimum {
  double x;
  double value;
};

/// Golden-section search (GSL) inside the bracket lo < guess < hi until it is
/// shorter than `tol`. When f(guess) is not strictly below both ends the best
/// of the three points is returned unrefined.
Minimum golden_section(const std::function<double(double)> &f, double lo, double guess,
                       double hi, double tol);

/// Root of an increasing f(x) - target on [lo, hi] by bisection (GSL) to
/// bracket width `tol`.
double bisect_increasing(const std::function<double(double)> &f, double target, double lo,
                         double hi, double tol);

/// Lower convex hull of points sorted by x (ties not allowed).
std::vector<Vec2> lower_convex_hull(const std::vector<Vec2> &sorted_points);

/// Piecewise-linear interpolation of a hull (or any x-sorted polyline).
double interpolate(const std::vector<Vec2> &polyline, double x);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]; cached per n.
const QuadratureRule &gauss_legendre(unsigned n);

struct SimplexResult {
  std::vector<double> x;
  double value;
  std::size_t iterations;
  bool converged;
};

/// Nelder-Mead (GSL nmsimplex2) from `x0` with initial step sizes `step`;
/// stops when the simplex size drops below `size_tol`.
SimplexResult nelder_mead(const std::function<double(const std::vector<double> &)> &f,
                          const std::vector<double> &x0, const std::vector<double> &step,
                          double size_tol, std::size_t max_iter);

struct LineFit {
  double slope;
  double intercept;
};

/// Ordinary least squares y = slope * x + intercept.
LineFit least_squares(const std::vector<double> &x, const std::vector<double> &y);

/// Least-squares slope of log y against log x (all entries must be > 0).
double log_log_slope(const std::vector<double> &x, const std::vector<double> &y);

}  // namespace slipform::numerics
