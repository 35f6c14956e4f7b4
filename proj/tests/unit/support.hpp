#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "slipform/slip_geometry.hpp"

namespace testing_support {

inline std::vector<slipform::SlipSystem> general_slips() {
  using slipform::SlipSystem;
  return {SlipSystem::e2(), SlipSystem::from_direction({1, 1}), SlipSystem::from_direction({1, 2}),
          SlipSystem::from_direction({2, 1})};
}

inline double frob(const slipform::Mat2 &A) { return A.frobenius(); }

/// Brute-force minimum of a scalar function: dense scan plus parabolic
/// refinement around the best sample. Independent of the library's searches.
template <class F>
double scan_min(F f, double lo, double hi, int n = 20001) {
  double best_x = lo, best = f(lo);
  const double dx = (hi - lo) / (n - 1);
  for (int k = 1; k < n; ++k) {
    const double x = lo + k * dx;
    const double v = f(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  // Ternary refinement on the neighbouring cells.
  double a = std::max(lo, best_x - dx), b = std::min(hi, best_x + dx);
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
    if (f(m1) < f(m2)) b = m2;
    else a = m1;
  }
  return std::min(best, f(0.5 * (a + b)));
}

}  // namespace testing_support
