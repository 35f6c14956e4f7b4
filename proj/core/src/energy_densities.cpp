#include "slipform/energy_densities.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "slipform/compatibility.hpp"
#include "slipform/error.hpp"
#include "slipform/format.hpp"
#include "slipform/numerics.hpp"

namespace slipform {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Smaller-magnitude root of 1 - 2 gamma s1 s2 + gamma^2 s2^2 = r^2, s2 != 0,
/// r >= |s2|. Written without cancellation near r = 1.
double min_root(const SlipSystem &sys, double r2) {
  const double s1 = sys.s().x;
  const double s2 = sys.s().y;
  const double root = std::sqrt(std::max(0.0, r2 - s2 * s2));
  if (s1 == 0.0) return root / std::fabs(s2);
  const double sgn = s1 > 0.0 ? 1.0 : -1.0;
  return (1.0 - r2) / (s2 * (s1 + sgn * root));
}

}  // namespace

double DensityValue::value() const {
  if (!finite_) throw Error(Errc::Infeasible, "density is +inf");
  return value_;
}

double DensityValue::as_double() const { return finite_ ? value_ : kInf; }

std::string DensityValue::to_string() const { return format_real(as_double()); }

DensityValue hard_density(const SlipSystem &sys, Mat2 F, double tol) {
  const Admissibility adm = is_admissible(sys, F, tol);
  if (!adm.admissible) return DensityValue::infinite(adm.residual);
  return DensityValue::finite(std::max(0.0, norm2(F * sys.m()) - 1.0));
}

DensityValue reduced_density(const SlipSystem &sys, Vec2 xi) {
  const double r2 = norm2(xi);
  if (sys.is_axis_e1()) {
    const double dev = std::fabs(std::sqrt(r2) - 1.0);
    return dev <= 1e-12 ? DensityValue::finite(0.0) : DensityValue::infinite(dev);
  }
  const double s2 = sys.s().y;
  if (r2 < s2 * s2) return DensityValue::infinite(s2 * s2 - r2);
  const double g = min_root(sys, r2);
  return DensityValue::finite(g * g);
}

DensityValue relaxed_density(const SlipSystem &sys, Vec2 xi) {
  const double r2 = norm2(xi);
  if (r2 <= 1.0) return DensityValue::finite(0.0);
  if (sys.is_axis_e1()) {
    // Unit vectors may carry a rounding excess; they still lie on the disk.
    const double dev = std::sqrt(r2) - 1.0;
    return dev <= 1e-12 ? DensityValue::finite(0.0) : DensityValue::infinite(dev);
  }
  const double s1 = sys.s().x;
  const double s2sq = sys.s().y * sys.s().y;
  const double v = r2 / s2sq - 2.0 * std::fabs(s1) / s2sq * std::sqrt(r2 - s2sq) + s1 * s1 / s2sq - 1.0;
  return DensityValue::finite(std::max(0.0, v));
}

ShearState lift_vector(const SlipSystem &sys, Vec2 xi, double tol) {
  const double r = norm(xi);
  if (r < 1.0 - tol) {
    throw Error(Errc::Infeasible, "|xi| = " + format_real(r) + " < 1 has no rotated-shear lift");
  }
  if (sys.is_axis_e1()) {
    if (std::fabs(r - 1.0) > tol) {
      throw Error(Errc::Infeasible, "slip along e1 admits only |xi| = 1, got " + format_real(r));
    }
    return {canonical_angle(angle_of(xi)), 0.0};
  }
  const double gamma = min_root(sys, r * r);
  // xi = R_theta (e1 + gamma m1 s).
  const Vec2 base = Vec2{1.0, 0.0} + (gamma * sys.m().x) * sys.s();
  return {canonical_angle(angle_of(xi) - angle_of(base)), gamma};
}

std::vector<EnvelopeSample> convexify_oracle(const SlipSystem &sys, double r_max,
                                             std::size_t n_samples) {
  if (!(r_max > 1.0)) throw Error(Errc::InvalidRange, "r_max must exceed 1");
  if (n_samples < 100) throw Error(Errc::InvalidRange, "need at least 100 samples");
  if (sys.is_axis_e1()) throw Error(Errc::InvalidRange, "envelope of the e1 density is 0 / +inf");

  std::vector<double> radii;
  radii.reserve(n_samples + 1);
  for (std::size_t k = 0; k < n_samples; ++k) {
    radii.push_back(r_max * static_cast<double>(k) / static_cast<double>(n_samples - 1));
  }
  // The reduced density vanishes exactly on the unit circle.
  radii.push_back(1.0);
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  // Sample along the diameter through the slip-independent direction e1; the
  // density depends on |xi| only.
  std::vector<Vec2> points;
  for (auto it = radii.rbegin(); it != radii.rend(); ++it) {
    const DensityValue w = reduced_density(sys, {*it, 0.0});
    if (w.is_finite() && *it > 0.0) points.push_back({-*it, w.value()});
  }
  for (double r : radii) {
    const DensityValue w = reduced_density(sys, {r, 0.0});
    if (w.is_finite()) points.push_back({r, w.value()});
  }
  const std::vector<Vec2> hull = numerics::lower_convex_hull(points);

  std::vector<EnvelopeSample> out;
  out.reserve(radii.size());
  for (double r : radii) out.push_back({r, numerics::interpolate(hull, r)});
  return out;
}

GrowthConstants growth_constants(const SlipSystem &sys) {
  if (sys.is_axis_e1()) throw Error(Errc::AxisSlip, "growth bounds need s != +-e1");
  const double a = std::fabs(sys.s().x);
  const double s2sq = sys.s().y * sys.s().y;
  // sqrt(r^2 - s2^2) <= r and 2 a r <= a (r^2 + 1) give the lower bound; the
  // upper bound drops the negative middle term.
  const double c = (1.0 - a) / s2sq;
  const double C = std::max(1.0 / s2sq, a / s2sq + 1.0);
  return {c, C};
}

double dist2_to_rotations(Mat2 A) {
  const SingularValues sv = singular_values(A);
  const double sign = A.det() < 0.0 ? -1.0 : 1.0;
  const double d1 = sv.largest - 1.0;
  const double d2 = sv.smallest - sign;
  return d1 * d1 + d2 * d2;
}

Mat2 nearest_rotation(Mat2 A) {
  const Vec2 conformal{A.a + A.d, A.c - A.b};
  if (norm2(conformal) == 0.0) return Mat2::identity();
  return rotation(angle_of(conformal));
}

SoftDensity soft_density(const SlipSystem &sys, Mat2 F, double eps) {
  if (!(eps > 0.0)) throw Error(Errc::NonPositiveEps, "eps must be positive");
  const Vec2 s = sys.s();
  const Vec2 m = sys.m();
  const Vec2 Fs = F * s;
  const Mat2 slip_dir = outer(Fs, m);
  const auto objective = [&](double g) {
    return dist2_to_rotations(F - g * slip_dir) / eps + g * g;
  };

  const double cap =
      std::min(4.0 * (1.0 + F.frobenius()) / std::sqrt(std::min(eps, 1.0)), 1e3);
  constexpr int kCoarse = 512;
  constexpr int kFine = 64;

  // Candidate brackets around every local minimum of a uniform scan.
  struct Bracket {
    double lo, mid, hi, value;
  };
  const auto scan = [&](double lo, double hi, int n) {
    std::vector<double> g(n);
    std::vector<double> f(n);
    for (int k = 0; k < n; ++k) {
      g[k] = lo + (hi - lo) * k / (n - 1);
      f[k] = objective(g[k]);
    }
    std::vector<Bracket> out;
    for (int k = 0; k < n; ++k) {
      const bool left_ok = k == 0 || f[k] <= f[k - 1];
      const bool right_ok = k == n - 1 || f[k] <= f[k + 1];
      if (left_ok && right_ok) {
        out.push_back({g[std::max(k - 1, 0)], g[k], g[std::min(k + 1, n - 1)], f[k]});
      }
    }
    std::sort(out.begin(), out.end(),
              [](const Bracket &a, const Bracket &b) { return a.value < b.value; });
    return out;
  };

  SoftDensity best{objective(0.0), 0.0};
  const auto coarse = scan(-cap, cap, kCoarse);
  for (std::size_t i = 0; i < std::min<std::size_t>(coarse.size(), 4); ++i) {
    const auto fine = scan(coarse[i].lo, coarse[i].hi, kFine);
    for (std::size_t j = 0; j < std::min<std::size_t>(fine.size(), 2); ++j) {
      const auto &b = fine[j];
      const numerics::Minimum mn =
          b.lo < b.mid && b.mid < b.hi
              ? numerics::golden_section(objective, b.lo, b.mid, b.hi, 1e-8)
              : numerics::Minimum{b.mid, b.value};
      if (mn.value < best.value) best = {mn.value, mn.x};
    }
  }

  // Slip-plane decomposition at the minimizer: with a = Q s for the nearest
  // rotation Q, the elastic term splits along s and m.
  const Mat2 Q = nearest_rotation(F - best.gamma * slip_dir);
  const Vec2 a = Q * s;
  const double split = (norm2(Fs - a) + norm2(F * m - best.gamma * Fs - perp(a))) / eps +
                       best.gamma * best.gamma;
  if (std::fabs(split - best.value) > 1e-9 * std::max(1.0, best.value)) {
    throw std::logic_error("soft density decomposition mismatch: " + format_real(split) +
                           " vs " + format_real(best.value));
  }
  return best;
}

double EnergyReport::gap() const {
  if (!limit_energy) throw Error(Errc::InvalidRange, "report carries no limit energy");
  return rescaled_energy - *limit_energy;
}

EnergyReport energy_of_map(const PiecewiseAffineMap &map, EnergyMode mode) {
  if (map.cells.empty()) throw Error(Errc::InvalidMap, "map has no cells");
  if (mode.kind == EnergyMode::Kind::Soft && !(mode.eps > 0.0)) {
    throw Error(Errc::NonPositiveEps, "eps must be positive");
  }
  EnergyReport rep;
  rep.h = map.window.half_height;
  rep.per_cell.reserve(map.cells.size());
  double lower = 0.0;
  for (std::size_t i = 0; i < map.cells.size(); ++i) {
    const Cell &c = map.cells[i];
    const double cell_area = area(c.vertices);
    const Admissibility adm = is_admissible(map.slip, c.gradient, kMembershipTol);
    rep.max_constraint_residual = std::max(rep.max_constraint_residual, adm.residual);
    double gamma = std::numeric_limits<double>::quiet_NaN();
    if (adm.admissible) gamma = decompose(map.slip, c.gradient).gamma;
    double contribution = 0.0;
    if (mode.kind == EnergyMode::Kind::Hard) {
      const DensityValue w = hard_density(map.slip, c.gradient);
      if (w.is_finite()) {
        contribution = cell_area * w.value();
      } else {
        contribution = kInf;
        rep.infeasible_cells.push_back(i);
      }
    } else {
      const SoftDensity w = soft_density(map.slip, c.gradient, mode.eps);
      contribution = cell_area * w.value;
    }
    const DensityValue relaxed = relaxed_density(map.slip, c.gradient.col0());
    lower += cell_area * relaxed.as_double();
    rep.per_cell.push_back({i, cell_area, gamma, contribution});
    rep.total_energy += contribution;
  }
  rep.rescaled_energy = rep.total_energy / rep.h;
  rep.relaxed_lower_bound = lower / rep.h;
  for (const SharedEdge &e : shared_edges(map)) {
    const InterfaceReport r = check_interface(map.cells[e.a], map.cells[e.b], e.segment);
    rep.max_interface_residual = std::max(rep.max_interface_residual, r.worst());
  }
  return rep;
}

}  // namespace slipform
