#include "slipform/slip_geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "slipform/error.hpp"

namespace slipform {

SlipSystem SlipSystem::from_direction(Vec2 direction) {
  const double len = norm(direction);
  if (!(len > 1e-300) || !std::isfinite(len)) {
    throw Error(Errc::InvalidRange, "slip direction must be a nonzero finite vector");
  }
  // Unit input is kept as given so normalization is idempotent bit for bit.
  Vec2 s = std::fabs(len - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon() ? direction
                                                                               : direction / len;
  // Keep exact zeros so the axis tests stay combinatorial.
  if (direction.x == 0.0) s = {0.0, direction.y > 0 ? 1.0 : -1.0};
  if (direction.y == 0.0) s = {direction.x > 0 ? 1.0 : -1.0, 0.0};
  return SlipSystem(s, perp(s));
}

double canonical_angle(double angle) {
  constexpr double two_pi = 2.0 * kPi;
  double r = std::fmod(angle + kPi, two_pi);
  if (r < 0.0) r += two_pi;
  r -= kPi;
  // fmod can land exactly on +pi after the shift back.
  if (r >= kPi) r -= two_pi;
  return r;
}

Mat2 rotation(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return {c, -s, s, c};
}

Mat2 make_shear(const SlipSystem &sys, ShearState state) {
  return rotation(state.theta) * (Mat2::identity() + state.gamma * outer(sys.s(), sys.m()));
}

Admissibility is_admissible(const SlipSystem &sys, Mat2 F, double tol) {
  const double det_dev = std::fabs(F.det() - 1.0);
  const double len_dev = std::fabs(norm(F * sys.s()) - 1.0);
  Admissibility out;
  out.residual = std::max(det_dev, len_dev);
  out.admissible = std::isfinite(out.residual) && out.residual <= tol;
  return out;
}

ShearState decompose(const SlipSystem &sys, Mat2 F, double tol) {
  const Admissibility adm = is_admissible(sys, F, tol);
  if (!adm.admissible) {
    throw Error(Errc::NotOnManifold,
                "membership residual " + std::to_string(adm.residual) + " exceeds tolerance");
  }
  const Vec2 fs = F * sys.s();
  const double theta = canonical_angle(angle_of(fs) - angle_of(sys.s()));
  const double gamma = dot(rotation(theta).transpose() * (F * sys.m()), sys.s());
  const ShearState state{theta, gamma};
  const double recon = max_abs(make_shear(sys, state) - F);
  if (recon > tol * std::max(1.0, std::fabs(gamma))) {
    throw Error(Errc::NotOnManifold,
                "reconstruction residual " + std::to_string(recon) + " exceeds tolerance");
  }
  return state;
}

}  // namespace slipform
