#include "slipform/strip_builder.hpp"

#include <algorithm>
#include <string>

#include "slipform/error.hpp"
#include "slipform/format.hpp"
#include "slipform/numerics.hpp"

namespace slipform {

namespace {

const double kFanPhiMax = std::atan(0.25);

/// Turning angle of a fan with parameter phi.
double fan_turn(KinkFamily family, double phi) {
  if (family == KinkFamily::E2) return 4.0 * phi;
  return 4.0 * phi - 2.0 * std::atan(2.0 * std::tan(phi));
}

/// Sign-matched axis of the fan family used for `sys`.
SlipSystem family_axis(const SlipSystem &sys, KinkFamily family) {
  const Vec2 s = sys.s();
  return family == KinkFamily::E1 ? SlipSystem::from_direction({s.x >= 0.0 ? 1.0 : -1.0, 0.0})
                                  : SlipSystem::from_direction({0.0, s.y >= 0.0 ? 1.0 : -1.0});
}

double core_half_width(const PiecewiseAffineMap &map) {
  return std::max(std::fabs(map.core_lo), std::fabs(map.core_hi));
}

PiecewiseAffineMap constant_map(const SlipSystem &sys, ShearState state, double half_width,
                                double B) {
  PiecewiseAffineMap map;
  map.slip = sys;
  map.window = {-half_width, half_width, B};
  map.core_lo = 0.0;
  map.core_hi = 0.0;
  map.left_state = state;
  map.right_state = state;
  map.cells.push_back({rectangle(-half_width, half_width, -B, B), make_shear(sys, state), {}});
  return map;
}

}  // namespace

KinkFamily axis_family(const SlipSystem &axis) {
  if (axis.is_axis_e1()) return KinkFamily::E1;
  if (axis.is_axis_e2()) return KinkFamily::E2;
  throw Error(Errc::InvalidRange, "kink fans need s in {+-e1, +-e2}");
}

double theta_max(KinkFamily family) { return fan_turn(family, kFanPhiMax); }

double fan_angle(KinkFamily family, double theta) {
  if (theta < 0.0 || theta > theta_max(family)) {
    throw Error(Errc::AngleTooLarge, "fan angle " + format_real(theta) + " outside [0, theta_max]");
  }
  if (family == KinkFamily::E2) return 0.25 * theta;
  // The turning angle is strictly increasing in phi on (0, atan(1/4)].
  return numerics::bisect_increasing([&](double phi) { return fan_turn(family, phi); }, theta, 0.0,
                                     kFanPhiMax, 1e-14);
}

double kink_energy(KinkFamily family, double theta, double B) {
  theta = std::fabs(theta);
  if (theta == 0.0) return 0.0;
  const double t = std::tan(fan_angle(family, theta));
  return family == KinkFamily::E1 ? 16.0 * B * B * t * t * t : 16.0 * B * B / t;
}

PiecewiseAffineMap kink_axis(const SlipSystem &axis, double theta, double B) {
  const KinkFamily family = axis_family(axis);
  if (!(B > 0.0)) throw Error(Errc::InvalidRange, "B must be positive");
  const double tmax = theta_max(family);
  if (std::fabs(theta) > tmax * (1.0 + 1e-14)) {
    throw Error(Errc::AngleTooLarge, "kink angle " + format_real(theta) + " exceeds theta_max " +
                                         format_real(tmax));
  }
  if (theta == 0.0) {
    PiecewiseAffineMap flat = constant_map(axis, {0.0, 0.0}, B, B);
    flat.core_lo = -0.5 * B;
    flat.core_hi = 0.5 * B;
    flat.provenance = {"kink_axis", {{"theta", theta}, {"B", B}}};
    return flat;
  }
  if (theta < 0.0) {
    PiecewiseAffineMap m = mirrored(kink_axis(axis, -theta, B));
    m.right_state = {theta, 0.0};
    m.provenance = {"kink_axis", {{"theta", theta}, {"B", B}}};
    return m;
  }

  const double phi = fan_angle(family, std::min(theta, tmax));
  const double t = std::tan(phi);
  ShearState g2, g3;
  double omega4;
  if (family == KinkFamily::E1) {
    const double w3 = 2.0 * phi - 2.0 * std::atan(2.0 * t);
    g2 = {2.0 * phi, 2.0 * t};
    g3 = {w3, -2.0 * t};
    omega4 = 4.0 * phi - 2.0 * std::atan(2.0 * t);
  } else {
    const double cot = 1.0 / t;
    g2 = {2.0 * phi - kPi, -2.0 * cot};
    g3 = {2.0 * phi - kPi, 2.0 * cot};
    omega4 = 4.0 * phi;
  }

  const Vec2 apex{0.0, -B};
  const Vec2 top_left{-2.0 * B * t, B};
  const Vec2 top_right{2.0 * B * t, B};
  PiecewiseAffineMap m;
  m.slip = axis;
  m.window = {-B, B, B};
  m.core_lo = -0.5 * B;
  m.core_hi = 0.5 * B;
  m.left_state = {0.0, 0.0};
  m.right_state = {theta, 0.0};
  m.cells = {
      {{{-B, -B}, apex, top_left, {-B, B}}, Mat2::identity(), {}},
      {{apex, {0.0, B}, top_left}, make_shear(axis, g2), {}},
      {{apex, top_right, {0.0, B}}, make_shear(axis, g3), {}},
      {{apex, {B, -B}, {B, B}, top_right}, rotation(omega4), {}},
  };
  propagate_offsets(m);
  m.provenance = {"kink_axis", {{"theta", theta}, {"B", B}}};
  return m;
}

PiecewiseAffineMap change_slip(const SlipSystem &from, const SlipSystem &to,
                               const PiecewiseAffineMap &inner, double B) {
  if (!(B > 0.0)) throw Error(Errc::InvalidRange, "B must be positive");
  const double psi = canonical_angle(angle_of(to.s()) - angle_of(from.s()));
  if (std::fabs(psi) > 0.25 * kPi * (1.0 + 1e-12)) {
    throw Error(Errc::SlipAngleTooLarge,
                "slip directions differ by " + format_real(psi) + " rad (> pi/4)");
  }
  const double b = B / 8.0;
  const double c = std::cos(std::fabs(psi));
  const double s = std::sin(std::fabs(psi));
  const double c_in = core_half_width(inner);
  // Strip ends must map into the constant tails of the inner map.
  if (!(c * 7.0 * b - s * b > c_in)) {
    throw Error(Errc::InvalidMap, "rotated strip ends reach the inner core");
  }
  // The rotated strip must stay inside the inner window.
  const Mat2 back = rotation(-psi);
  for (const Vec2 corner : {Vec2{-7 * b, -b}, Vec2{7 * b, -b}, Vec2{7 * b, b}, Vec2{-7 * b, b}}) {
    const Vec2 y = back * corner;
    if (y.x < inner.window.x_lo || y.x > inner.window.x_hi ||
        std::fabs(y.y) > inner.window.half_height) {
      throw Error(Errc::InvalidMap, "rotated strip leaves the inner window");
    }
  }
  PiecewiseAffineMap out = clipped(conjugated(inner, rotation(psi)), {-7 * b, 7 * b, -b, b});
  out.slip = to;
  out.window = {-7 * b, 7 * b, b};
  const double core = (c_in + s * b) / c;
  out.core_lo = -core;
  out.core_hi = core;
  propagate_offsets(out);
  out.provenance = {"change_slip", {{"psi", psi}, {"B", B}}};
  return out;
}

PiecewiseAffineMap change_shear(const PiecewiseAffineMap &inner,
                                std::pair<double, double> new_gammas, double A, double B) {
  const SlipSystem &sys = inner.slip;
  if (sys.is_axis_e1()) throw Error(Errc::AxisSlip, "shear change needs s != +-e1");
  if (!(B > 0.0) || A < 0.0) throw Error(Errc::InvalidRange, "need A >= 0 and B > 0");
  if (inner.core_lo < -A * (1.0 + 1e-12) - 1e-300 || inner.core_hi > A * (1.0 + 1e-12) + 1e-300) {
    throw Error(Errc::InvalidMap, "inner map is not constant beyond |x1| = A");
  }
  const Vec2 m = sys.m();
  const double sigma = m.x > 0.0 ? 1.0 : -1.0;
  const Vec2 n = sigma * m;  // n.x > 0
  const double mu = A + std::fabs(m.y) * B;
  const double core = (A + 2.0 * std::fabs(m.y) * B) / std::fabs(m.x);
  const double half = core + B;

  const PiecewiseAffineMap wide = extend_window(inner, -half, half);
  const Polygon window_rect = rectangle(-half, half, -B, B);

  PiecewiseAffineMap out;
  out.slip = sys;
  out.window = {-half, half, B};
  out.core_lo = -core;
  out.core_hi = core;
  out.left_state = {inner.left_state.theta, new_gammas.first};
  out.right_state = {inner.right_state.theta, new_gammas.second};

  const double scale = 2.0 * half;
  const auto keep = [&](Polygon p) {
    p = simplify(p, 1e-13 * scale);
    return p.size() >= 3 && area(p) > 1e-14 * scale * scale ? p : Polygon{};
  };
  // S1: n.x <= -mu.
  if (Polygon p = keep(clip_halfplane(window_rect, n, -mu)); !p.empty()) {
    out.cells.push_back({std::move(p), make_shear(sys, out.left_state), {}});
  }
  for (const Cell &c : wide.cells) {
    Polygon p = clip_halfplane(c.vertices, n, mu);
    p = clip_halfplane(p, -1.0 * n, mu);
    if (p = keep(std::move(p)); !p.empty()) out.cells.push_back({std::move(p), c.gradient, c.offset});
  }
  // S2: n.x >= mu.
  if (Polygon p = keep(clip_halfplane(window_rect, -1.0 * n, -mu)); !p.empty()) {
    out.cells.push_back({std::move(p), make_shear(sys, out.right_state), {}});
  }
  propagate_offsets(out);
  out.provenance = {"change_shear",
                    {{"gamma_left", new_gammas.first}, {"gamma_right", new_gammas.second},
                     {"A", A}, {"B", B}}};
  return out;
}

PiecewiseAffineMap rotate_global(const PiecewiseAffineMap &inner, double theta) {
  PiecewiseAffineMap out = inner;
  const Mat2 R = rotation(theta);
  for (Cell &c : out.cells) {
    c.gradient = R * c.gradient;
    c.offset = R * c.offset;
  }
  out.left_state.theta += theta;
  out.right_state.theta += theta;
  return out;
}

KinkFamily kink_family_for(const SlipSystem &sys) {
  return std::fabs(sys.s().x) >= 1.0 / std::sqrt(2.0) ? KinkFamily::E1 : KinkFamily::E2;
}

PiecewiseAffineMap kink_any(const SlipSystem &sys, double theta, double B) {
  const SlipSystem axis = family_axis(sys, kink_family_for(sys));
  const PiecewiseAffineMap fan = kink_axis(axis, theta, 8.0 * B);
  PiecewiseAffineMap out = change_slip(axis, sys, fan, 8.0 * B);
  out.provenance = {"kink_any", {{"theta", theta}, {"B", B}}};
  return out;
}

TransitionResult transition(const SlipSystem &sys, const TransitionSpec &spec) {
  const double B = spec.B;
  if (!(B > 0.0)) throw Error(Errc::InvalidRange, "B must be positive");
  if (spec.r < 0.0) throw Error(Errc::InvalidRange, "r must be nonnegative");
  const bool axis_e1 = sys.is_axis_e1();
  if (axis_e1 && (spec.from.gamma != 0.0 || spec.to.gamma != 0.0)) {
    throw Error(Errc::AxisShearUnsupported, "no shear-changing transition exists for s = +-e1");
  }

  double dtheta = canonical_angle(spec.to.theta - spec.from.theta);
  if (dtheta == -kPi) dtheta = kPi;
  const bool same_gamma = spec.from.gamma == spec.to.gamma;

  PiecewiseAffineMap map;
  double r = 0.0;
  int kinks = 0;
  if (dtheta == 0.0 && same_gamma) {
    map = constant_map(sys, spec.from, B, B);
  } else {
    const bool direct_axis = sys.is_axis_e1() || sys.is_axis_e2();
    const KinkFamily family = direct_axis ? axis_family(sys) : kink_family_for(sys);
    const double tmax = theta_max(family);
    kinks = dtheta == 0.0 ? 0 : static_cast<int>(std::ceil(std::fabs(dtheta) / tmax - 1e-12));
    kinks = dtheta == 0.0 ? 0 : std::max(kinks, 1);

    // Block geometry in units of B.
    double block_half = 1.0;
    double block_core = 0.5;
    if (!direct_axis) {
      const double psi = std::fabs(
          canonical_angle(angle_of(sys.s()) - angle_of(family_axis(sys, family).s())));
      block_half = 7.0;
      block_core = (4.0 + std::sin(psi)) / std::cos(psi);
    }

    if (kinks == 0) {
      map = constant_map(sys, {spec.from.theta, 0.0}, B, B);
      r = 0.0;
    } else {
      const double delta = dtheta / kinks;
      const PiecewiseAffineMap block = direct_axis ? kink_axis(sys, delta, B) : kink_any(sys, delta, B);
      map.slip = sys;
      map.window = {-kinks * block_half * B, kinks * block_half * B, B};
      for (int k = 0; k < kinks; ++k) {
        const double center = (2.0 * k - (kinks - 1)) * block_half * B;
        const PiecewiseAffineMap piece =
            translated(rotate_global(block, spec.from.theta + k * delta), center);
        map.cells.insert(map.cells.end(), piece.cells.begin(), piece.cells.end());
      }
      map.left_state = {spec.from.theta, 0.0};
      map.right_state = {spec.from.theta + dtheta, 0.0};
      r = (kinks - 1) * block_half + block_core;
      map.core_lo = -r * B;
      map.core_hi = r * B;
      propagate_offsets(map);
    }

    if (!axis_e1 && !(spec.from.gamma == 0.0 && spec.to.gamma == 0.0)) {
      const Vec2 m = sys.m();
      map = change_shear(map, {spec.from.gamma, spec.to.gamma}, r * B, B);
      r = (r + 2.0 * std::fabs(m.y)) / std::fabs(m.x);
      map.core_lo = -r * B;
      map.core_hi = r * B;
    }
  }
  if (spec.r * B > map.window.x_hi) map = extend_window(map, -spec.r * B, spec.r * B);
  map.provenance = {"transition",
                    {{"theta_from", spec.from.theta}, {"gamma_from", spec.from.gamma},
                     {"theta_to", spec.to.theta}, {"gamma_to", spec.to.gamma}, {"B", B},
                     {"kinks", static_cast<double>(kinks)}, {"r", r}}};
  return {std::move(map), r, kinks};
}

}  // namespace slipform
