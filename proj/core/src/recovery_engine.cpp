#include "slipform/recovery_engine.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "slipform/error.hpp"
#include "slipform/format.hpp"
#include "slipform/numerics.hpp"

namespace slipform {

namespace {

double signed_turn(double from, double to) {
  double d = canonical_angle(to - from);
  if (d == -kPi) d = kPi;
  return d;
}

/// Quintic smoothstep and its first derivative on [0, 1].
double smoothstep(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double smoothstep_prime(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }

}  // namespace

std::vector<ShearState> lift_profile(const SlipSystem &sys, const LimitProfile &u) {
  std::vector<ShearState> states;
  states.reserve(u.segments());
  for (std::size_t n = 0; n < u.segments(); ++n) {
    try {
      states.push_back(lift_vector(sys, u.derivatives()[n]));
    } catch (const Error &e) {
      if (e.code() != Errc::Infeasible) throw;
      throw Error(Errc::ShortSegment, "segment " + std::to_string(n) + " (t in [" +
                                          format_real(u.breakpoints()[n]) + ", " +
                                          format_real(u.breakpoints()[n + 1]) +
                                          "]) cannot be lifted: " + e.what());
    }
  }
  return states;
}

double limit_energy(const SlipSystem &sys, const LimitProfile &u) {
  double total = 0.0;
  for (std::size_t n = 0; n < u.segments(); ++n) {
    total += u.segment_length(n) * relaxed_density(sys, u.derivatives()[n]).as_double();
  }
  return 2.0 * total;
}

Recovery build_recovery(const SlipSystem &sys, const LimitProfile &u, double h) {
  if (!(h > 0.0)) throw Error(Errc::InvalidRange, "h must be positive");
  const std::vector<ShearState> states = lift_profile(sys, u);
  const std::vector<double> &t = u.breakpoints();
  const std::size_t N = u.segments();

  std::vector<TransitionResult> transitions;
  transitions.reserve(N - 1);
  for (std::size_t n = 1; n < N; ++n) {
    transitions.push_back(transition(sys, {states[n - 1], states[n], h, 0.0}));
  }
  // Intervals [lo, hi] of constant strips between transition windows.
  std::vector<std::pair<double, double>> plain;
  double cursor = 0.0;
  for (std::size_t n = 1; n < N; ++n) {
    const double half = transitions[n - 1].map.window.x_hi;
    const double lo = t[n] - half;
    if (lo < cursor) {
      throw Error(Errc::HTooLarge, "transition at t = " + format_real(t[n]) + " needs half-width " +
                                       format_real(half) + " but only " +
                                       format_real(t[n] - cursor) + " is available");
    }
    plain.push_back({cursor, lo});
    cursor = t[n] + half;
  }
  if (cursor > u.length()) {
    throw Error(Errc::HTooLarge, "last transition window passes t = L");
  }
  plain.push_back({cursor, u.length()});

  Recovery rec;
  PiecewiseAffineMap &map = rec.map;
  map.slip = sys;
  map.window = {0.0, u.length(), h};
  map.left_state = states.front();
  map.right_state = states.back();
  const double scale = std::max(u.length(), 2.0 * h);
  for (std::size_t n = 0; n < N; ++n) {
    const auto [lo, hi] = plain[n];
    if (hi - lo > 1e-14 * scale) {
      map.cells.push_back({rectangle(lo, hi, -h, h), make_shear(sys, states[n]), {}});
    }
    if (n + 1 < N) {
      const PiecewiseAffineMap piece = translated(transitions[n].map, t[n + 1]);
      map.cells.insert(map.cells.end(), piece.cells.begin(), piece.cells.end());
      rec.transition_r.push_back(transitions[n].r);
    }
  }
  if (N > 1) {
    map.core_lo = t[1] - transitions.front().r * h;
    map.core_hi = t[N - 1] + transitions.back().r * h;
  } else {
    map.core_lo = map.core_hi = 0.0;
  }
  propagate_offsets(map);
  anchor(map, {0.0, 0.0}, u.anchor());
  map.provenance = {"build_recovery",
                    {{"h", h}, {"L", u.length()}, {"segments", static_cast<double>(N)}}};

  rec.report = energy_of_map(map);
  double limit = 0.0;
  for (std::size_t n = 0; n < N; ++n) limit += u.segment_length(n) * states[n].gamma * states[n].gamma;
  rec.report.limit_energy = 2.0 * limit;
  return rec;
}

std::vector<ZigZagSpec> zigzag_specs(const SlipSystem &sys, const LimitProfile &u, int i) {
  if (i < 1) throw Error(Errc::InvalidRange, "oscillation count must be >= 1");
  std::vector<ZigZagSpec> out;
  for (std::size_t n = 0; n < u.segments(); ++n) {
    const Vec2 xi = u.derivatives()[n];
    const double r = norm(xi);
    // Unit segments are already on the constraint for every slip system.
    (void)sys;
    if (!(r < 1.0)) continue;
    const Mat2 frame = r == 0.0 ? Mat2::identity() : rotation(angle_of(xi));
    out.push_back({n, i, std::acos(std::min(r, 1.0)), frame});
  }
  return out;
}

LimitProfile zigzag_approximate(const SlipSystem &sys, const LimitProfile &u, int i) {
  const std::vector<ZigZagSpec> specs = zigzag_specs(sys, u, i);
  std::vector<double> t{0.0};
  std::vector<Vec2> xi;
  std::size_t next = 0;
  for (std::size_t n = 0; n < u.segments(); ++n) {
    const double t0 = u.breakpoints()[n];
    const double t1 = u.breakpoints()[n + 1];
    if (next < specs.size() && specs[next].segment == n) {
      const ZigZagSpec &z = specs[next++];
      const Vec2 up = z.frame * (rotation(z.half_angle) * Vec2{1.0, 0.0});
      const Vec2 down = z.frame * (rotation(-z.half_angle) * Vec2{1.0, 0.0});
      const int pieces = 2 * z.oscillations;
      for (int k = 1; k <= pieces; ++k) {
        t.push_back(k == pieces ? t1 : t0 + (t1 - t0) * k / pieces);
        xi.push_back(k % 2 == 1 ? up : down);
      }
    } else {
      t.push_back(t1);
      xi.push_back(u.derivatives()[n]);
    }
  }
  return LimitProfile(std::move(t), std::move(xi), u.anchor());
}

SmoothSoftRecovery::SmoothSoftRecovery(const SlipSystem &sys, const LimitProfile &u, double eps,
                                       double h, double alpha)
    : sys_(sys), profile_(u), eps_(eps), h_(h), beta_(2.0 - alpha), width_(0.0) {
  if (sys.is_axis_e1()) throw Error(Errc::AxisSlip, "smooth soft recovery needs s != +-e1");
  if (!(alpha > 0.0 && alpha < 2.0)) throw Error(Errc::BadAlpha, "alpha must lie in (0, 2)");
  if (!(eps > 0.0)) throw Error(Errc::NonPositiveEps, "eps must be positive");
  if (!(h > 0.0)) throw Error(Errc::InvalidRange, "h must be positive");
  width_ = std::pow(h, beta_);
  states_ = lift_profile(sys, u);
  // Unwrap angles so each switch turns by at most pi.
  for (std::size_t n = 1; n < states_.size(); ++n) {
    states_[n].theta = states_[n - 1].theta + signed_turn(states_[n - 1].theta, states_[n].theta);
  }
  const std::vector<double> &t = u.breakpoints();
  for (std::size_t n = 1; n < states_.size(); ++n) {
    if (t[n] + width_ > t[n + 1]) {
      throw Error(Errc::HTooLarge, "transition width h^beta = " + format_real(width_) +
                                       " exceeds segment " + std::to_string(n));
    }
  }
  Vec2 cursor = u.anchor();
  for (std::size_t n = 1; n < states_.size(); ++n) {
    const double plateau = t[n] - (n == 1 ? 0.0 : t[n - 1] + width_);
    cursor += plateau * (make_shear(sys_, states_[n - 1]) * Vec2{1.0, 0.0});
    windows_.push_back({t[n], states_[n - 1], states_[n], cursor});
    const Window &w = windows_.back();
    const numerics::QuadratureRule &rule = numerics::gauss_legendre(32);
    Vec2 acc{};
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double x1 = w.start + 0.5 * width_ * (rule.nodes[q] + 1.0);
      acc += rule.weights[q] * (shear_field(x1) * Vec2{1.0, 0.0});
    }
    cursor = cursor + (0.5 * width_) * acc;
    U_end_.push_back(cursor);
  }
}

std::optional<std::size_t> SmoothSoftRecovery::window_of(double x1) const {
  for (std::size_t k = 0; k < windows_.size(); ++k) {
    if (x1 >= windows_[k].start && x1 <= windows_[k].start + width_) return k;
  }
  return std::nullopt;
}

ShearState SmoothSoftRecovery::state_at(double x1) const {
  if (const auto k = window_of(x1)) {
    const Window &w = windows_[*k];
    const double s = smoothstep((x1 - w.start) / width_);
    return {w.from.theta + s * (w.to.theta - w.from.theta),
            w.from.gamma + s * (w.to.gamma - w.from.gamma)};
  }
  std::size_t seg = 0;
  while (seg < windows_.size() && x1 > windows_[seg].start) ++seg;
  return states_[seg];
}

Mat2 SmoothSoftRecovery::shear_field(double x1) const { return make_shear(sys_, state_at(x1)); }

Mat2 SmoothSoftRecovery::shear_field_derivative(double x1) const {
  const auto k = window_of(x1);
  if (!k) return {};
  const Window &w = windows_[*k];
  const double ds = smoothstep_prime((x1 - w.start) / width_) / width_;
  const double dtheta = ds * (w.to.theta - w.from.theta);
  const double dgamma = ds * (w.to.gamma - w.from.gamma);
  const ShearState st = state_at(x1);
  const Mat2 slip = outer(sys_.s(), sys_.m());
  return dtheta * (rotation(st.theta + 0.5 * kPi) * (Mat2::identity() + st.gamma * slip)) +
         dgamma * (rotation(st.theta) * slip);
}

Vec2 SmoothSoftRecovery::U(double x1) const {
  const Vec2 e1{1.0, 0.0};
  if (windows_.empty() || x1 <= windows_.front().start) {
    return profile_.anchor() + x1 * (make_shear(sys_, states_.front()) * e1);
  }
  std::size_t k = 0;
  while (k + 1 < windows_.size() && x1 >= windows_[k + 1].start) ++k;
  const Window &w = windows_[k];
  if (x1 >= w.start + width_) {
    return U_end_[k] + (x1 - w.start - width_) * (make_shear(sys_, w.to) * e1);
  }
  const numerics::QuadratureRule &rule = numerics::gauss_legendre(32);
  const double len = x1 - w.start;
  Vec2 acc{};
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double s = w.start + 0.5 * len * (rule.nodes[q] + 1.0);
    acc += rule.weights[q] * (shear_field(s) * e1);
  }
  return w.U_start + (0.5 * len) * acc;
}

Vec2 SmoothSoftRecovery::deformation(Vec2 x) const {
  return U(x.x) + (h_ * x.y) * (shear_field(x.x) * Vec2{0.0, 1.0});
}

Mat2 SmoothSoftRecovery::rescaled_gradient(Vec2 x) const {
  const Vec2 dG_e2 = shear_field_derivative(x.x) * Vec2{0.0, 1.0};
  return shear_field(x.x) + (h_ * x.y) * outer(dG_e2, {1.0, 0.0});
}

double SmoothSoftRecovery::error_scale() const {
  return std::pow(h_, 2.0 - beta_) / eps_ + std::pow(h_, beta_);
}

EnergyReport SmoothSoftRecovery::energy() const {
  EnergyReport rep;
  rep.h = h_;
  double rescaled = 0.0;
  for (std::size_t n = 0; n < states_.size(); ++n) {
    const double plateau = profile_.segment_length(n) - (n == 0 ? 0.0 : width_);
    rescaled += 2.0 * plateau * soft_density(sys_, make_shear(sys_, states_[n]), eps_).value;
  }
  for (const Window &w : windows_) {
    const auto integrate = [&](unsigned n1, unsigned n2) {
      const numerics::QuadratureRule &r1 = numerics::gauss_legendre(n1);
      const numerics::QuadratureRule &r2 = numerics::gauss_legendre(n2);
      double acc = 0.0;
      for (std::size_t i = 0; i < r1.nodes.size(); ++i) {
        const double x1 = w.start + 0.5 * width_ * (r1.nodes[i] + 1.0);
        for (std::size_t j = 0; j < r2.nodes.size(); ++j) {
          const Mat2 G = rescaled_gradient({x1, r2.nodes[j]});
          acc += r1.weights[i] * r2.weights[j] * soft_density(sys_, G, eps_).value;
        }
      }
      return 0.5 * width_ * acc;
    };
    unsigned n1 = 32;
    unsigned n2 = 4;
    double prev = integrate(n1, n2);
    for (int refine = 0; refine < 5; ++refine) {
      n1 *= 2;
      n2 *= 2;
      const double next = integrate(n1, n2);
      const bool done = std::fabs(next - prev) <= 1e-8 * std::max(std::fabs(next), 1e-300);
      prev = next;
      if (done) break;
    }
    rescaled += prev;
  }
  rep.rescaled_energy = rescaled;
  rep.total_energy = h_ * rescaled;
  double limit = 0.0;
  for (std::size_t n = 0; n < states_.size(); ++n) {
    limit += profile_.segment_length(n) * states_[n].gamma * states_[n].gamma;
  }
  rep.limit_energy = 2.0 * limit;
  return rep;
}

double SmoothSoftRecovery::fd_gradient_check(std::size_t n_points, double step,
                                             std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double L = profile_.length();
  double worst = 0.0;
  for (std::size_t p = 0; p < n_points; ++p) {
    double x1;
    if (p % 2 == 0 && !windows_.empty()) {
      const Window &w = windows_[static_cast<std::size_t>(unit(rng) * windows_.size()) %
                                 windows_.size()];
      x1 = w.start + width_ * unit(rng);
    } else {
      x1 = L * unit(rng);
    }
    x1 = std::clamp(x1, step, L - step);
    const double x2 = -1.0 + 2.0 * unit(rng);
    const Vec2 d1 = (deformation({x1 + step, x2}) - deformation({x1 - step, x2})) / (2.0 * step);
    const Vec2 d2 =
        (deformation({x1, x2 + step}) - deformation({x1, x2 - step})) / (2.0 * step * h_);
    const Mat2 fd = Mat2::from_columns(d1, d2);
    const Mat2 exact = rescaled_gradient({x1, x2});
    worst = std::max(worst, (fd - exact).frobenius() / exact.frobenius());
  }
  return worst;
}

namespace {

std::optional<double> finest_rate(const std::vector<ConvergenceRow> &rows) {
  if (rows.size() < 2) return std::nullopt;
  const std::size_t first = rows.size() >= 3 ? rows.size() - 3 : 0;
  std::vector<double> hs, gaps;
  for (std::size_t i = first; i < rows.size(); ++i) {
    if (!(rows[i].gap > 0.0)) return std::nullopt;
    hs.push_back(rows[i].h);
    gaps.push_back(rows[i].gap);
  }
  return numerics::log_log_slope(hs, gaps);
}

}  // namespace

ConvergenceTable recovery_sweep(const SlipSystem &sys, const LimitProfile &u,
                                std::vector<double> hs) {
  std::sort(hs.begin(), hs.end(), std::greater<>());
  ConvergenceTable table;
  for (double h : hs) {
    const Recovery rec = build_recovery(sys, u, h);
    table.rows.push_back({h, 0.0, rec.report.rescaled_energy, *rec.report.limit_energy,
                          rec.report.gap()});
  }
  table.rate = finest_rate(table.rows);
  return table;
}

ConvergenceTable soft_sweep(const SlipSystem &sys, const LimitProfile &u, std::vector<double> hs,
                            double alpha, double eps_scale, double eps_power) {
  std::sort(hs.begin(), hs.end(), std::greater<>());
  ConvergenceTable table;
  for (double h : hs) {
    const double eps = eps_scale * std::pow(h, eps_power);
    const SmoothSoftRecovery rec(sys, u, eps, h, alpha);
    const EnergyReport rep = rec.energy();
    table.rows.push_back({h, eps, rep.rescaled_energy, *rep.limit_energy, rep.gap()});
  }
  table.rate = finest_rate(table.rows);
  return table;
}

}  // namespace slipform
