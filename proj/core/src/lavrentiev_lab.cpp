#include "slipform/lavrentiev_lab.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <string>

#include "slipform/energy_densities.hpp"
#include "slipform/error.hpp"
#include "slipform/format.hpp"
#include "slipform/numerics.hpp"
#include "slipform/recovery_engine.hpp"
#include "slipform/strip_builder.hpp"

namespace slipform {

namespace {

constexpr double kStageCfl = 0.45;

/// theta solving theta = theta0(y1 + (theta + alpha) y2) by fixed-point
/// iteration; converges while characteristics have not crossed.
double exact_characteristic(const std::function<double(double)> &theta0, double alpha, double y1,
                            double y2) {
  double th = theta0(y1);
  for (int it = 0; it < 500; ++it) {
    const double next = theta0(y1 + (th + alpha) * y2);
    if (std::fabs(next - th) <= 1e-15 * std::max(1.0, std::fabs(th))) return next;
    th = next;
  }
  return th;
}

Vec2 first_column(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// M(theta, gamma; e1) e2 = R_theta (gamma e1 + e2).
Vec2 second_column(double theta, double gamma) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {gamma * c - s, gamma * s + c};
}

void reconstruct_deformation(ConstraintField &f) {
  const std::size_t nx = f.nx;
  const std::size_t ny = f.ny;
  f.deformation.assign(nx * ny, Vec2{});
  const double d1 = f.dy1();
  const double d2 = f.dy2();
  for (std::size_t j = 1; j < ny; ++j) {
    const std::size_t a = f.index(0, j - 1);
    const std::size_t b = f.index(0, j);
    f.deformation[b] = f.deformation[a] + (0.5 * d2) * (second_column(f.theta[a], f.gamma[a]) +
                                                        second_column(f.theta[b], f.gamma[b]));
  }
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 1; i < nx; ++i) {
      const std::size_t a = f.index(i - 1, j);
      const std::size_t b = f.index(i, j);
      f.deformation[b] =
          f.deformation[a] + (0.5 * d1) * (first_column(f.theta[a]) + first_column(f.theta[b]));
    }
  }
}

}  // namespace

ConstraintField ConstraintField::sample(double L, double h, std::size_t nx, std::size_t ny,
                                        const std::function<double(double, double)> &theta,
                                        const std::function<double(double, double)> &gamma) {
  ConstraintField f;
  f.L = L;
  f.h = h;
  f.nx = nx;
  f.ny = ny;
  f.theta.resize(nx * ny);
  f.gamma.resize(nx * ny);
  f.alpha_profile.resize(ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      f.theta[f.index(i, j)] = theta(f.y1(i), f.y2(j));
      f.gamma[f.index(i, j)] = gamma(f.y1(i), f.y2(j));
    }
    f.alpha_profile[j] = f.gamma[f.index(0, j)] - f.theta[f.index(0, j)];
  }
  return f;
}

CurlResidual curl_residual(const ConstraintField &f) {
  if (f.nx < 3 || f.ny < 3) throw Error(Errc::GridTooSmall, "curl residual needs a 3x3 grid");
  const double d1 = f.dy1();
  const double d2 = f.dy2();
  CurlResidual r{0.0, 0.0, 0.0};
  for (std::size_t j = 1; j + 1 < f.ny; ++j) {
    for (std::size_t i = 1; i + 1 < f.nx; ++i) {
      const std::size_t c = f.index(i, j);
      const std::size_t e = f.index(i + 1, j);
      const std::size_t w = f.index(i - 1, j);
      const std::size_t n = f.index(i, j + 1);
      const std::size_t s = f.index(i, j - 1);
      const double th1 = (f.theta[e] - f.theta[w]) / (2.0 * d1);
      const double ga1 = (f.gamma[e] - f.gamma[w]) / (2.0 * d1);
      const double th2 = (f.theta[n] - f.theta[s]) / (2.0 * d2);
      r.r1 = std::max(r.r1, std::fabs(th1 - ga1));
      r.r2 = std::max(r.r2, std::fabs(th2 - f.gamma[c] * th1));
      const Vec2 dcol0 = (first_column(f.theta[n]) - first_column(f.theta[s])) / (2.0 * d2);
      const Vec2 dcol1 = (second_column(f.theta[e], f.gamma[e]) -
                          second_column(f.theta[w], f.gamma[w])) / (2.0 * d1);
      r.rcurl = std::max(r.rcurl, norm(dcol0 - dcol1));
    }
  }
  return r;
}

ConstraintField evolve_constraint_family(const std::function<double(double)> &theta0,
                                         double alpha, double L, double h,
                                         const EvolveOptions &opt) {
  if (opt.nx < 3 || opt.ny < 3) throw Error(Errc::GridTooSmall, "need at least a 3x3 grid");
  if (!(L > 0.0) || !(h > 0.0)) throw Error(Errc::InvalidRange, "L and h must be positive");
  const std::size_t nx = opt.nx;
  const std::size_t ny = opt.ny;
  const double d1 = L / static_cast<double>(nx - 1);
  const double d2 = 2.0 * h / static_cast<double>(ny - 1);

  // Transport speed bound; theta is constant along characteristics.
  double theta_bound = 0.0;
  double slope0 = 0.0;
  {
    const std::size_t probes = 4 * nx;
    for (std::size_t k = 0; k <= probes; ++k) {
      const double y = -L + 3.0 * L * static_cast<double>(k) / static_cast<double>(probes);
      theta_bound = std::max(theta_bound, std::fabs(theta0(y)));
    }
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      slope0 = std::max(slope0, std::fabs(theta0(d1 * (i + 1.0)) - theta0(d1 * i)) / d1);
    }
  }
  const double speed = theta_bound + std::fabs(alpha);
  if (!opt.allow_substeps && speed * d2 / d1 > 0.5) {
    throw Error(Errc::CFLViolation, "max|gamma| dy2/dy1 = " + format_real(speed * d2 / d1) +
                                        " exceeds 1/2");
  }

  const std::size_t pad = static_cast<std::size_t>(std::ceil(speed * h / d1)) + 8;
  const std::size_t P = nx + 2 * pad;
  const auto x_of = [&](std::size_t k) { return (static_cast<double>(k) - pad) * d1; };

  std::vector<double> mid(P);
  for (std::size_t k = 0; k < P; ++k) mid[k] = theta0(x_of(k));

  const auto set_ghosts = [&](std::vector<double> &u, double y2) {
    for (std::size_t k : {std::size_t{0}, std::size_t{1}, P - 2, P - 1}) {
      u[k] = exact_characteristic(theta0, alpha, x_of(k), y2);
    }
  };
  // d theta / d y2 with upwinding for the marching direction `dir`.
  const auto rhs = [&](const std::vector<double> &u, double dir, std::vector<double> &out) {
    out.assign(P, 0.0);
    for (std::size_t k = 2; k + 2 < P; ++k) {
      const double a = u[k] + alpha;
      double grad;
      if (dir * a > 0.0) {
        grad = (-3.0 * u[k] + 4.0 * u[k + 1] - u[k + 2]) / (2.0 * d1);
      } else {
        grad = (3.0 * u[k] - 4.0 * u[k - 1] + u[k - 2]) / (2.0 * d1);
      }
      out[k] = a * grad;
    }
  };
  std::vector<double> k1, s1(P), s2(P);
  const auto advance = [&](std::vector<double> &u, double y_from, double y_to) {
    const double span = y_to - y_from;
    if (span == 0.0) return;
    const double dir = span > 0.0 ? 1.0 : -1.0;
    const auto steps =
        static_cast<std::size_t>(std::ceil(speed * std::fabs(span) / (kStageCfl * d1) - 1e-12));
    const std::size_t n = std::max<std::size_t>(steps, 1);
    const double dt = span / static_cast<double>(n);
    double y = y_from;
    for (std::size_t step = 0; step < n; ++step) {
      rhs(u, dir, k1);
      for (std::size_t k = 0; k < P; ++k) s1[k] = u[k] + dt * k1[k];
      set_ghosts(s1, y + dt);
      rhs(s1, dir, k1);
      for (std::size_t k = 0; k < P; ++k) s2[k] = 0.75 * u[k] + 0.25 * (s1[k] + dt * k1[k]);
      set_ghosts(s2, y + 0.5 * dt);
      rhs(s2, dir, k1);
      for (std::size_t k = 0; k < P; ++k) {
        u[k] = u[k] / 3.0 + (2.0 / 3.0) * (s2[k] + dt * k1[k]);
      }
      y = step + 1 == n ? y_to : y + dt;
      set_ghosts(u, y);
    }
  };

  ConstraintField f;
  f.L = L;
  f.h = h;
  f.nx = nx;
  f.ny = ny;
  f.theta.assign(nx * ny, 0.0);
  f.gamma.assign(nx * ny, 0.0);
  f.alpha_profile.assign(ny, alpha);
  const double limit = opt.blowup_factor * std::max(slope0, 1.0 / L);
  // Along characteristics d theta/d y1 = theta0' / (1 - y2 theta0'); a row
  // whose factor falls below 1/blowup_factor is past (or at) a crossing even
  // when the scheme smears it into a resolvable front.
  double rise = 0.0, fall = 0.0;
  for (std::size_t k = 1; k + 1 < P; ++k) {
    const double slope = (mid[k + 1] - mid[k - 1]) / (2.0 * d1);
    rise = std::max(rise, slope);
    fall = std::max(fall, -slope);
  }
  const auto store = [&](const std::vector<double> &u, std::size_t j) {
    const double y2 = f.y2(j);
    const double compression = 1.0 - std::max(y2 * rise, -y2 * fall);
    if (compression * opt.blowup_factor <= 1.0) {
      throw Error(Errc::BlowUp, "characteristics cross before y2 = " + format_real(y2));
    }
    double grad = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      const double th = u[pad + i];
      if (!std::isfinite(th)) throw Error(Errc::BlowUp, "non-finite angle field");
      f.theta[f.index(i, j)] = th;
      f.gamma[f.index(i, j)] = th + alpha;
      if (i > 0) grad = std::max(grad, std::fabs(th - u[pad + i - 1]) / d1);
    }
    if (grad > limit) {
      throw Error(Errc::BlowUp, "angle gradient " + format_real(grad) + " at y2 = " +
                                    format_real(f.y2(j)) + " signals crossing characteristics");
    }
  };

  // Rows above and below the midline, marched outward from y2 = 0.
  std::vector<double> u = mid;
  double y = 0.0;
  for (std::size_t j = 0; j < ny; ++j) {
    const double yj = f.y2(j);
    if (yj < 0.0) continue;
    advance(u, y, yj);
    y = yj;
    store(u, j);
  }
  u = mid;
  y = 0.0;
  for (std::size_t jj = ny; jj-- > 0;) {
    const double yj = f.y2(jj);
    if (yj >= 0.0) continue;
    advance(u, y, yj);
    y = yj;
    store(u, jj);
  }
  reconstruct_deformation(f);
  return f;
}

SqueezeReport squeeze_measure(const ConstraintField &f) {
  if (f.deformation.size() != f.nx * f.ny) {
    throw Error(Errc::InvalidRange, "field carries no reconstructed deformation");
  }
  SqueezeReport rep;
  rep.h = f.h;
  for (std::size_t j = 0; j < f.ny; ++j) {
    const double gap = norm(f.deformation[f.index(f.nx - 1, j)] - f.deformation[f.index(0, j)]);
    rep.delta_measured = std::max(rep.delta_measured, gap / f.L);
  }
  const double d1 = f.dy1();
  const double d2 = f.dy2();
  double acc = 0.0;
  for (std::size_t j = 0; j < f.ny; ++j) {
    const double wj = (j == 0 || j + 1 == f.ny) ? 0.5 : 1.0;
    for (std::size_t i = 0; i < f.nx; ++i) {
      const double wi = (i == 0 || i + 1 == f.nx) ? 0.5 : 1.0;
      const double g = f.gamma[f.index(i, j)];
      acc += wi * wj * g * g;
    }
  }
  rep.energy = acc * d1 * d2;
  return rep;
}

SqueezeReport squeeze_measure(const PiecewiseAffineMap &map, double L, double h,
                              std::size_t rows) {
  SqueezeReport rep;
  rep.h = h;
  rows = std::max<std::size_t>(rows, 2);
  const double x_lo = map.window.x_lo;
  const double x_hi = map.window.x_hi;
  for (std::size_t j = 0; j < rows; ++j) {
    const double y2 = -h + 2.0 * h * static_cast<double>(j) / static_cast<double>(rows - 1);
    const double gap = norm(map.evaluate({x_hi, y2}) - map.evaluate({x_lo, y2}));
    rep.delta_measured = std::max(rep.delta_measured, gap / L);
  }
  rep.energy = energy_of_map(map).total_energy;
  return rep;
}

double SineAnsatz::operator()(double y1) const {
  return amplitude * std::sin(frequency * y1 + phase);
}

KinkedSqueeze kinked_squeeze(const SlipSystem &sys, double delta_target, double L, double h) {
  const auto build = [&](double phi) {
    const LimitProfile u({0.0, 0.5 * L, L},
                         {{std::cos(phi), std::sin(phi)}, {std::cos(phi), -std::sin(phi)}});
    Recovery rec = build_recovery(sys, u, h);
    KinkedSqueeze out{std::move(rec.map), {}, 0, phi};
    out.squeeze = squeeze_measure(out.map, L, h);
    const std::vector<ShearState> states = lift_profile(sys, u);
    out.kinks = transition(sys, {states[0], states[1], h, 0.0}).kinks;
    return out;
  };
  const auto meets = [&](const KinkedSqueeze &k) { return k.squeeze.delta_measured <= delta_target; };
  const double lo = std::acos(std::clamp(delta_target, 0.0, 1.0));
  KinkedSqueeze first = build(lo);
  if (meets(first)) return first;
  // The transition zone bends less than the limit profile; turn further
  // until the measured squeeze meets the target.
  double a = lo;
  double b = lo;
  std::optional<KinkedSqueeze> hi;
  while (!hi) {
    b = std::min(b + 0.05, 0.5 * kPi);
    KinkedSqueeze trial = [&] {
      try {
        return build(b);
      } catch (const Error &e) {
        if (e.code() != Errc::HTooLarge) throw;
        throw Error(Errc::InfeasibleSqueeze, "kinked branch cannot meet squeeze " +
                                                 format_real(delta_target) + " at h = " +
                                                 format_real(h) + ": " + e.what());
      }
    }();
    if (meets(trial)) hi = std::move(trial);
    else a = b;
    if (!hi && b == 0.5 * kPi) {
      throw Error(Errc::InfeasibleSqueeze, "kinked branch cannot meet the squeeze target");
    }
  }
  while (b - a > 1e-10) {
    const double m = 0.5 * (a + b);
    KinkedSqueeze trial = build(m);
    if (meets(trial)) {
      b = m;
      hi = std::move(trial);
    } else {
      a = m;
    }
  }
  return std::move(*hi);
}

SmoothSqueeze smooth_squeeze(double delta_target, double h, const GapOptions &opt) {
  EvolveOptions ev;
  ev.nx = opt.nx;
  ev.ny = opt.ny;
  const double L = opt.L;
  constexpr double kRejected = 1e6;
  constexpr double kPenalty = 1e3;

  const auto ansatz_of = [](const std::vector<double> &p) {
    return SineAnsatz{std::fabs(p[0]), std::fabs(p[1]), p[2], p[3]};
  };
  const auto evaluate = [&](const SineAnsatz &a) -> std::optional<SmoothSqueeze> {
    // Characteristics cross once |theta0'| h reaches 1.
    if (a.amplitude * a.frequency * h >= 0.9) return std::nullopt;
    try {
      ConstraintField f = evolve_constraint_family(a, a.alpha, L, h, ev);
      SqueezeReport s = squeeze_measure(f);
      return SmoothSqueeze{std::move(f), s, a};
    } catch (const Error &e) {
      if (e.code() == Errc::BlowUp) return std::nullopt;
      throw;
    }
  };
  const auto objective = [&](const std::vector<double> &p) {
    const auto r = evaluate(ansatz_of(p));
    if (!r) return kRejected;
    return r->squeeze.rescaled_energy() +
           kPenalty * std::max(0.0, r->squeeze.delta_measured - delta_target);
  };

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double base_freq = 2.0 * kPi / L;
  std::vector<std::vector<double>> starts{{0.0, base_freq, 0.0, 0.0}};
  for (int k = 0; k < opt.restarts; ++k) {
    starts.push_back({0.5 + 2.0 * unit(rng), base_freq * (0.5 + 2.5 * unit(rng)),
                      2.0 * kPi * unit(rng), -0.5 + unit(rng)});
  }

  std::optional<SmoothSqueeze> best;
  for (const auto &x0 : starts) {
    const std::vector<double> step{0.3, 0.2 * base_freq, 0.5, 0.2};
    const numerics::SimplexResult res =
        numerics::nelder_mead(objective, x0, step, 1e-7, opt.max_iterations);
    SineAnsatz a = ansatz_of(res.x);
    auto cand = evaluate(a);
    if (!cand) continue;
    if (cand->squeeze.delta_measured > delta_target) {
      // Restore feasibility by bending slightly more.
      double lo = 1.0, hi = 1.0;
      std::optional<SmoothSqueeze> feasible;
      for (int grow = 0; grow < 20 && !feasible; ++grow) {
        hi *= 1.05;
        SineAnsatz b = a;
        b.amplitude *= hi;
        if (auto r = evaluate(b); r && r->squeeze.delta_measured <= delta_target) feasible = r;
        else lo = hi;
      }
      if (!feasible) continue;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        SineAnsatz b = a;
        b.amplitude *= mid;
        auto r = evaluate(b);
        if (r && r->squeeze.delta_measured <= delta_target) {
          hi = mid;
          feasible = std::move(r);
        } else {
          lo = mid;
        }
      }
      cand = std::move(feasible);
    }
    if (!best || cand->squeeze.energy < best->squeeze.energy) best = std::move(cand);
  }
  if (!best) {
    throw Error(Errc::InfeasibleSqueeze,
                "no smooth ansatz meets squeeze " + format_real(delta_target) + " at h = " +
                    format_real(h));
  }
  return std::move(*best);
}

GapTable gap_experiment(const SlipSystem &sys, double delta_target, std::vector<double> hs,
                        const GapOptions &opt) {
  if (!sys.is_axis_e1()) throw Error(Errc::InvalidRange, "the gap experiment needs s = +-e1");
  if (!(delta_target >= 0.0 && delta_target <= 1.0)) {
    throw Error(Errc::InvalidRange, "delta_target must lie in [0, 1]");
  }
  std::sort(hs.begin(), hs.end(), std::greater<>());
  GapTable table;
  std::vector<double> kinked_h, kinked_e;
  for (double h : hs) {
    GapRow row{};
    row.h = h;
    const KinkedSqueeze k = kinked_squeeze(sys, delta_target, opt.L, h);
    row.kinks = k.kinks;
    row.kinked_energy = k.squeeze.energy;
    row.kinked_rescaled = k.squeeze.rescaled_energy();
    row.kinked_delta = k.squeeze.delta_measured;
    kinked_h.push_back(h);
    kinked_e.push_back(row.kinked_rescaled);
    try {
      const SmoothSqueeze s = smooth_squeeze(delta_target, h, opt);
      row.smooth_feasible = true;
      row.smooth_energy = s.squeeze.energy;
      row.smooth_rescaled = s.squeeze.rescaled_energy();
      row.smooth_delta = s.squeeze.delta_measured;
      row.smooth_params = s.params;
      // Grid doubling at the optimum.
      EvolveOptions coarse;
      coarse.nx = opt.nx;
      coarse.ny = opt.ny;
      EvolveOptions fine = coarse;
      fine.nx = 2 * opt.nx - 1;
      fine.ny = 2 * opt.ny - 1;
      const SineAnsatz &a = s.params;
      const CurlResidual rc = curl_residual(evolve_constraint_family(a, a.alpha, opt.L, h, coarse));
      const CurlResidual rf = curl_residual(evolve_constraint_family(a, a.alpha, opt.L, h, fine));
      const auto order = [](double c, double f) {
        return c > 0.0 && f > 0.0 ? std::log2(c / f) : std::numeric_limits<double>::infinity();
      };
      row.curl_order_r2 = order(rc.r2, rf.r2);
      row.curl_order_rcurl = order(rc.rcurl, rf.rcurl);
    } catch (const Error &e) {
      if (e.code() != Errc::InfeasibleSqueeze) throw;
      row.smooth_feasible = false;
    }
    table.rows.push_back(row);
  }
  for (const GapRow &r : table.rows) {
    if (r.smooth_feasible) {
      table.fitted_c = table.fitted_c ? std::min(*table.fitted_c, r.smooth_rescaled) : r.smooth_rescaled;
    }
  }
  if (kinked_h.size() >= 2 &&
      std::all_of(kinked_e.begin(), kinked_e.end(), [](double e) { return e > 0.0; })) {
    table.kinked_rate = numerics::log_log_slope(kinked_h, kinked_e);
  }
  return table;
}

}  // namespace slipform
