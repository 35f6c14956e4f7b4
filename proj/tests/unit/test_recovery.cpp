#include <doctest.h>

#include <cmath>
#include <sstream>

#include "slipform/compatibility.hpp"
#include "slipform/energy_densities.hpp"
#include "slipform/error.hpp"
#include "slipform/recovery_engine.hpp"

using namespace slipform;

TEST_CASE("profile CSV round trip and validation") {
  std::istringstream in("t_end,xi1,xi2\n1,2,0\n2.5,0,2\n");
  const LimitProfile u = LimitProfile::read_csv(in);
  CHECK(u.segments() == 2);
  CHECK(u.length() == 2.5);
  CHECK(u.value(2.5).x == doctest::Approx(2));
  CHECK(u.value(2.5).y == doctest::Approx(3));
  std::ostringstream out;
  u.write_csv(out);
  std::istringstream again(out.str());
  const LimitProfile v = LimitProfile::read_csv(again);
  CHECK(v.breakpoints() == u.breakpoints());
  std::istringstream bad("t_end,xi1,xi2\n1,2\n");
  CHECK_THROWS_AS(LimitProfile::read_csv(bad), Error);
  CHECK_THROWS_AS(LimitProfile({0, 1, 1}, {{1, 0}, {1, 0}}), Error);
}

TEST_CASE("lifting profiles") {
  const SlipSystem e2 = SlipSystem::e2();
  const LimitProfile u({0, 1, 2}, {{2, 0}, {0, 2}});
  const auto states = lift_profile(e2, u);
  CHECK(states[0].gamma * states[0].gamma == doctest::Approx(3));
  CHECK(states[1].gamma * states[1].gamma == doctest::Approx(3));
  CHECK(limit_energy(e2, u) == doctest::Approx(2 * 3 * 2));
  const auto straight = lift_profile(SlipSystem::e1(), LimitProfile::straight(3, {1, 0}));
  CHECK(straight.size() == 1);
  CHECK(straight[0].gamma == 0.0);
  CHECK(lift_profile(SlipSystem::from_direction({1, 1}), LimitProfile::straight(1, {std::sqrt(2.0), 0}))[0].gamma ==
        doctest::Approx(-0.732051).epsilon(1e-6));
  try {
    lift_profile(e2, LimitProfile({0, 1, 2}, {{1, 0}, {0.5, 0}}));
    FAIL("expected ShortSegment");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::ShortSegment);
    CHECK(std::string(e.what()).find("segment 1") != std::string::npos);
  }
}

TEST_CASE("straight profile recovers with zero gap") {
  const LimitProfile u = LimitProfile::straight(2, {3, 0});
  const Recovery rec = build_recovery(SlipSystem::from_direction({1, 2}), u, 0.1);
  CHECK(rec.map.cells.size() == 1);
  CHECK(rec.report.gap() == 0.0);
}

TEST_CASE("recovery maps are valid and their gap decreases linearly") {
  const SlipSystem e2 = SlipSystem::e2();
  const LimitProfile u({0, 1, 2}, {{1, 0}, {0, 1}});
  const ConvergenceTable t = recovery_sweep(e2, u, {0.1, 0.05, 0.025});
  REQUIRE(t.rate);
  CHECK(*t.rate == doctest::Approx(1.0).epsilon(0.1));
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    CHECK(t.rows[k].gap >= 0);
    if (k) CHECK(t.rows[k].gap < t.rows[k - 1].gap);
    CHECK(t.rows[k].gap / t.rows[k].h == doctest::Approx(t.rows[0].gap / t.rows[0].h).epsilon(0.1));
  }
  const Recovery rec = build_recovery(e2, u, 0.05);
  CHECK(validate_map(rec.map).ok({}));
  CHECK(rec.report.rescaled_energy >= *rec.report.limit_energy - 1e-9);
  CHECK(rec.map.evaluate({0, 0}).x == doctest::Approx(0).scale(1));

  const LimitProfile u_turn({0, 1, 2}, {{1, 0}, {-1, 0}});
  const ConvergenceTable ut = recovery_sweep(e2, u_turn, {0.1, 0.05, 0.025});
  CHECK(ut.rows[0].limit_energy == 0.0);
  CHECK(*ut.rate == doctest::Approx(1.0).epsilon(0.1));

  CHECK_THROWS_AS(build_recovery(e2, u, 2.0), Error);
}

TEST_CASE("recovery for a general slip and for e1 rotations") {
  const SlipSystem diag = SlipSystem::from_direction({1, 2});
  const LimitProfile u({0, 30, 60}, {{1.5, 0}, {0, 2}});
  const Recovery rec = build_recovery(diag, u, 0.02);
  CHECK(validate_map(rec.map).ok({}));
  CHECK(rec.report.rescaled_energy >= *rec.report.limit_energy - 1e-9);

  const LimitProfile bend({0, 3, 6}, {{std::cos(0.3), std::sin(0.3)}, {std::cos(0.3), -std::sin(0.3)}});
  const Recovery e1rec = build_recovery(SlipSystem::e1(), bend, 0.05);
  CHECK(validate_map(e1rec.map).ok({}));
  CHECK(*e1rec.report.limit_energy == 0.0);
}

TEST_CASE("zig-zag lamination") {
  const SlipSystem e2 = SlipSystem::e2();
  const LimitProfile u({0, 1, 3}, {{0.5, 0}, {1, 0}});
  const LimitProfile z1 = zigzag_approximate(e2, u, 1);
  CHECK(z1.segments() == 3);
  CHECK(z1.derivatives()[0].x == doctest::Approx(0.5));
  CHECK(z1.derivatives()[0].y == doctest::Approx(std::sin(kPi / 3)));
  CHECK(z1.derivatives()[1].y == doctest::Approx(-std::sin(kPi / 3)));
  double prev = INFINITY;
  for (int i : {1, 4, 16}) {
    const LimitProfile z = zigzag_approximate(e2, u, i);
    for (const Vec2 &d : z.derivatives()) CHECK(norm(d) == doctest::Approx(1).epsilon(1e-15));
    const Vec2 end1 = z.value(1.0);
    CHECK(norm(end1 - u.value(1.0)) <= 1e-12);
    const double dist = sup_distance(z, u);
    CHECK(dist <= 1.0 / (2 * i) * std::sin(kPi / 3) + 1e-12);
    CHECK(dist < prev);
    prev = dist;
  }
  const auto specs = zigzag_specs(e2, u, 2);
  REQUIRE(specs.size() == 1);
  CHECK(specs[0].half_angle == doctest::Approx(kPi / 3));
  CHECK_THROWS_AS(zigzag_approximate(e2, u, 0), Error);
}

TEST_CASE("smooth soft recovery") {
  const SlipSystem e2 = SlipSystem::e2();
  const LimitProfile kink({0, 1, 2}, {{1, 0}, {0, 1}});
  const LimitProfile straight = LimitProfile::straight(2, {1.5, 0});

  // A constant state sits on the manifold; the soft density undercuts gamma^2
  // by O(eps).
  double prev_gap = -INFINITY;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const double gap = SmoothSoftRecovery(e2, straight, eps, 0.01, 1.0).energy().gap();
    CHECK(gap < 0);
    CHECK(gap > prev_gap);
    CHECK(-gap <= 12 * eps);
    prev_gap = gap;
  }

  const SmoothSoftRecovery rec(e2, kink, 0.1, 0.1, 1.0);
  CHECK(rec.fd_gradient_check(1000, 1e-5, 7) <= 1e-6);
  // O(step^2): halving the step quarters the discrepancy where truncation dominates.
  const SmoothSoftRecovery fine(e2, kink, 0.1, 0.01, 1.0);
  const double e_big = fine.fd_gradient_check(200, 4e-5, 3);
  const double e_small = fine.fd_gradient_check(200, 2e-5, 3);
  CHECK(e_big / e_small == doctest::Approx(4).epsilon(0.1));

  // Transition windows carry vanishing derivatives at both ends.
  const double w = rec.transition_width();
  CHECK(max_abs(rec.shear_field_derivative(1.0)) < 1e-12);
  CHECK(max_abs(rec.shear_field_derivative(1.0 + w)) < 1e-12);

  double prev = INFINITY;
  for (double h : {0.02, 0.01, 0.005}) {
    const double gap = SmoothSoftRecovery(e2, kink, 0.1, h, 1.0).energy().gap();
    CHECK(gap < prev);
    prev = gap;
  }

  CHECK_THROWS_AS(SmoothSoftRecovery(e2, kink, 0.1, 0.1, 2.0), Error);
  CHECK_THROWS_AS(SmoothSoftRecovery(e2, kink, 0.0, 0.1, 1.0), Error);
  CHECK_THROWS_AS(SmoothSoftRecovery(SlipSystem::e1(), kink, 0.1, 0.1, 1.0), Error);
}

TEST_CASE("trivial sweep has an undefined rate") {
  const ConvergenceTable t = recovery_sweep(SlipSystem::e2(), LimitProfile::straight(1, {1, 0}), {0.1, 0.05, 0.025});
  CHECK_FALSE(t.rate.has_value());
  for (const auto &r : t.rows) CHECK(r.gap == 0.0);
}
