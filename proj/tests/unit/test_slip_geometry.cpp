#include <doctest.h>

#include <random>

#include "slipform/error.hpp"
#include "slipform/slip_geometry.hpp"
#include "support.hpp"

using namespace slipform;

TEST_CASE("slip directions are normalized and keep axis zeros") {
  const SlipSystem s = SlipSystem::from_direction({3, 4});
  CHECK(s.s().x == doctest::Approx(0.6));
  CHECK(s.s().y == doctest::Approx(0.8));
  CHECK(s.m().x == doctest::Approx(-0.8));
  CHECK(s.m().y == doctest::Approx(0.6));
  CHECK(SlipSystem::from_direction({0, 7}).is_axis_e2());
  CHECK(SlipSystem::from_direction({-2, 0}).is_axis_e1());
  CHECK(SlipSystem::from_direction({-2, 0}).s().x == -1.0);
  CHECK_THROWS_AS(SlipSystem::from_direction({0, 0}), Error);
}

TEST_CASE("normalizing a unit direction is the identity") {
  const SlipSystem s = SlipSystem::from_direction({1, 2});
  const SlipSystem t = SlipSystem::from_direction(s.s());
  CHECK(t.s() == s.s());
}

TEST_CASE("canonical angles lie in [-pi, pi)") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-50, 50);
  for (int k = 0; k < 10000; ++k) {
    const double a = U(rng);
    const double c = canonical_angle(a);
    REQUIRE(c >= -kPi);
    REQUIRE(c < kPi);
    CHECK(std::fabs(std::remainder(a - c, 2 * kPi)) < 1e-12);
  }
  CHECK(canonical_angle(kPi) == -kPi);
}

TEST_CASE("rotated shears have unit slip image and unit determinant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> th(-3, 3), ga(-5, 5);
  for (const SlipSystem &sys : testing_support::general_slips()) {
    for (int k = 0; k < 500; ++k) {
      const ShearState st{th(rng), ga(rng)};
      const Mat2 F = make_shear(sys, st);
      // Independent oracle: R (I + gamma s m^T) assembled by hand.
      const Mat2 R = rotation(st.theta);
      const Mat2 oracle = R * (Mat2::identity() + st.gamma * outer(sys.s(), sys.m()));
      CHECK(max_abs(F - oracle) < 1e-14);
      CHECK(std::fabs(F.det() - 1) < 1e-12);
      CHECK(std::fabs(norm(F * sys.s()) - 1) < 1e-14);
      CHECK(is_admissible(sys, F).admissible);
      const ShearState back = decompose(sys, F);
      CHECK(std::fabs(canonical_angle(back.theta - st.theta)) < 1e-12);
      CHECK(back.gamma == doctest::Approx(st.gamma).epsilon(1e-12));
    }
  }
}

TEST_CASE("decompose rejects matrices off the manifold") {
  const SlipSystem sys = SlipSystem::e2();
  CHECK_FALSE(is_admissible(sys, Mat2{2, 0, 0, 0.5}).admissible);
  try {
    decompose(sys, Mat2{2, 0, 0, 1});
    FAIL("expected NotOnManifold");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::NotOnManifold);
  }
}
