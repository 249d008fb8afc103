#include "doctest.h"

#include <cmath>
#include <numbers>

#include "isocap/continuum.hpp"
#include "isocap/energy.hpp"

using namespace isocap;
using std::numbers::pi;

TEST_CASE("ball volumes") {
  CHECK(ball_volume(1) == doctest::Approx(2.0));
  CHECK(ball_volume(2) == doctest::Approx(pi));
  CHECK(ball_volume(3) == doctest::Approx(4 * pi / 3));
  for (int d = 1; d <= 8; ++d) CHECK(ball_volume(d) == doctest::Approx(ball_volume_gamma(d)).epsilon(1e-13));
}

TEST_CASE("radius of volume") {
  CHECK(r_alpha(ball_volume(3), 3) == doctest::Approx(1.0));
  CHECK(r_alpha(0.0, 3) == 0.0);
  CHECK(r_alpha(32 * pi / 3, 3) == doctest::Approx(2.0));
  CHECK(r_alpha(4 * pi, 2) == doctest::Approx(2.0));
}

TEST_CASE("radial potentials") {
  CHECK(radial_potential_p(0.5, 2.0, 3) == 1.0);
  CHECK(radial_potential_p(2.0, 2.0, 3) == doctest::Approx(0.5));
  CHECK(radial_potential_p(8.0, 1.5, 3) == doctest::Approx(1.0 / 512));
  CHECK(radial_potential_relative(2.0, 2.0, 3) == doctest::Approx(0.0));
  CHECK(radial_potential_relative(1.0, 2.0, 3) == doctest::Approx(1.0));
  CHECK(radial_potential_relative(1.5, 2.0, 3) == doctest::Approx(1.0 / 3));
  CHECK(radial_potential_relative(5.0, 2.0, 3) == 0.0);
  for (double x : {1.0, 1.3, 2.0, 5.0, 40.0})
    CHECK(std::abs(radial_potential_relative(x, 1e3, 3) - radial_potential_p(x, 2.0, 3)) < 1e-2);
}

TEST_CASE("ball capacities") {
  CHECK(cap_p_ball(2.0, 3) == doctest::Approx(4 * pi));
  CHECK(cap_p_ball(1.5, 3) == doctest::Approx(std::sqrt(3.0) * 4 * pi));
  CHECK(cap_relative_ball(2.0, 3) == doctest::Approx(8 * pi));
  CHECK(cap_relative_ball(1e8, 3) == doctest::Approx(cap_p_ball(2.0, 3)).epsilon(1e-7));
  CHECK(scaled_ball_target(2.0, 3) == doctest::Approx(std::pow(4 * pi / 3, -1.0 / 3) * 4 * pi));
  CHECK(scaled_ball_target(1.5, 3) == doctest::Approx(std::pow(4 * pi / 3, -0.5) * std::sqrt(3.0) * 4 * pi));
  const ContinuumBallData b = ball_data(2.0, 3);
  CHECK(b.cap_value == doctest::Approx(4 * pi));
  CHECK(b.ball_volume == doctest::Approx(4 * pi / 3));
}

TEST_CASE("sphere moments") {
  // E|nu_1|^2 = 1/d; E|nu_1| = 1/2 in d = 3 (nu_1 uniform on [-1, 1])
  CHECK(sphere_mean_abs_power(2.0, 3) == doctest::Approx(1.0 / 3));
  CHECK(sphere_mean_abs_power(1.0, 3) == doctest::Approx(0.5));
  CHECK(sphere_mean_abs_power(4.0, 3) == doctest::Approx(0.2));
  CHECK(lattice_anisotropy(2.0, 3) == doctest::Approx(1.0));
  CHECK(lattice_anisotropy(2.0, 2) == doctest::Approx(1.0));
  CHECK(lattice_anisotropy(1.5, 3) > 1.0);
}

TEST_CASE("discretized test function") {
  const LatticeFunction u = discretized_test_function(3.0, 2.0, 3, 6.0);
  CHECK(u(LatticePoint{0, 0, 0}) == 1.0);
  CHECK(u(LatticePoint{3, 0, 0}) == 1.0);
  CHECK(u(LatticePoint{2, 2, 0}) == 1.0);
  CHECK(u(LatticePoint{6, 0, 0}) == doctest::Approx(0.5));
  CHECK(u(LatticePoint{12, 0, 0}) == 0.0);
  CHECK(u(LatticePoint{13, 0, 0}) == 0.0);
  CHECK_THROWS(discretized_test_function(3.0, 2.0, 3, 2.0));
}

TEST_CASE("test function energy") {
  // streaming agrees with the dense energy of the truncated profile where the taper carries little
  const TestFunctionEnergy e = test_function_energy(2.0, 2.0, 3, 8.0);
  CHECK(e.n == 33);
  CHECK(e.inner > 0);
  CHECK(e.tail > 0);

  const double target = scaled_ball_target(2.0, 3);
  for (double k : {4.0, 6.0}) {
    const double cut = dyadic_cutoff(k, 2.0, 3, 1e-3, 4);
    const TestFunctionEnergy t = test_function_energy(k, 2.0, 3, cut);
    const double v = t.scaled_edge(2.0, 3);
    // upper bound m <= target + C N^{-1/3}, with |C| of order one
    CHECK(std::abs(v - target) * std::cbrt(static_cast<double>(t.n)) < 4.0);
    CHECK(std::isfinite(v));
  }
}
