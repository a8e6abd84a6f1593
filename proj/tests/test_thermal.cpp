#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cpforce/thermal.hpp"

using namespace cpforce;
using Catch::Approx;

namespace {
constexpr double kRbOmega = 2.37e15;        // rad/s
constexpr double kCaFVibOmega = 1.15e14;    // rad/s
constexpr double kCaFRotOmega = 1.32e11;    // rad/s
}  // namespace

TEST_CASE("photon number basics") {
  const Temperature t300(300.0);

  // ħω/(k_B T) = ln 2  =>  n = 1 exactly
  const double omega_ln2 =
      std::log(2.0) * constants::k_boltzmann * 300.0 / constants::hbar;
  CHECK(photon_number(omega_ln2, t300) == Approx(1.0).epsilon(1e-13));

  CHECK(photon_number(1e15, Temperature(0.0)) == 0.0);

  // CaF rotational transition at room temperature: a few hundred photons
  const double n = photon_number(kCaFRotOmega, t300);
  CHECK(n == Approx(297.05).epsilon(1e-3));

  CHECK_THROWS_AS(photon_number(-1.0, t300), std::domain_error);
  CHECK_THROWS_AS(photon_number(0.0, t300), std::domain_error);
}

TEST_CASE("photon number monotonicity") {
  const Temperature t(123.0);
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(9.0, 16.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double w1 = std::pow(10.0, u(rng));
    const double w2 = w1 * (1.0 + 1e-3);
    CHECK(photon_number(w1, t) > photon_number(w2, t));
  }
  // and increasing in T
  CHECK(photon_number(1e13, Temperature(200.0)) <
        photon_number(1e13, Temperature(300.0)));
}

TEST_CASE("matsubara frequencies") {
  const Temperature t300(300.0);
  CHECK(matsubara_frequency(0, t300) == 0.0);
  CHECK(matsubara_frequency(1, t300) == Approx(2.46776e14).epsilon(1e-4));
  // product invariance: N T enters only as a product
  CHECK(matsubara_frequency(2, Temperature(150.0)) ==
        matsubara_frequency(1, t300));
  CHECK_THROWS_AS(matsubara_frequency(1, Temperature(0.0)), std::domain_error);
  CHECK_THROWS_AS(matsubara_frequency(-1, t300), std::domain_error);
}

TEST_CASE("thermal reduction factor reproduces the quoted values") {
  const Temperature t300(300.0);

  // Rb electronic transition: deviation from unity far below double epsilon
  const double one_minus = one_minus_thermal_reduction(kRbOmega, t300);
  CHECK(one_minus == Approx(1.3e-26).epsilon(0.05));
  CHECK(thermal_reduction_ratio(kRbOmega, t300) == 1.0);

  // CaF vibrational and rotational transitions
  CHECK(thermal_reduction_ratio(kCaFVibOmega, t300) ==
        Approx(0.90).margin(0.005));
  CHECK(thermal_reduction_ratio(kCaFRotOmega, t300) ==
        Approx(0.0017).margin(5e-5));

  CHECK(thermal_reduction_ratio(1e12, Temperature(0.0)) == 1.0);
  CHECK_THROWS_AS(thermal_reduction_ratio(0.0, t300), std::domain_error);
}

TEST_CASE("r_T equals the inverse of 2n+1") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> logw(10.0, 15.5);
  std::uniform_real_distribution<double> temp(1.0, 1000.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double w = std::pow(10.0, logw(rng));
    const Temperature t(temp(rng));
    const double r = thermal_reduction_ratio(w, t);
    const double n = photon_number(w, t);
    CHECK(r * (2.0 * n + 1.0) == Approx(1.0).epsilon(1e-12));
  }
}
