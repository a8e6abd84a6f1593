#pragma once

#include <cmath>
#include <stdexcept>

#include "cpforce/constants.hpp"

namespace cpforce {

/// Environment temperature in kelvin. T = 0 is a valid limiting input for
/// every function in this header.
struct Temperature {
  double kelvin;
  explicit Temperature(double k) : kelvin(k) {
    if (!(k >= 0.0))
      throw std::domain_error("Temperature must be non-negative");
  }
};

namespace detail {
// Exponent ħω/(k_B T). Returns +inf at T = 0.
inline double thermal_exponent(double omega, Temperature T) {
  if (T.kelvin == 0.0) return HUGE_VAL;
  return constants::hbar * omega / (constants::k_boltzmann * T.kelvin);
}
// Beyond this exponent e^x overflows a double; the Bose number is then
// indistinguishable from zero.
inline constexpr double kExponentCutoff = 700.0;
}  // namespace detail

/// Bose-Einstein photon number n(ω) = 1/[e^{ħω/(k_B T)} − 1], ω > 0.
inline double photon_number(double omega, Temperature T) {
  if (!(omega > 0.0))
    throw std::domain_error("photon_number: omega must be positive");
  const double x = detail::thermal_exponent(omega, T);
  if (x > detail::kExponentCutoff) return 0.0;
  return 1.0 / std::expm1(x);
}

/// Matsubara frequency ξ_N = 2π k_B T N / ħ. Exact in N and T; requires
/// T > 0 (the zero-temperature path uses a continuous integral instead).
inline double matsubara_frequency(int N, Temperature T) {
  if (N < 0) throw std::domain_error("matsubara_frequency: N must be >= 0");
  if (!(T.kelvin > 0.0))
    throw std::domain_error("matsubara_frequency: T must be positive");
  return 2.0 * constants::pi * constants::k_boltzmann * T.kelvin *
         static_cast<double>(N) / constants::hbar;
}

/// Equilibrium reduction factor r_T = tanh[ħω/(2 k_B T)] = [2n(ω) + 1]^{-1}.
/// Returns 1 at T = 0.
inline double thermal_reduction_ratio(double omega10, Temperature T) {
  if (!(omega10 > 0.0))
    throw std::domain_error("thermal_reduction_ratio: omega10 must be positive");
  const double x = detail::thermal_exponent(omega10, T);
  if (x > detail::kExponentCutoff) return 1.0;
  return std::tanh(0.5 * x);
}

/// 1 − r_T evaluated as 2e^{-x}/(1 + e^{-x}), x = ħω/(k_B T). tanh saturates
/// in double precision long before values like 1e-26 are resolvable; this
/// form keeps them representable down to the underflow threshold.
inline double one_minus_thermal_reduction(double omega10, Temperature T) {
  if (!(omega10 > 0.0))
    throw std::domain_error(
        "one_minus_thermal_reduction: omega10 must be positive");
  const double x = detail::thermal_exponent(omega10, T);
  if (x == HUGE_VAL) return 0.0;
  const double e = std::exp(-x);
  return 2.0 * e / (1.0 + e);
}

}  // namespace cpforce
