#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cpforce/errors.hpp"
#include "cpforce/quadrature.hpp"
#include "cpforce/thermal.hpp"

namespace cpforce {

struct SumInfo {
  double value = 0.0;
  int terms = 0;  // highest Matsubara order included (0 = only the N=0 term)
};

/// Primed Matsubara sum: 0.5·zero_term + Σ_{N>=1} term(N, ξ_N), accumulated
/// with compensated summation in ascending N. Truncates when three
/// consecutive terms each fall below rel_tol × |partial sum|; accidental
/// zeros therefore cannot end the sum early.
template <typename TermFn>
SumInfo matsubara_sum(Temperature T, double zero_term, TermFn term,
                      double rel_tol, int max_terms, const char* operation) {
  quad::CompensatedSum acc;
  acc.add(0.5 * zero_term);
  int quiet = 0;
  double achieved = HUGE_VAL;
  for (int N = 1; N <= max_terms; ++N) {
    const double xi = matsubara_frequency(N, T);
    const double t = term(N, xi);
    acc.add(t);
    const double s = std::abs(acc.value());
    achieved = s > 0.0 ? std::abs(t) / s : (t == 0.0 ? 0.0 : HUGE_VAL);
    quiet = (achieved <= rel_tol) ? quiet + 1 : 0;
    if (quiet >= 3) return {acc.value(), N};
  }
  throw ConvergenceError(operation, acc.value(), achieved);
}

/// ∫_0^∞ f(ξ) dξ for an integrand finite at ξ = 0 that decays beyond a known
/// scale: doubling segments, each integrated adaptively, until three
/// consecutive segments are negligible relative to the running total.
template <typename F>
double imag_axis_integral(F f, double scale, const quad::Options& opt,
                          const char* operation) {
  auto wrapped = [&f](double xi) -> quad::VecC<1> {
    return {std::complex<double>(f(xi), 0.0)};
  };
  quad::CompensatedSum acc;
  double lo = 0.0;
  double len = scale / 16.0;
  int quiet = 0;
  double achieved = HUGE_VAL;
  for (int seg = 0; seg < 200; ++seg) {
    const double part =
        quad::integrate<1>(wrapped, lo, lo + len, opt)[0].real();
    acc.add(part);
    lo += len;
    len *= 2.0;
    const double s = std::abs(acc.value());
    achieved = s > 0.0 ? std::abs(part) / s : (part == 0.0 ? 0.0 : HUGE_VAL);
    quiet = (achieved <= opt.rel_tol * 10.0) ? quiet + 1 : 0;
    if (quiet >= 3) return acc.value();
  }
  throw ConvergenceError(operation, acc.value(), achieved);
}

}  // namespace cpforce
