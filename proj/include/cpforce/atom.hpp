#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "cpforce/constants.hpp"
#include "cpforce/errors.hpp"
#include "cpforce/greens.hpp"
#include "cpforce/level_system.hpp"
#include "cpforce/summation.hpp"
#include "cpforce/thermal.hpp"

namespace cpforce {

struct Mat3c {
  std::array<std::array<cd, 3>, 3> m{};
  cd trace() const { return m[0][0] + m[1][1] + m[2][2]; }
  cd scalar() const { return trace() / 3.0; }
};

enum class ShiftMode { perturbative, one_pass };

struct DressingOptions {
  ShiftMode mode = ShiftMode::perturbative;
  GreensOptions greens{};
  double matsubara_rel_tol = 1e-8;
  int matsubara_max_terms = 100000;
  /// Polarizability evaluation refuses within this relative distance of a pole.
  double pole_exclusion = 1e-8;
};

namespace detail {

// Diagonal-axis components of the Γ→0 polarizability of state n on the
// imaginary axis: α_c(iξ) = -(2/ħ) Σ_k w_c(n,k) ω̃_nk/(ω̃_nk² + ξ²).
inline std::array<double, 3> alpha_axes_imag(const LevelSystem& ls,
                                             const DressedLevels& d, int n,
                                             double xi) {
  std::array<double, 3> a{0.0, 0.0, 0.0};
  for (int k = 0; k < ls.size(); ++k) {
    if (k == n) continue;
    const double w = d.omega(n, k);
    const double denom = w * w + xi * xi;
    for (int c = 0; c < 3; ++c)
      a[c] -= 2.0 / constants::hbar * ls.axis_weight(n, k, c) * w / denom;
  }
  return a;
}

// Im G (full tensor, diagonal axes) at coincident points: free-space part
// plus the scattering part.
inline std::array<double, 3> im_green_axes(const PlanarGeometry& g, double omega,
                                           const GreensOptions& opt) {
  const double free_part = imG_freespace(omega);
  if (is_vacuum(g.material)) return {free_part, free_part, free_part};
  const GreenScatter s = scatter_real_axis(g, omega, opt);
  return {free_part + s.xx.imag(), free_part + s.xx.imag(),
          free_part + s.zz.imag()};
}

}  // namespace detail

/// Loss/heating rates Γ_nk. Downward transitions carry n(ω̃)+1 (stimulated
/// plus spontaneous emission), upward ones n(ω̃) (absorption); both share the
/// full Im G at |ω̃_nk| so detailed balance holds by construction.
inline std::vector<std::vector<double>> rates_matrix(
    const LevelSystem& ls, const PlanarGeometry& g, Temperature T,
    const std::vector<std::vector<double>>& omega_tilde,
    const DressingOptions& opt = {}) {
  const int n = ls.size();
  std::vector<std::vector<double>> gamma(n, std::vector<double>(n, 0.0));
  const double pref = 2.0 * constants::vacuum_permeability / constants::hbar;
  for (int upper = 0; upper < n; ++upper) {
    for (int lower = 0; lower < upper; ++lower) {
      const double w = omega_tilde[upper][lower];
      if (!(w > 0.0))
        throw ModelError("rates: shifted frequencies out of order");
      const auto im = detail::im_green_axes(g, w, opt.greens);
      double coupling = 0.0;
      for (int c = 0; c < 3; ++c)
        coupling += ls.axis_weight(upper, lower, c) * im[c];
      coupling = std::max(coupling, 0.0);
      const double nbar = photon_number(w, T);
      gamma[upper][lower] = pref * w * w * (nbar + 1.0) * coupling;
      gamma[lower][upper] = pref * w * w * nbar * coupling;
    }
  }
  return gamma;
}

/// Surface-induced frequency shift δω_n = U_n/ħ, with U_n assembled from the
/// imaginary-axis Matsubara sum (nonresonant) and real-frequency resonant
/// terms, the contour-equivalent form of the principal-value integral.
/// Only the scattering Green tensor enters, so the free-space Lamb shift and
/// the position-independent thermal shift are excluded by construction.
inline std::vector<double> shift_vector(
    const LevelSystem& ls, const PlanarGeometry& g, Temperature T,
    const std::vector<std::vector<double>>& omega_tilde,
    const DressingOptions& opt = {}) {
  const int n = ls.size();
  std::vector<double> delta(n, 0.0);
  if (is_vacuum(g.material)) return delta;

  const double mu0 = constants::vacuum_permeability;
  const GreenScatter limit0 = scatter_xi2_zero_limit(g);

  for (int state = 0; state < n; ++state) {
    auto alpha_dot_green = [&](double xi, const GreenScatter& gs) {
      std::array<double, 3> a{0.0, 0.0, 0.0};
      for (int k = 0; k < ls.size(); ++k) {
        if (k == state) continue;
        const double w = omega_tilde[state][k];
        const double denom = w * w + xi * xi;
        for (int c = 0; c < 3; ++c)
          a[c] -= 2.0 / constants::hbar * ls.axis_weight(state, k, c) * w / denom;
      }
      return a[0] * gs.xx.real() + a[1] * gs.xx.real() + a[2] * gs.zz.real();
    };

    double u_mats;
    if (T.kelvin > 0.0) {
      const double zero_term = alpha_dot_green(0.0, limit0);
      const SumInfo s = matsubara_sum(
          T, zero_term,
          [&](int, double xi) {
            return xi * xi *
                   alpha_dot_green(xi, scatter_imag_axis(g, xi, opt.greens));
          },
          opt.matsubara_rel_tol, opt.matsubara_max_terms, "shifts");
      u_mats = mu0 * constants::k_boltzmann * T.kelvin * s.value;
    } else {
      const double integral = imag_axis_integral(
          [&](double xi) {
            if (xi == 0.0) return alpha_dot_green(0.0, limit0);
            return xi * xi *
                   alpha_dot_green(xi, scatter_imag_axis(g, xi, opt.greens));
          },
          constants::speed_of_light / (2.0 * g.z), opt.greens.quad, "shifts");
      u_mats = mu0 * constants::hbar / (2.0 * constants::pi) * integral;
    }

    double u_res = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == state) continue;
      const double w = omega_tilde[state][k];
      const double a = std::abs(w);
      const double nbar = photon_number(a, T);
      if (w < 0.0 && nbar == 0.0) continue;  // no thermal photons to absorb
      const GreenScatter gs = scatter_real_axis(g, a, opt.greens);
      double coupling = 0.0;
      const std::array<double, 3> re_g{gs.xx.real(), gs.xx.real(), gs.zz.real()};
      for (int c = 0; c < 3; ++c)
        coupling += ls.axis_weight(state, k, c) * re_g[c];
      if (w > 0.0)
        u_res -= mu0 * w * w * (nbar + 1.0) * coupling;
      else
        u_res += mu0 * w * w * nbar * coupling;
    }

    delta[state] = (u_mats + u_res) / constants::hbar;
  }
  return delta;
}

/// Rates and shifts together. The default perturbative mode evaluates both
/// at the bare transition frequencies; one_pass recomputes them once with
/// the shifted frequencies folded in.
inline DressedLevels dress(const LevelSystem& ls, const PlanarGeometry& g,
                           Temperature T, const DressingOptions& opt = {}) {
  const int n = ls.size();
  auto bare = DressedLevels::bare(ls).omega_tilde;

  DressedLevels d;
  d.shifts = shift_vector(ls, g, T, bare, opt);
  d.omega_tilde = bare;

  if (opt.mode == ShiftMode::one_pass) {
    std::vector<std::vector<double>> refined(n, std::vector<double>(n, 0.0));
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k) {
        refined[m][k] = ls.omega(m, k) + d.shifts[m] - d.shifts[k];
        if (m != k && refined[m][k] * ls.omega(m, k) <= 0.0)
          throw IterationError(
              "dress: one-pass refinement produced a shift comparable to a "
              "transition frequency");
      }
    d.shifts = shift_vector(ls, g, T, refined, opt);
    d.omega_tilde = refined;
  }

  d.rates = rates_matrix(ls, g, T, d.omega_tilde, opt);
  d.total_rates.assign(n, 0.0);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k) d.total_rates[m] += d.rates[m][k];
  return d;
}

/// State-n polarizability tensor with poles Ω_nk = ω̃_nk + i(Γ_n+Γ_k)/2:
/// α_n(ω) = (1/ħ) Σ_k [ d_nk d_kn/(−Ω_nk−ω) + d_kn d_nk/(−Ω*_nk+ω) ].
inline Mat3c polarizability(const LevelSystem& ls, const DressedLevels& d,
                            int n, cd omega, double pole_exclusion = 1e-8) {
  Mat3c alpha;
  for (int k = 0; k < ls.size(); ++k) {
    if (k == n) continue;
    const cd Omega(d.omega(n, k),
                   0.5 * (d.gamma_total(n) + d.gamma_total(k)));
    const double radius = pole_exclusion * std::abs(Omega);
    if (std::abs(omega + Omega) < radius ||
        std::abs(omega - std::conj(Omega)) < radius)
      throw PoleProximityError("polarizability: evaluation too close to pole");
    const cd resonant = 1.0 / (-Omega - omega) + 1.0 / (-std::conj(Omega) + omega);
    if (ls.isotropic()) {
      const cd diag = ls.dipole_sq(n, k) / 3.0 * resonant / constants::hbar;
      for (int c = 0; c < 3; ++c) alpha.m[c][c] += diag;
    } else {
      const Vec3& dv = ls.dipole(n, k);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          alpha.m[a][b] += dv[a] * dv[b] * resonant / constants::hbar;
    }
  }
  return alpha;
}

/// Boltzmann populations over the shifted energies Ẽ_n = E_n + ħδω_n;
/// collapses to the ground state at T = 0.
inline std::vector<double> thermal_state(const LevelSystem& ls,
                                         const DressedLevels& d, Temperature T) {
  const int n = ls.size();
  std::vector<double> pop(n, 0.0);
  if (T.kelvin == 0.0) {
    pop[0] = 1.0;
    return pop;
  }
  std::vector<double> e(n);
  double emin = HUGE_VAL;
  for (int i = 0; i < n; ++i) {
    e[i] = d.shifted_energy(ls, i);
    emin = std::min(emin, e[i]);
  }
  double norm = 0.0;
  const double kT = constants::k_boltzmann * T.kelvin;
  for (int i = 0; i < n; ++i) {
    pop[i] = std::exp(-(e[i] - emin) / kT);
    norm += pop[i];
  }
  for (double& p : pop) p /= norm;
  return pop;
}

/// Thermal polarizability α_T(ω) = Σ_n σ_{T,nn} α_n(ω).
inline Mat3c thermal_polarizability(const LevelSystem& ls,
                                    const DressedLevels& d, Temperature T,
                                    cd omega, double pole_exclusion = 1e-8) {
  const std::vector<double> pop = thermal_state(ls, d, T);
  Mat3c total;
  for (int n = 0; n < ls.size(); ++n) {
    if (pop[n] == 0.0) continue;
    const Mat3c a = polarizability(ls, d, n, omega, pole_exclusion);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) total.m[i][j] += pop[n] * a.m[i][j];
  }
  return total;
}

/// Γ→0 isotropic scalar polarizability of state n on the imaginary axis,
/// as a reusable functor ξ ↦ α_n(iξ) for the Lifshitz-type sums.
inline std::function<double(double)> alpha_imag_axis_scalar(
    const LevelSystem& ls, const DressedLevels& d, int n) {
  return [&ls, omega_tilde = d.omega_tilde, n](double xi) {
    double a = 0.0;
    for (int k = 0; k < ls.size(); ++k) {
      if (k == n) continue;
      const double w = omega_tilde[n][k];
      a -= 2.0 / (3.0 * constants::hbar) * ls.dipole_sq(n, k) * w /
           (w * w + xi * xi);
    }
    return a;
  };
}

}  // namespace cpforce
