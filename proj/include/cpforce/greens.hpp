#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "cpforce/constants.hpp"
#include "cpforce/errors.hpp"
#include "cpforce/material.hpp"
#include "cpforce/quadrature.hpp"

namespace cpforce {

using cd = std::complex<double>;

/// Atom at height z (meters) above a homogeneous half-space; ambient vacuum.
struct PlanarGeometry {
  double z;
  Material material;
  PlanarGeometry(double z_, Material m) : z(z_), material(std::move(m)) {
    if (!(z > 0.0)) throw std::domain_error("PlanarGeometry: z must be > 0");
    validate(material);
  }
};

/// Coincident-point scattering Green tensor at one frequency. Planar symmetry
/// leaves xx = yy and zz; off-diagonals vanish. Values are 1/m, z-gradients
/// 1/m^2. On the imaginary axis all entries are real.
struct GreenScatter {
  cd xx{};        // = yy
  cd zz{};
  cd trace{};     // 2 xx + zz
  cd dxx_dz{};
  cd dzz_dz{};
  cd d_trace_dz{};
  bool accuracy_warning = false;

  /// Gradient acting on one argument only, evaluated at coincidence. The
  /// reflected path depends on the sum of the two heights, so this is
  /// exactly half the coincident-point derivative.
  cd one_sided_d_trace_dz() const { return 0.5 * d_trace_dz; }
  cd one_sided_dxx_dz() const { return 0.5 * dxx_dz; }
  cd one_sided_dzz_dz() const { return 0.5 * dzz_dz; }

  static GreenScatter assemble(cd xx, cd zz, cd dxx, cd dzz, bool warn = false) {
    GreenScatter g;
    g.xx = xx;
    g.zz = zz;
    g.trace = 2.0 * xx + zz;
    g.dxx_dz = dxx;
    g.dzz_dz = dzz;
    g.d_trace_dz = 2.0 * dxx + dzz;
    g.accuracy_warning = warn;
    return g;
  }
};

enum class FrequencyAxis { real, imaginary };

struct FresnelPair {
  cd rs{};
  cd rp{};
};

struct GreensOptions {
  quad::Options quad{};
  /// Loss-of-accuracy flag threshold for the real-axis phase 2ωz/c.
  double oscillation_budget = 1.0e4;
};

namespace detail {

/// Continuation of the permittivity closed forms to complex frequency with
/// Im ω >= 0 (used by the resonant terms of the nonperturbative force).
inline cd eps_complex_frequency(const Material& m, cd omega) {
  return std::visit(
      [omega](const auto& v) -> cd {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Drude>) {
          return 1.0 - v.plasma_frequency * v.plasma_frequency /
                           (omega * (omega + cd(0.0, v.relaxation_rate)));
        } else if constexpr (std::is_same_v<T, Plasma>) {
          return 1.0 - v.plasma_frequency * v.plasma_frequency / (omega * omega);
        } else if constexpr (std::is_same_v<T, DrudeLorentz>) {
          cd eps(1.0, 0.0);
          for (const auto& o : v.oscillators)
            eps += o.strength / (o.resonance * o.resonance - omega * omega -
                                 cd(0.0, o.damping) * omega);
          if (v.drude_part)
            eps -= v.drude_part->plasma_frequency *
                   v.drude_part->plasma_frequency /
                   (omega * (omega + cd(0.0, v.drude_part->relaxation_rate)));
          return eps;
        } else if constexpr (std::is_same_v<T, Vacuum>) {
          return cd(1.0, 0.0);
        } else {
          throw std::domain_error("perfect mirror has no permittivity");
        }
      },
      m);
}

// Fresnel coefficients from the axial wavenumbers b = sqrt(w^2/c^2 - k||^2)
// (vacuum side) and b1 (medium side). Differences are formed through
// b^2 - b1^2 = -(eps-1) w^2/c^2 so that nearly transparent media (dilute-gas
// permittivities) do not lose the reflection signal to cancellation.
inline FresnelPair fresnel_from_eps(cd eps, cd w_over_c_sq, cd beta) {
  const cd delta = eps - 1.0;
  if (delta == 0.0) return {cd(0.0), cd(0.0)};
  const cd beta1 = std::sqrt(beta * beta + delta * w_over_c_sq);
  const cd sum = beta + beta1;
  const cd num_s = -delta * w_over_c_sq / sum;  // = beta - beta1
  FresnelPair f;
  f.rs = num_s / sum;
  f.rp = delta * (beta - w_over_c_sq / sum) / (eps * beta + beta1);
  return f;
}

inline FresnelPair fresnel_imag_axis(const Material& m, double xi, double kpar) {
  if (is_perfect_mirror(m)) return {cd(-1.0), cd(1.0)};
  if (xi == 0.0) {
    // static limits: the transverse response survives only when xi^2 eps(i xi)
    // stays finite and nonzero (plasma model)
    const double a2 =
        eps_xi2_static_limit(m) / (constants::speed_of_light * constants::speed_of_light);
    const double kappa1 = std::sqrt(kpar * kpar + a2);
    FresnelPair f;
    f.rs = (a2 == 0.0) ? cd(0.0) : cd(-a2 / ((kpar + kappa1) * (kpar + kappa1)));
    f.rp = cd(static_rp(m));
    return f;
  }
  const double q = xi / constants::speed_of_light;
  const double kappa = std::sqrt(kpar * kpar + q * q);
  // on the imaginary axis the general expression reduces to real arithmetic:
  // beta -> i kappa, beta1 -> i kappa1, and the i's cancel in the ratios
  const double eps = eps_imag_axis(m, xi);
  const double delta = eps - 1.0;
  if (delta == 0.0) return {cd(0.0), cd(0.0)};
  const double kappa1 = std::sqrt(kappa * kappa + delta * q * q);
  const double sum = kappa + kappa1;
  FresnelPair f;
  f.rs = cd(-delta * q * q / (sum * sum));
  f.rp = cd(delta * (kappa - q * q / sum) / (eps * kappa + kappa1));
  return f;
}

inline FresnelPair fresnel_complex(const Material& m, cd omega, double kpar) {
  if (is_perfect_mirror(m)) return {cd(-1.0), cd(1.0)};
  const cd w2 = omega * omega /
                (constants::speed_of_light * constants::speed_of_light);
  const cd beta = std::sqrt(w2 - kpar * kpar);
  return fresnel_from_eps(eps_complex_frequency(m, omega), w2, beta);
}

inline std::vector<double> oscillation_breakpoints(double a, double b,
                                                   double period_scale) {
  // panel boundaries at quarter-oscillation spacing, capped
  std::vector<double> bp{a};
  if (period_scale > 0.0) {
    const double step = period_scale;
    const std::size_t count =
        static_cast<std::size_t>(std::min(4096.0, std::floor((b - a) / step)));
    for (std::size_t i = 1; i <= count; ++i) bp.push_back(a + i * step);
  }
  if (bp.back() < b) bp.push_back(b);
  return bp;
}

}  // namespace detail

/// Two-media Fresnel reflection coefficients for given polarization pair.
/// PerfectMirror returns (-1, +1) identically; on the imaginary axis
/// freq = 0 evaluates the per-model static limits.
inline FresnelPair fresnel(const Material& m, FrequencyAxis axis, double freq,
                           double kpar) {
  if (!(freq >= 0.0) || !(kpar >= 0.0))
    throw std::domain_error("fresnel: freq and kpar must be >= 0");
  if (axis == FrequencyAxis::imaginary)
    return detail::fresnel_imag_axis(m, freq, kpar);
  if (is_perfect_mirror(m)) return {cd(-1.0), cd(1.0)};
  if (freq == 0.0)
    throw std::domain_error("fresnel: real-axis evaluation needs freq > 0");
  return detail::fresnel_complex(m, cd(freq, 0.0), kpar);
}

/// Each diagonal element of Im G^(0) at coincident points: ω/(6πc).
inline double imG_freespace(double omega) {
  if (!(omega > 0.0)) throw std::domain_error("imG_freespace: omega must be > 0");
  return omega / (6.0 * constants::pi * constants::speed_of_light);
}

/// Scattering Green tensor on the imaginary axis, G^(1)(z, z, iξ), ξ > 0.
/// Single-interface reflection integral in the axial decay variable
/// κ = sqrt(k||^2 + ξ^2/c^2); the e^{-2κz} factor guarantees integrability.
inline GreenScatter scatter_imag_axis(const PlanarGeometry& g, double xi,
                                      const GreensOptions& opt = {}) {
  if (xi == 0.0)
    throw std::domain_error(
        "scatter_imag_axis: xi = 0 diverges; use scatter_xi2_zero_limit for "
        "the N = 0 Matsubara entry");
  if (!(xi > 0.0)) throw std::domain_error("scatter_imag_axis: xi must be >= 0");
  if (is_vacuum(g.material)) return GreenScatter{};

  const double c = constants::speed_of_light;
  const double q = xi / c;
  const double z = g.z;
  const double pref = std::exp(-2.0 * q * z) / (8.0 * constants::pi);
  if (pref == 0.0) return GreenScatter{};

  // kappa = q + v/(2z); weight e^{-2 kappa z} = e^{-2qz} e^{-v}
  auto integrand = [&](double v) -> quad::VecC<4> {
    const double kappa = q + v / (2.0 * z);
    const double kpar = std::sqrt(std::max(0.0, kappa * kappa - q * q));
    const FresnelPair f = detail::fresnel_imag_axis(g.material, xi, kpar);
    const double rs = f.rs.real();
    const double rp = f.rp.real();
    const double w = std::exp(-v) / (2.0 * z);  // includes dkappa = dv/(2z)
    const double fxx = (rs - rp * kappa * kappa / (q * q)) * w;
    const double fzz = -2.0 * (kappa * kappa - q * q) / (q * q) * rp * w;
    return {cd(fxx), cd(fzz), cd(-2.0 * kappa * fxx), cd(-2.0 * kappa * fzz)};
  };

  const std::vector<double> bp{0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 70.0};
  const auto I = quad::integrate<4>(integrand, bp, opt.quad);
  return GreenScatter::assemble(pref * I[0], pref * I[1], pref * I[2],
                                pref * I[3]);
}

/// lim_{ξ→0} ξ² G^(1)(z, z, iξ) and its z-gradient, closed form. This is the
/// quantity the N = 0 Matsubara term pairs with the ξ_N² prefactor; direct
/// evaluation at ξ = 0 would be 0·∞. Units: (rad/s)²/m and (rad/s)²/m².
inline GreenScatter scatter_xi2_zero_limit(const PlanarGeometry& g) {
  const double c2 = constants::speed_of_light * constants::speed_of_light;
  const double r = is_vacuum(g.material) ? 0.0 : static_rp(g.material);
  const double z3 = g.z * g.z * g.z;
  const double xx = -r * c2 / (32.0 * constants::pi * z3);
  const double zz = 2.0 * xx;
  return GreenScatter::assemble(cd(xx), cd(zz), cd(-3.0 * xx / g.z),
                                cd(-3.0 * zz / g.z));
}

/// Scattering Green tensor on the real axis, G^(1)(z, z, ω), ω > 0. The
/// k|| integral splits at the light line: the propagating sector runs in the
/// axial wavenumber γ (no endpoint singularity) with quarter-period panels
/// against the e^{2iγz} phase; the evanescent sector reuses the imaginary-
/// axis decay variable.
inline GreenScatter scatter_real_axis(const PlanarGeometry& g, double omega,
                                      const GreensOptions& opt = {}) {
  if (!(omega > 0.0))
    throw std::domain_error("scatter_real_axis: omega must be > 0");
  if (is_vacuum(g.material)) return GreenScatter{};
  if (!is_perfect_mirror(g.material)) {
    // an undamped medium with eps < -1 carries a bound surface mode whose
    // pole sits on the k|| path; the integral is defined only with loss
    const cd eps = eps_real_axis(g.material, omega);
    if (eps.imag() < 1e-12 * std::abs(eps.real()) && eps.real() < -1.0)
      throw std::domain_error(
          "scatter_real_axis: lossless surface-mode pole on the integration "
          "path; give the material a finite damping rate");
  }

  const double c = constants::speed_of_light;
  const double k0 = omega / c;
  const double z = g.z;
  const bool warn = 2.0 * k0 * z > opt.oscillation_budget;
  const bool mirror = is_perfect_mirror(g.material);
  const cd eps = mirror ? cd(0.0) : eps_real_axis(g.material, omega);
  const cd w2(k0 * k0, 0.0);
  auto reflection = [&](cd beta) {
    return mirror ? FresnelPair{cd(-1.0), cd(1.0)}
                  : detail::fresnel_from_eps(eps, w2, beta);
  };

  // propagating sector: gamma in [0, k0]
  auto prop = [&](double gamma) -> quad::VecC<4> {
    const double kpar2 = std::max(0.0, k0 * k0 - gamma * gamma);
    const FresnelPair f = reflection(cd(gamma, 0.0));
    const cd phase = std::exp(cd(0.0, 2.0 * gamma * z));
    const cd i(0.0, 1.0);
    const cd fxx = i * (f.rs - f.rp * (gamma * gamma) / (k0 * k0)) * phase;
    const cd fzz = i * 2.0 * (kpar2 / (k0 * k0)) * f.rp * phase;
    const cd dz = cd(0.0, 2.0 * gamma);
    return {fxx, fzz, dz * fxx, dz * fzz};
  };
  const auto bp_prop =
      detail::oscillation_breakpoints(0.0, k0, constants::pi / (4.0 * z));
  const auto Ip = quad::integrate<4>(prop, bp_prop, opt.quad);

  // evanescent sector: kappa in (0, inf), weight e^{-2 kappa z}
  auto evan = [&](double v) -> quad::VecC<4> {
    const double kappa = v / (2.0 * z);
    const double kpar2 = kappa * kappa + k0 * k0;
    const FresnelPair f = reflection(cd(0.0, kappa));
    const double w = std::exp(-v) / (2.0 * z);
    const cd fxx = (f.rs + f.rp * (kappa * kappa) / (k0 * k0)) * w;
    const cd fzz = 2.0 * (kpar2 / (k0 * k0)) * f.rp * w;
    return {fxx, fzz, -2.0 * kappa * fxx, -2.0 * kappa * fzz};
  };
  const std::vector<double> bp_ev{0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 70.0};
  const auto Ie = quad::integrate<4>(evan, bp_ev, opt.quad);

  const double pref = 1.0 / (8.0 * constants::pi);
  return GreenScatter::assemble(pref * (Ip[0] + Ie[0]), pref * (Ip[1] + Ie[1]),
                                pref * (Ip[2] + Ie[2]), pref * (Ip[3] + Ie[3]),
                                warn);
}

/// Analytic continuation of the real-axis representation to complex frequency
/// with Im Ω >= 0 (resonant terms of the nonperturbative force evaluate at
/// Ω_nk = ω̃_nk + i(Γ_n+Γ_k)/2). The light-line singularity moves off the
/// real k|| path, which is integrated directly in three sectors.
inline GreenScatter scatter_complex_frequency(const PlanarGeometry& g, cd Omega,
                                              const GreensOptions& opt = {}) {
  if (!(Omega.real() > 0.0) || Omega.imag() < 0.0)
    throw std::domain_error(
        "scatter_complex_frequency: need Re Omega > 0 and Im Omega >= 0");
  if (Omega.imag() <= 1e-14 * Omega.real())
    return scatter_real_axis(g, Omega.real(), opt);
  if (is_vacuum(g.material)) return GreenScatter{};

  const double c = constants::speed_of_light;
  const double z = g.z;
  const cd w2 = Omega * Omega / (c * c);
  const double k0 = Omega.real() / c;
  const bool mirror = is_perfect_mirror(g.material);
  const cd eps =
      mirror ? cd(0.0) : detail::eps_complex_frequency(g.material, Omega);

  auto integrand = [&](double kpar) -> quad::VecC<4> {
    const cd beta = std::sqrt(w2 - kpar * kpar);
    const FresnelPair f = mirror ? FresnelPair{cd(-1.0), cd(1.0)}
                                 : detail::fresnel_from_eps(eps, w2, beta);
    const cd phase = std::exp(cd(0.0, 2.0) * beta * z);
    const cd i(0.0, 1.0);
    const cd common = i * (kpar / beta) * phase;
    const cd fxx = common * (f.rs - f.rp * beta * beta / w2);
    const cd fzz = common * 2.0 * (kpar * kpar / w2) * f.rp;
    const cd dz = cd(0.0, 2.0) * beta;
    return {fxx, fzz, dz * fxx, dz * fzz};
  };

  const double wdt = std::clamp(4.0 * Omega.imag() / Omega.real(), 1e-3, 0.5);
  auto bp = detail::oscillation_breakpoints(0.0, k0 * (1.0 - wdt),
                                            constants::pi / (4.0 * z));
  const auto Ia = quad::integrate<4>(integrand, bp, opt.quad);
  const auto Ib =
      quad::integrate<4>(integrand, k0 * (1.0 - wdt), k0 * (1.0 + wdt), opt.quad);
  const auto Ic = quad::integrate_decaying_tail<4>(
      integrand, k0 * (1.0 + wdt), 1.0 / (2.0 * z), opt.quad);

  const double pref = 1.0 / (8.0 * constants::pi);
  const bool warn = 2.0 * k0 * z > opt.oscillation_budget;
  return GreenScatter::assemble(
      pref * (Ia[0] + Ib[0] + Ic[0]), pref * (Ia[1] + Ib[1] + Ic[1]),
      pref * (Ia[2] + Ib[2] + Ic[2]), pref * (Ia[3] + Ib[3] + Ic[3]), warn);
}

}  // namespace cpforce
