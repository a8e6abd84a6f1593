#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cpforce {

// Frequency-dependent permittivity models for the half-space. All parameters
// are SI angular frequencies (rad/s); unit conversion belongs to the front end.

struct Drude {
  double plasma_frequency = 0.0;
  double relaxation_rate = 0.0;
};

struct Plasma {
  double plasma_frequency = 0.0;
};

struct LorentzOscillator {
  double strength = 0.0;   // rad^2/s^2
  double resonance = 0.0;  // rad/s
  double damping = 0.0;    // rad/s
};

struct DrudeLorentz {
  std::vector<LorentzOscillator> oscillators;
  std::optional<Drude> drude_part;
};

/// Idealized boundary with fixed reflection coefficients r_s = -1, r_p = +1.
/// It has no permittivity; callers must branch on the variant.
struct PerfectMirror {};

struct Vacuum {};

using Material = std::variant<Drude, Plasma, DrudeLorentz, PerfectMirror, Vacuum>;

namespace detail {
inline void check_nonnegative(double v, const char* name) {
  if (!(v >= 0.0))
    throw std::domain_error(std::string("material parameter ") + name +
                            " must be >= 0");
}
}  // namespace detail

inline void validate(const Material& m) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Drude>) {
          detail::check_nonnegative(v.plasma_frequency, "plasma_frequency");
          detail::check_nonnegative(v.relaxation_rate, "relaxation_rate");
        } else if constexpr (std::is_same_v<T, Plasma>) {
          detail::check_nonnegative(v.plasma_frequency, "plasma_frequency");
        } else if constexpr (std::is_same_v<T, DrudeLorentz>) {
          for (const auto& o : v.oscillators) {
            detail::check_nonnegative(o.strength, "oscillator strength");
            detail::check_nonnegative(o.resonance, "oscillator resonance");
            detail::check_nonnegative(o.damping, "oscillator damping");
          }
          if (v.drude_part) {
            detail::check_nonnegative(v.drude_part->plasma_frequency,
                                      "plasma_frequency");
            detail::check_nonnegative(v.drude_part->relaxation_rate,
                                      "relaxation_rate");
          }
        }
      },
      m);
}

inline bool is_perfect_mirror(const Material& m) {
  return std::holds_alternative<PerfectMirror>(m);
}

inline bool is_vacuum(const Material& m) {
  return std::holds_alternative<Vacuum>(m);
}

/// Permittivity on the imaginary frequency axis, ε(iξ). Real, >= 1, and
/// monotonically non-increasing in ξ for every variant.
inline double eps_imag_axis(const Material& m, double xi) {
  if (!(xi > 0.0)) throw std::domain_error("eps_imag_axis: xi must be positive");
  return std::visit(
      [xi](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Drude>) {
          return 1.0 + v.plasma_frequency * v.plasma_frequency /
                           (xi * (xi + v.relaxation_rate));
        } else if constexpr (std::is_same_v<T, Plasma>) {
          return 1.0 + v.plasma_frequency * v.plasma_frequency / (xi * xi);
        } else if constexpr (std::is_same_v<T, DrudeLorentz>) {
          double eps = 1.0;
          for (const auto& o : v.oscillators)
            eps += o.strength /
                   (o.resonance * o.resonance + xi * xi + o.damping * xi);
          if (v.drude_part)
            eps += v.drude_part->plasma_frequency * v.drude_part->plasma_frequency /
                   (xi * (xi + v.drude_part->relaxation_rate));
          return eps;
        } else if constexpr (std::is_same_v<T, Vacuum>) {
          return 1.0;
        } else {
          throw std::domain_error("perfect mirror has no permittivity");
        }
      },
      m);
}

/// Permittivity on the real frequency axis, ε(ω), complex with Im ε >= 0.
inline std::complex<double> eps_real_axis(const Material& m, double omega) {
  if (!(omega > 0.0))
    throw std::domain_error("eps_real_axis: omega must be positive");
  using cd = std::complex<double>;
  return std::visit(
      [omega](const auto& v) -> cd {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Drude>) {
          return 1.0 - v.plasma_frequency * v.plasma_frequency /
                           (omega * cd(omega, v.relaxation_rate));
        } else if constexpr (std::is_same_v<T, Plasma>) {
          return cd(1.0 - v.plasma_frequency * v.plasma_frequency /
                              (omega * omega),
                    0.0);
        } else if constexpr (std::is_same_v<T, DrudeLorentz>) {
          cd eps(1.0, 0.0);
          for (const auto& o : v.oscillators)
            eps += o.strength / cd(o.resonance * o.resonance - omega * omega,
                                   -o.damping * omega);
          if (v.drude_part)
            eps -= v.drude_part->plasma_frequency * v.drude_part->plasma_frequency /
                   (omega * cd(omega, v.drude_part->relaxation_rate));
          return eps;
        } else if constexpr (std::is_same_v<T, Vacuum>) {
          return cd(1.0, 0.0);
        } else {
          throw std::domain_error("perfect mirror has no permittivity");
        }
      },
      m);
}

/// lim_{ξ→0} ξ² ε(iξ). Nonzero only for the plasma model, whose transverse
/// response survives the static limit; this is what separates the Drude and
/// plasma zero-frequency reflection behavior.
inline double eps_xi2_static_limit(const Material& m) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Plasma>) {
          return v.plasma_frequency * v.plasma_frequency;
        } else if constexpr (std::is_same_v<T, PerfectMirror>) {
          throw std::domain_error("perfect mirror has no permittivity");
        } else {
          return 0.0;
        }
      },
      m);
}

/// ε(i0) when finite; empty when ε(iξ) diverges as ξ → 0 (Drude-type).
inline std::optional<double> eps_static(const Material& m) {
  return std::visit(
      [](const auto& v) -> std::optional<double> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Drude> || std::is_same_v<T, Plasma>) {
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, DrudeLorentz>) {
          if (v.drude_part) return std::nullopt;
          double eps = 1.0;
          for (const auto& o : v.oscillators)
            eps += o.strength / (o.resonance * o.resonance);
          return eps;
        } else if constexpr (std::is_same_v<T, Vacuum>) {
          return 1.0;
        } else {
          throw std::domain_error("perfect mirror has no permittivity");
        }
      },
      m);
}

/// Static p-polarization reflection coefficient, lim_{ξ→0} r_p(iξ, k∥).
/// Independent of k∥ for every variant: 1 when ε diverges, else (ε0−1)/(ε0+1).
inline double static_rp(const Material& m) {
  if (is_perfect_mirror(m)) return 1.0;
  const auto e0 = eps_static(m);
  if (!e0) return 1.0;
  return (*e0 - 1.0) / (*e0 + 1.0);
}

}  // namespace cpforce
