#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpforce/constants.hpp"

namespace cpforce {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
  double norm2() const { return x * x + y * y + z * z; }
  double operator[](int c) const { return c == 0 ? x : (c == 1 ? y : z); }
};

/// Internal level structure of the atom or molecule: eigenenergies E_n
/// (joules, ascending) and real transition dipole vectors d_mn = d_nm (C m).
/// In isotropic mode only the magnitudes |d_mn|² enter any observable and
/// tensors collapse to scalars × identity.
class LevelSystem {
 public:
  LevelSystem(std::vector<double> energies_joule,
              std::vector<std::vector<Vec3>> dipoles, bool isotropic,
              std::vector<std::string> labels = {})
      : energies_(std::move(energies_joule)),
        dipoles_(std::move(dipoles)),
        isotropic_(isotropic),
        labels_(std::move(labels)) {
    const int n = static_cast<int>(energies_.size());
    if (n < 2) throw std::invalid_argument("LevelSystem: need at least 2 levels");
    if (static_cast<int>(dipoles_.size()) != n)
      throw std::invalid_argument("LevelSystem: dipole matrix size mismatch");
    for (const auto& row : dipoles_)
      if (static_cast<int>(row.size()) != n)
        throw std::invalid_argument("LevelSystem: dipole matrix not square");
    double scale = 0.0;
    for (double e : energies_) scale = std::max(scale, std::abs(e));
    for (int i = 0; i + 1 < n; ++i) {
      if (energies_[i + 1] < energies_[i])
        throw std::invalid_argument("LevelSystem: energies must be ascending");
      if (energies_[i + 1] - energies_[i] <= 1e-12 * scale)
        throw std::invalid_argument(
            "LevelSystem: degenerate levels are not supported (" +
            std::to_string(i) + ", " + std::to_string(i + 1) + ")");
    }
    // symmetrize from the upper triangle; real dipoles assumed
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) dipoles_[j][i] = dipoles_[i][j];
    if (labels_.empty())
      for (int i = 0; i < n; ++i) labels_.push_back("level" + std::to_string(i));
  }

  /// Isotropic system specified by dipole magnitudes only.
  static LevelSystem isotropic_from_magnitudes(
      std::vector<double> energies_joule,
      const std::vector<std::vector<double>>& magnitudes,
      std::vector<std::string> labels = {}) {
    std::vector<std::vector<Vec3>> d(magnitudes.size());
    for (std::size_t i = 0; i < magnitudes.size(); ++i) {
      d[i].resize(magnitudes[i].size());
      for (std::size_t j = 0; j < magnitudes[i].size(); ++j)
        d[i][j] = Vec3{magnitudes[i][j], 0.0, 0.0};
    }
    return LevelSystem(std::move(energies_joule), std::move(d), true,
                       std::move(labels));
  }

  int size() const { return static_cast<int>(energies_.size()); }
  double energy(int n) const { return energies_.at(n); }
  const std::vector<double>& energies() const { return energies_; }
  const std::string& label(int n) const { return labels_.at(n); }
  bool isotropic() const { return isotropic_; }

  /// Bare transition frequency ω_mn = (E_m − E_n)/ħ; either sign.
  double omega(int m, int n) const {
    return (energies_.at(m) - energies_.at(n)) / constants::hbar;
  }

  const Vec3& dipole(int m, int n) const { return dipoles_.at(m).at(n); }
  double dipole_sq(int m, int n) const { return dipoles_.at(m).at(n).norm2(); }

  /// Cartesian weight of the (m,n) transition against a diagonal tensor:
  /// |d|²/3 per axis in isotropic mode, d_c² otherwise.
  double axis_weight(int m, int n, int c) const {
    if (isotropic_) return dipole_sq(m, n) / 3.0;
    const double dc = dipoles_[m][n][c];
    return dc * dc;
  }

 private:
  std::vector<double> energies_;
  std::vector<std::vector<Vec3>> dipoles_;
  bool isotropic_;
  std::vector<std::string> labels_;
};

/// Surface-dressed level data: frequency shifts δω_n, loss/heating rates
/// Γ_nk with totals Γ_n, and the transition frequencies ω̃_mn actually used
/// by rates, resonant terms and polarizabilities. In the default
/// perturbative mode ω̃_mn equals the bare ω_mn; the optional one-pass
/// refinement folds the computed shifts back in.
struct DressedLevels {
  std::vector<double> shifts;                   // δω_n, rad/s (surface part)
  std::vector<std::vector<double>> rates;       // Γ_nk, 1/s; zero diagonal
  std::vector<double> total_rates;              // Γ_n = Σ_k Γ_nk
  std::vector<std::vector<double>> omega_tilde; // ω̃_mn, rad/s

  int size() const { return static_cast<int>(shifts.size()); }
  double gamma(int n, int k) const { return rates.at(n).at(k); }
  double gamma_total(int n) const { return total_rates.at(n); }
  double omega(int m, int n) const { return omega_tilde.at(m).at(n); }
  /// Shifted energy Ẽ_n = E_n + ħ δω_n.
  double shifted_energy(const LevelSystem& ls, int n) const {
    return ls.energy(n) + constants::hbar * shifts.at(n);
  }

  /// Γ-free, shift-free dressing (bare frequencies everywhere); the Γ → 0
  /// limit used by perturbative polarizabilities.
  static DressedLevels bare(const LevelSystem& ls) {
    const int n = ls.size();
    DressedLevels d;
    d.shifts.assign(n, 0.0);
    d.rates.assign(n, std::vector<double>(n, 0.0));
    d.total_rates.assign(n, 0.0);
    d.omega_tilde.assign(n, std::vector<double>(n, 0.0));
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k) d.omega_tilde[m][k] = ls.omega(m, k);
    return d;
  }
};

}  // namespace cpforce
