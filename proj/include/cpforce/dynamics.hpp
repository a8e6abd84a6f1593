#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "cpforce/errors.hpp"
#include "cpforce/level_system.hpp"

namespace cpforce {

/// Internal state at one instant: populations σ_nn plus optional coherence
/// magnitudes |σ_mn| (phases never enter the force and are not tracked).
struct InternalState {
  double time = 0.0;
  std::vector<double> populations;
  std::optional<std::vector<std::vector<double>>> offdiag_magnitudes;
};

namespace detail {

inline Eigen::MatrixXd rate_generator(const DressedLevels& d) {
  const int n = d.size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    M(i, i) = -d.gamma_total(i);
    for (int k = 0; k < n; ++k)
      if (k != i) M(i, k) = d.gamma(k, i);  // gain into i from k
  }
  return M;
}

inline double max_rate(const DressedLevels& d) {
  double g = 0.0;
  for (double t : d.total_rates) g = std::max(g, t);
  return g;
}

// Undirected connectivity components over nonzero rates.
inline std::vector<std::vector<int>> rate_components(const DressedLevels& d) {
  const int n = d.size();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (int seed = 0; seed < n; ++seed) {
    if (comp[seed] >= 0) continue;
    std::vector<int> stack{seed}, members;
    comp[seed] = static_cast<int>(out.size());
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      members.push_back(i);
      for (int k = 0; k < n; ++k)
        if (comp[k] < 0 && (d.gamma(i, k) > 0.0 || d.gamma(k, i) > 0.0)) {
          comp[k] = comp[i];
          stack.push_back(k);
        }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

}  // namespace detail

/// Populations solve σ̇_nn = −Γ_n σ_nn + Σ_k Γ_kn σ_kk; the solution is the
/// matrix exponential through an eigendecomposition of the rate generator,
/// exact under the huge stiffness ratios of mixed electronic/rotational
/// rates. Off-diagonal magnitudes decay as e^{−(Γ_m+Γ_n)(t−t₀)/2}.
inline std::vector<InternalState> evolve(const InternalState& initial,
                                         const DressedLevels& d,
                                         const std::vector<double>& t_grid) {
  const int n = d.size();
  if (static_cast<int>(initial.populations.size()) != n)
    throw ModelError("evolve: population vector size mismatch");
  double psum = 0.0;
  for (double p : initial.populations) {
    if (p < 0.0) throw ModelError("evolve: negative population");
    psum += p;
  }
  if (std::abs(psum - 1.0) > 1e-9)
    throw ModelError("evolve: populations must sum to 1");
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
    if (t_grid[i + 1] < t_grid[i])
      throw ModelError("evolve: time grid must be ascending");
  if (!t_grid.empty() && t_grid.front() < initial.time)
    throw ModelError("evolve: grid starts before the initial time");

  const Eigen::MatrixXd M = detail::rate_generator(d);
  const double gmax = detail::max_rate(d);
  const double tol = 1e-10 * std::max(gmax, 1e-300);

  Eigen::EigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success)
    throw ModelError("evolve: eigendecomposition failed");
  const Eigen::VectorXcd lam = es.eigenvalues();
  for (int i = 0; i < n; ++i) {
    if (lam(i).real() > tol)
      throw ModelError("evolve: rate matrix has a positive eigenvalue");
    if (std::abs(lam(i).imag()) > std::max(tol, 1e-8 * std::abs(lam(i).real())))
      throw ModelError("evolve: rate matrix has a non-real eigenvalue");
  }
  const Eigen::MatrixXcd V = es.eigenvectors();
  Eigen::VectorXcd sigma0(n);
  for (int i = 0; i < n; ++i) sigma0(i) = initial.populations[i];
  const Eigen::VectorXcd coeff = V.partialPivLu().solve(sigma0);

  std::vector<InternalState> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    const double dt = t - initial.time;
    if (dt == 0.0) {
      InternalState s = initial;
      s.time = t;
      out.push_back(std::move(s));
      continue;
    }
    Eigen::VectorXcd scaled = coeff;
    for (int i = 0; i < n; ++i) scaled(i) *= std::exp(lam(i) * dt);
    const Eigen::VectorXcd sig = V * scaled;
    InternalState s;
    s.time = t;
    s.populations.resize(n);
    for (int i = 0; i < n; ++i) s.populations[i] = std::max(0.0, sig(i).real());
    if (initial.offdiag_magnitudes) {
      auto od = *initial.offdiag_magnitudes;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (a != b)
            od[a][b] *= std::exp(-0.5 * (d.gamma_total(a) + d.gamma_total(b)) * dt);
      s.offdiag_magnitudes = std::move(od);
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Long-time populations: the normalized null vector of the rate generator.
/// Unique only when the level graph is connected under the nonzero rates.
inline std::vector<double> steady_state(const DressedLevels& d) {
  const auto comps = detail::rate_components(d);
  if (comps.size() > 1) throw MultipleSteadyStatesError(comps);

  const int n = d.size();
  const Eigen::MatrixXd M = detail::rate_generator(d);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  lu.setThreshold(1e-12);
  const Eigen::MatrixXd kernel = lu.kernel();
  if (kernel.cols() != 1)
    throw ModelError("steady_state: rate matrix kernel is not one-dimensional");

  std::vector<double> pop(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += kernel(i, 0);
  if (sum == 0.0) throw ModelError("steady_state: degenerate kernel");
  for (int i = 0; i < n; ++i) {
    pop[i] = kernel(i, 0) / sum;
    if (pop[i] < -1e-12)
      throw ModelError("steady_state: kernel is not a population vector");
    pop[i] = std::max(0.0, pop[i]);
  }
  return pop;
}

}  // namespace cpforce
