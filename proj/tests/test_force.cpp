#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cpforce/force.hpp"
#include "support/oracles.hpp"

using namespace cpforce;
using Catch::Approx;

namespace {

const Material kGold = Drude{1.37e16, 4.06e13};

LevelSystem two_level(double omega10, double dipole) {
  return LevelSystem::isotropic_from_magnitudes(
      {0.0, constants::hbar * omega10},
      {{0.0, dipole}, {dipole, 0.0}}, {"g", "e"});
}

const double kRbOmega = 2.37e15;
const double kRbDipole = 2.5e-29;
const double kRotOmega = 1.32e11;
const double kRotDipole = 1.0e-29;

double alpha_static(const LevelSystem& ls) {
  return alpha_imag_axis_scalar(ls, DressedLevels::bare(ls), 0)(0.0);
}

}  // namespace

TEST_CASE("zero polarizability gives zero force") {
  const PlanarGeometry g(1e-6, kGold);
  auto zero = [](double) { return 0.0; };
  CHECK(force_macroscopic(zero, g, Temperature(300.0)).newtons == 0.0);
  CHECK(force_zero_temperature(zero, g) == 0.0);
}

TEST_CASE("perfect-mirror retarded asymptote") {
  const LevelSystem ls = two_level(kRbOmega, kRbDipole);
  const double lambda10 = constants::speed_of_light / kRbOmega;
  const double z = 100.0 * lambda10;
  const PlanarGeometry g(z, PerfectMirror{});
  const auto alpha = alpha_imag_axis_scalar(ls, DressedLevels::bare(ls), 0);

  const double f = force_zero_temperature(alpha, g);
  const double ref = oracles::mirror_retarded_force(alpha_static(ls), z);
  CHECK(f == Approx(ref).epsilon(0.01));
  CHECK(f < 0.0);  // attractive
}

TEST_CASE("replacement rule: Matsubara sum approaches the integral") {
  const LevelSystem ls = two_level(kRbOmega, kRbDipole);
  const PlanarGeometry g(1e-6, PerfectMirror{});
  const auto alpha = alpha_imag_axis_scalar(ls, DressedLevels::bare(ls), 0);

  const double cold = force_macroscopic(alpha, g, Temperature(1.0)).newtons;
  const double zero = force_zero_temperature(alpha, g);
  CHECK(std::abs(cold - zero) <= 1e-3 * std::abs(zero));
}

TEST_CASE("ground-state breakdown identities") {
  const LevelSystem ls = two_level(kRotOmega, kRotDipole);
  const PlanarGeometry g(5e-6, kGold);
  const Temperature T(300.0);
  const DressedLevels bare = DressedLevels::bare(ls);
  const auto alpha0 = alpha_imag_axis_scalar(ls, bare, 0);

  const ForceBreakdown ground = force_state_perturbative(ls, bare, g, T, 0);
  CHECK(ground.total == ground.nonresonant + ground.resonant_emission +
                            ground.resonant_absorption);
  CHECK(ground.resonant_emission == 0.0);  // no downward transition from 0
  CHECK(ground.resonant_absorption != 0.0);

  // the deviation from the macroscopic result is exactly the absorption term
  const double macro = force_macroscopic(alpha0, g, T).newtons;
  CHECK(ground.nonresonant == Approx(macro).epsilon(1e-12));
  CHECK(ground.total - macro ==
        Approx(ground.resonant_absorption).epsilon(1e-12));

  // at T = 0 every resonant part of the ground state vanishes
  const ForceBreakdown cold =
      force_state_perturbative(ls, bare, g, Temperature(0.0), 0);
  CHECK(cold.resonant_emission == 0.0);
  CHECK(cold.resonant_absorption == 0.0);
}

TEST_CASE("equilibrium: cancellation, thermal polarizability, r_T") {
  const LevelSystem ls = two_level(kRotOmega, kRotDipole);
  const PlanarGeometry g(5e-6, kGold);
  const Temperature T(300.0);
  const DressedLevels dressed = dress(ls, g, T);
  const DressedLevels bare = DressedLevels::bare(ls);

  const ForceBreakdown f0 = force_state_perturbative(ls, dressed, g, T, 0);
  const ForceBreakdown f1 = force_state_perturbative(ls, dressed, g, T, 1);
  const std::vector<double> pop = thermal_state(ls, dressed, T);

  // resonant force components cancel in the thermal state
  const double resonant_sum =
      pop[0] * (f0.resonant_emission + f0.resonant_absorption) +
      pop[1] * (f1.resonant_emission + f1.resonant_absorption);
  const double largest =
      std::max({std::abs(f0.resonant_absorption),
                std::abs(f1.resonant_emission),
                std::abs(f1.resonant_absorption)});
  CHECK(std::abs(resonant_sum) <= 1e-6 * largest);

  // the equilibrium force equals the macroscopic one with alpha_T ...
  InternalState eq;
  eq.populations = pop;
  const double f_eq = force_total(ls, dressed, g, T, {eq})[0];
  auto alpha_t = [&](double xi) {
    return pop[0] * alpha_imag_axis_scalar(ls, bare, 0)(xi) +
           pop[1] * alpha_imag_axis_scalar(ls, bare, 1)(xi);
  };
  const double macro_t = force_macroscopic(alpha_t, g, T).newtons;
  CHECK(f_eq == Approx(macro_t).epsilon(1e-6));

  // ... and is the ground-state macroscopic force reduced by r_T
  const double macro_0 =
      force_macroscopic(alpha_imag_axis_scalar(ls, bare, 0), g, T).newtons;
  CHECK(f_eq / macro_0 ==
        Approx(thermal_reduction_ratio(kRotOmega, T)).epsilon(1e-4));
}

TEST_CASE("nonperturbative force reduces to the perturbative one") {
  const LevelSystem ls = two_level(kRotOmega, kRotDipole);
  const PlanarGeometry g(5e-6, kGold);
  const Temperature T(300.0);
  const DressedLevels bare = DressedLevels::bare(ls);

  for (int n : {0, 1}) {
    const ForceBreakdown pert = force_state_perturbative(ls, bare, g, T, n);
    const ForceBreakdown exact = force_state_exact(ls, bare, g, T, n);
    CHECK(exact.total == Approx(pert.total).epsilon(1e-8));
    CHECK_FALSE(exact.validity_warning);
  }
}

TEST_CASE("symmetrized polarizability combination is real on the imaginary axis") {
  const LevelSystem ls = two_level(kRotOmega, kRotDipole);
  DressedLevels d = DressedLevels::bare(ls);
  d.total_rates = {1e4, 2e5};
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> logxi(9.0, 13.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double xi = std::pow(10.0, logxi(rng));
    const cd sum = polarizability(ls, d, 0, cd(0.0, xi)).scalar() +
                   polarizability(ls, d, 0, cd(0.0, -xi)).scalar();
    CHECK(std::abs(sum.imag()) <= 1e-12 * std::abs(sum.real()));
  }
}

TEST_CASE("nonperturbative departure is linear in the rates") {
  const LevelSystem ls = two_level(kRotOmega, kRotDipole);
  const PlanarGeometry g(5e-6, kGold);
  const Temperature T(300.0);
  ForceOptions opt;
  opt.rel_tol = 1e-10;

  const double f_pert =
      force_state_perturbative(ls, DressedLevels::bare(ls), g, T, 0, opt).total;

  std::vector<double> gammas, departures;
  for (double ratio : {1e-6, 1e-5, 1e-4}) {
    DressedLevels d = DressedLevels::bare(ls);
    d.total_rates = {0.0, ratio * kRotOmega};
    const double f = force_state_exact(ls, d, g, T, 0, opt).total;
    gammas.push_back(ratio * kRotOmega);
    departures.push_back(std::abs(f - f_pert));
  }
  // log-log slope over two decades should be 1 (linear in Gamma)
  const double slope = std::log(departures.back() / departures.front()) /
                       std::log(gammas.back() / gammas.front());
  CHECK(slope == Approx(1.0).margin(0.1));

  // weak-coupling validity flag
  DressedLevels strong = DressedLevels::bare(ls);
  strong.total_rates = {0.0, 0.5 * kRotOmega};
  CHECK(force_state_exact(ls, strong, g, T, 0, opt).validity_warning);
}

TEST_CASE("time-dependent force interpolates between state forces") {
  const LevelSystem ls = two_level(kRotOmega, kRotDipole);
  const PlanarGeometry g(5e-6, kGold);
  const Temperature T(300.0);
  const DressedLevels dressed = dress(ls, g, T);

  InternalState init;
  init.populations = {1.0, 0.0};
  const double lam = dressed.gamma_total(0) + dressed.gamma_total(1);
  std::vector<double> grid;
  for (int i = 0; i <= 24; ++i) grid.push_back(i * 0.4 / lam);
  const auto states = evolve(init, dressed, grid);
  const auto force = force_total(ls, dressed, g, T, states);

  // starts at the ground-state force
  const double f_ground = force_state_perturbative(ls, dressed, g, T, 0).total;
  CHECK(force.front() == Approx(f_ground).epsilon(1e-12));

  // approaches the equilibrium force monotonically
  InternalState eq;
  eq.populations = thermal_state(ls, dressed, T);
  const double f_eq = force_total(ls, dressed, g, T, {eq})[0];
  double prev = HUGE_VAL;
  for (double f : force) {
    const double dist = std::abs(f - f_eq);
    CHECK(dist <= prev * (1.0 + 1e-12));
    prev = dist;
  }
  CHECK(std::abs(force.back() - f_eq) < 1e-4 * std::abs(f_eq));
}

TEST_CASE("shift/force duality via finite differences") {
  const LevelSystem ls = two_level(kRotOmega, kRotDipole);
  const Temperature T(300.0);
  DressingOptions dopt;
  dopt.matsubara_rel_tol = 1e-10;
  ForceOptions fopt;
  fopt.rel_tol = 1e-10;
  const auto bare_omega = DressedLevels::bare(ls).omega_tilde;

  for (double z : {2e-6, 5e-6}) {
    const double h = z * 1e-3;
    for (int state : {0, 1}) {
      const double up =
          shift_vector(ls, PlanarGeometry(z + h, kGold), T, bare_omega,
                       dopt)[state];
      const double dn =
          shift_vector(ls, PlanarGeometry(z - h, kGold), T, bare_omega,
                       dopt)[state];
      const double fd_force = -constants::hbar * (up - dn) / (2.0 * h);
      const double force =
          force_state_perturbative(ls, DressedLevels::bare(ls),
                                   PlanarGeometry(z, kGold), T, state, fopt)
              .total;
      CHECK(fd_force == Approx(force).epsilon(1e-5));
    }
  }
}

TEST_CASE("plate pressure basics") {
  const Temperature T(300.0);
  CHECK(plate_pressure(Vacuum{}, kGold, 1e-6, T).pascals == 0.0);

  // ideal mirrors at low temperature approach the zero-temperature law
  const double d = 1e-6;
  const PlatePressure p =
      plate_pressure(PerfectMirror{}, PerfectMirror{}, d, Temperature(1.0));
  CHECK(p.pascals == Approx(oracles::ideal_plate_pressure(d)).epsilon(5e-3));

  // attraction weakens with separation
  double prev = 0.0;
  for (double dist : {0.5e-6, 1e-6, 2e-6}) {
    const double mag =
        std::abs(plate_pressure(kGold, kGold, dist, T).pascals);
    if (prev > 0.0) CHECK(mag < prev);
    prev = mag;
  }
}

TEST_CASE("dilute-gas oracle agrees with the macroscopic force") {
  const LevelSystem ls = two_level(kRbOmega, kRbDipole);
  const PlanarGeometry g(1e-6, kGold);
  const Temperature T(300.0);
  const DiluteGasCheck check = dilute_gas_check(ls, g, T, 1e20);
  CHECK(check.deviation <= 5e-3);
  CHECK(check.per_atom_force < 0.0);
  CHECK_FALSE(check.nonlinearity_warning);

  CHECK_THROWS_AS(dilute_gas_check(ls, g, T, 1e30), std::domain_error);
}

TEST_CASE("vacuum geometry gives exactly zero force") {
  const LevelSystem ls = two_level(kRotOmega, kRotDipole);
  const PlanarGeometry g(1e-6, Vacuum{});
  const Temperature T(300.0);
  const DressedLevels bare = DressedLevels::bare(ls);
  CHECK(force_macroscopic(alpha_imag_axis_scalar(ls, bare, 0), g, T).newtons ==
        0.0);
  const ForceBreakdown f = force_state_exact(ls, bare, g, T, 0);
  CHECK(f.total == 0.0);
}

TEST_CASE("orientation average equals the isotropic force") {
  const double w = 1.32e11, d = 1.0e-29;
  const double e1 = constants::hbar * w;
  auto oriented = [&](int axis) {
    Vec3 v{};
    if (axis == 0) v.x = d;
    if (axis == 1) v.y = d;
    if (axis == 2) v.z = d;
    return LevelSystem({0.0, e1}, {{Vec3{}, v}, {v, Vec3{}}}, false);
  };
  const LevelSystem iso = two_level(w, d);
  const PlanarGeometry g(5e-6, kGold);
  const Temperature T(300.0);

  double sum = 0.0;
  for (int axis : {0, 1, 2}) {
    const LevelSystem ls = oriented(axis);
    sum += force_state_perturbative(ls, DressedLevels::bare(ls), g, T, 0).total;
  }
  const double fiso =
      force_state_perturbative(iso, DressedLevels::bare(iso), g, T, 0).total;
  CHECK(fiso == Approx(sum / 3.0).epsilon(1e-10));
}

TEST_CASE("matsubara truncation failure carries the partial result") {
  const LevelSystem ls = two_level(kRbOmega, kRbDipole);
  const PlanarGeometry g(1e-6, PerfectMirror{});
  ForceOptions opt;
  opt.max_terms = 2;  // far too few at 1 K
  try {
    force_macroscopic(alpha_imag_axis_scalar(ls, DressedLevels::bare(ls), 0),
                      g, Temperature(1.0), opt);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.operation() == "force_macroscopic");
    CHECK(e.partial_result() != 0.0);
  }
}

TEST_CASE("zero-frequency term separates the Drude and plasma models") {
  // far separation at room temperature: only the N = 0 term survives.
  // The Drude response loses its s channel there, the plasma model keeps it
  // with r_s -> -1 for omega_p d / c >> 1, doubling the pressure.
  const Temperature T(300.0);
  const double d = 3e-5;
  const double p_drude = plate_pressure(kGold, kGold, d, T).pascals;
  const double p_plasma =
      plate_pressure(Plasma{1.37e16}, Plasma{1.37e16}, d, T).pascals;
  CHECK(p_plasma / p_drude == Approx(2.0).epsilon(0.01));

  // and the Drude value is the classic zeta(3) law
  const double zeta3 = 1.2020569031595943;
  const double expected = -constants::k_boltzmann * 300.0 * zeta3 /
                          (8.0 * constants::pi * d * d * d);
  CHECK(p_drude == Approx(expected).epsilon(1e-3));
}

TEST_CASE("dilute deviation is linear in density until extrapolated away") {
  const LevelSystem ls = two_level(kRbOmega, kRbDipole);
  const PlanarGeometry g(1e-6, kGold);
  const Temperature T(300.0);
  ForceOptions opt;
  opt.rel_tol = 1e-12;
  opt.greens.quad.rel_tol = 1e-13;
  const auto alpha0 = alpha_imag_axis_scalar(ls, DressedLevels::bare(ls), 0);
  const double f_ref = force_macroscopic(alpha0, g, T, opt).newtons;

  auto per_atom = [&](double eta) {
    DrudeLorentz dl;
    dl.oscillators.push_back(
        {eta * 2.0 * kRbDipole * kRbDipole * kRbOmega /
             (3.0 * constants::hbar * constants::vacuum_permittivity),
         kRbOmega, 0.0});
    return -plate_pressure(Material(dl), g.material, g.z, T, opt)
                .gradient_pa_per_m /
           eta;
  };

  const double eta = 5e21;  // the largest density the precondition admits
  const double d1 = per_atom(eta) - f_ref;
  const double d2 = per_atom(0.5 * eta) - f_ref;
  CHECK(d1 / d2 == Approx(2.0).epsilon(0.01));  // leading error linear in eta

  // Richardson extrapolation removes that leading term almost entirely
  const double extrapolated = 2.0 * (d2 + f_ref) - (d1 + f_ref);
  CHECK(std::abs(extrapolated - f_ref) < 0.05 * std::abs(d1));
}

TEST_CASE("rate-equation steady state equals the thermal state") {
  const LevelSystem ls = LevelSystem::isotropic_from_magnitudes(
      {0.0, 1.392034798440e-23, 3.2e-23},
      {{0.0, 1.0e-29, 4e-30}, {0, 0, 7e-30}, {0, 0, 0}});
  const PlanarGeometry g(5e-6, kGold);
  const Temperature T(300.0);
  const DressedLevels dressed = dress(ls, g, T);

  const auto ss = steady_state(dressed);
  const auto boltz = thermal_state(ls, dressed, T);
  for (int n = 0; n < ls.size(); ++n)
    CHECK(std::abs(ss[n] - boltz[n]) <= 1e-8);
}

TEST_CASE("force agrees with an independent image-potential quadrature") {
  // Full second route for the perfect mirror: the closed-form image tensor,
  // integrated with a plain Simpson rule in test code, differentiated there.
  const LevelSystem ls = two_level(kRbOmega, kRbDipole);
  const auto alpha = alpha_imag_axis_scalar(ls, DressedLevels::bare(ls), 0);
  const double z = 3.0 * constants::speed_of_light / kRbOmega;

  const double scale = constants::speed_of_light / (2.0 * z);
  const int n_panels = 6000;
  const double t_max = 60.0;
  const double dt = t_max / n_panels;
  auto integrand = [&](double t) {
    if (t == 0.0) {
      // finite limit: xi^2 d(Tr)/dz -> 3c^2/(8 pi z^4) for the mirror image
      const double c2 = constants::speed_of_light * constants::speed_of_light;
      return alpha(0.0) * 3.0 * c2 /
             (8.0 * constants::pi * z * z * z * z) * scale;
    }
    const double xi = scale * t;
    return xi * xi * alpha(xi) *
           oracles::mirror_imag_axis(xi, z).d_trace_dz().real() * scale;
  };
  double simpson = integrand(0.0) + integrand(t_max);
  for (int i = 1; i < n_panels; ++i)
    simpson += integrand(i * dt) * (i % 2 ? 4.0 : 2.0);
  simpson *= dt / 3.0;
  const double f_oracle = -constants::vacuum_permeability * constants::hbar /
                          (2.0 * constants::pi) * simpson;

  const double f = force_zero_temperature(
      alpha, PlanarGeometry(z, PerfectMirror{}));
  CHECK(f == Approx(f_oracle).epsilon(1e-5));
}

TEST_CASE("three-level equilibrium identities") {
  // middle level carries both emission and absorption branches
  const double w1 = 1.32e11, w2 = 2.9e11;
  const LevelSystem ls = LevelSystem::isotropic_from_magnitudes(
      {0.0, constants::hbar * w1, constants::hbar * w2},
      {{0.0, 1.0e-29, 6.0e-30}, {0, 0, 8.0e-30}, {0, 0, 0}});
  const PlanarGeometry g(5e-6, kGold);
  const Temperature T(300.0);
  const DressedLevels dressed = dress(ls, g, T);
  const DressedLevels bare = DressedLevels::bare(ls);
  const std::vector<double> pop = thermal_state(ls, dressed, T);

  double weighted_resonant = 0.0, largest = 0.0, f_eq = 0.0;
  for (int n = 0; n < 3; ++n) {
    const ForceBreakdown f = force_state_perturbative(ls, dressed, g, T, n);
    weighted_resonant +=
        pop[n] * (f.resonant_emission + f.resonant_absorption);
    largest = std::max({largest, std::abs(f.resonant_emission),
                        std::abs(f.resonant_absorption)});
    f_eq += pop[n] * f.total;
  }
  CHECK(std::abs(weighted_resonant) <= 1e-6 * largest);

  auto alpha_t = [&](double xi) {
    double a = 0.0;
    for (int n = 0; n < 3; ++n)
      a += pop[n] * alpha_imag_axis_scalar(ls, bare, n)(xi);
    return a;
  };
  const double macro_t = force_macroscopic(alpha_t, g, T).newtons;
  CHECK(f_eq == Approx(macro_t).epsilon(1e-6));
}

TEST_CASE("dark atom: dilute check returns zero on both routes") {
  const LevelSystem dark = LevelSystem::isotropic_from_magnitudes(
      {0.0, constants::hbar * kRotOmega}, {{0.0, 0.0}, {0.0, 0.0}});
  const PlanarGeometry g(1e-6, kGold);
  const DiluteGasCheck check =
      dilute_gas_check(dark, g, Temperature(300.0), 1e20);
  CHECK(check.reference_force == 0.0);
  CHECK(check.per_atom_force == 0.0);
  CHECK(check.deviation == 0.0);
}

TEST_CASE("resonant cancellation holds for anisotropic dipoles") {
  const double w1 = 1.32e11, w2 = 3.1e11;
  std::vector<std::vector<Vec3>> d(3, std::vector<Vec3>(3));
  d[0][1] = Vec3{4e-30, 0.0, 8e-30};
  d[0][2] = Vec3{0.0, 5e-30, 2e-30};
  d[1][2] = Vec3{6e-30, 1e-30, 3e-30};
  const LevelSystem ls({0.0, constants::hbar * w1, constants::hbar * w2},
                       std::move(d), false);
  const PlanarGeometry g(5e-6, kGold);
  const Temperature T(300.0);
  const DressedLevels dressed = dress(ls, g, T);
  const std::vector<double> pop = thermal_state(ls, dressed, T);

  double weighted = 0.0, largest = 0.0;
  for (int n = 0; n < 3; ++n) {
    const ForceBreakdown f = force_state_perturbative(ls, dressed, g, T, n);
    weighted += pop[n] * (f.resonant_emission + f.resonant_absorption);
    largest = std::max({largest, std::abs(f.resonant_emission),
                        std::abs(f.resonant_absorption)});
  }
  CHECK(std::abs(weighted) <= 1e-6 * largest);
}

TEST_CASE("nonperturbative force at zero temperature with finite rates") {
  const LevelSystem ls = two_level(kRotOmega, kRotDipole);
  DressedLevels d = DressedLevels::bare(ls);
  d.total_rates = {0.0, 1e-5 * kRotOmega};
  const PlanarGeometry g(5e-6, kGold);
  const ForceBreakdown f = force_state_exact(ls, d, g, Temperature(0.0), 1);
  CHECK(f.resonant_absorption == 0.0);  // no thermal photons at T = 0
  CHECK(f.resonant_emission != 0.0);    // spontaneous emission survives
  CHECK(std::isfinite(f.total));
}
