// Batch front end: loads a scenario config, runs the selected computation and
// writes CSV tables (plus a short report on stdout for the comparison modes).
//
// Exit codes: 0 success, 2 config error, 3 convergence failure, 4 unwritable
// output.

#include <atomic>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cpforce/cpforce.hpp"

namespace {

using namespace cpforce;

struct RunOptions {
  std::string config_path;
  std::string out_dir;  // empty = use the scenario's output block
  double tol = 0.0;     // 0 = keep scenario tolerances
  int threads = 1;
};

ForceOptions force_options(const Scenario& s) {
  ForceOptions opt;
  opt.rel_tol = s.matsubara_rel_tol;
  opt.greens.quad.rel_tol = s.quadrature_rel_tol;
  return opt;
}

DressingOptions dressing_options(const Scenario& s) {
  DressingOptions opt;
  opt.mode = s.self_consistent_shifts ? ShiftMode::one_pass
                                      : ShiftMode::perturbative;
  opt.matsubara_rel_tol = s.matsubara_rel_tol;
  opt.greens.quad.rel_tol = s.quadrature_rel_tol;
  return opt;
}

/// Runs fn(i) for i in [0, n) on the requested number of threads; slot-indexed
/// results keep the output independent of the scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  threads = std::max(1, threads);
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string out_path(const RunOptions& run, const std::string& file) {
  std::error_code ec;
  std::filesystem::create_directories(run.out_dir, ec);
  if (ec)
    throw CsvWriteError("cannot create output directory " + run.out_dir +
                        ": " + ec.message());
  return (std::filesystem::path(run.out_dir) / file).string();
}

constexpr const char* kSignNote =
    "forces in newtons, z-component; attraction toward the surface is negative";

void run_force_vs_distance(const Scenario& s, const RunOptions& run) {
  const ForceOptions fopt = force_options(s);
  const DressingOptions dopt = dressing_options(s);
  const int nz = static_cast<int>(s.z_grid.size());
  std::vector<std::vector<double>> rows(nz);

  parallel_for(nz, run.threads, [&](std::size_t i) {
    const PlanarGeometry g(s.z_grid[i], s.material);
    const DressedLevels dressed = dress(s.atom, g, s.temperature, dopt);
    const DressedLevels bare = DressedLevels::bare(s.atom);
    const auto alpha0 = alpha_imag_axis_scalar(s.atom, bare, 0);
    const std::vector<double> pop = thermal_state(s.atom, dressed, s.temperature);
    auto alpha_thermal = [&](double xi) {
      double a = 0.0;
      for (int n = 0; n < s.atom.size(); ++n)
        a += pop[n] * alpha_imag_axis_scalar(s.atom, bare, n)(xi);
      return a;
    };
    const double f0 = force_macroscopic(alpha0, g, s.temperature, fopt).newtons;
    const double ft =
        force_macroscopic(alpha_thermal, g, s.temperature, fopt).newtons;
    const ForceBreakdown ground =
        force_state_exact(s.atom, dressed, g, s.temperature, 0, fopt);
    rows[i] = {s.z_grid[i],        f0,
               ft,                 ground.nonresonant,
               ground.resonant_emission, ground.resonant_absorption,
               ground.total};
  });

  emit_csv(out_path(run, "force_vs_distance.csv"),
           std::string("z in meters; ") + kSignNote,
           {"z_m", "F_macroscopic_alpha0_N", "F_macroscopic_alphaT_N",
            "F_ground_nonresonant_N", "F_ground_resonant_emission_N",
            "F_ground_resonant_absorption_N", "F_ground_total_N"},
           rows);
}

void run_dynamics(const Scenario& s, const RunOptions& run) {
  if (!s.time_grid)
    throw ConfigError("dynamics needs a time_grid_s block", "time_grid_s");
  const PlanarGeometry g(s.z_grid.front(), s.material);
  const DressedLevels dressed =
      dress(s.atom, g, s.temperature, dressing_options(s));

  InternalState initial;
  initial.time = 0.0;
  initial.populations.assign(s.atom.size(), 0.0);
  initial.populations[0] = 1.0;

  const std::vector<InternalState> states =
      evolve(initial, dressed, *s.time_grid);
  const std::vector<double> force = force_total(
      s.atom, dressed, g, s.temperature, states,
      StateForceVariant::perturbative, force_options(s));

  std::vector<std::string> header{"t_s"};
  for (int n = 0; n < s.atom.size(); ++n)
    header.push_back("pop_" + s.atom.label(n));
  header.push_back("F_total_N");
  std::vector<std::vector<double>> rows(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    rows[i].push_back(states[i].time);
    for (double p : states[i].populations) rows[i].push_back(p);
    rows[i].push_back(force[i]);
  }
  emit_csv(out_path(run, "dynamics.csv"),
           std::string("t in seconds; populations dimensionless; ") + kSignNote,
           header, rows);
}

void run_ratio(const Scenario& s, const RunOptions& run) {
  std::vector<std::vector<double>> rows;
  for (int upper = 1; upper < s.atom.size(); ++upper)
    for (int lower = 0; lower < upper; ++lower) {
      const double w = s.atom.omega(upper, lower);
      rows.push_back({static_cast<double>(upper), static_cast<double>(lower),
                      w, thermal_reduction_ratio(w, s.temperature),
                      one_minus_thermal_reduction(w, s.temperature)});
    }
  emit_csv(out_path(run, "ratio.csv"),
           "equilibrium reduction factor r_T = tanh(hbar*omega/(2 kB T)) per "
           "transition; omega in rad/s",
           {"upper", "lower", "omega_rad_per_s", "r_T", "one_minus_r_T"}, rows);
  for (const auto& r : rows)
    std::cout << "transition " << r[0] << "->" << r[1]
              << "  omega = " << format_double(r[2])
              << " rad/s  r_T = " << format_double(r[3]) << "\n";
}

void run_rates(const Scenario& s, const RunOptions& run) {
  const DressingOptions dopt = dressing_options(s);
  const int nz = static_cast<int>(s.z_grid.size());
  std::vector<std::vector<std::vector<double>>> rate_rows(nz), shift_rows(nz);

  parallel_for(nz, run.threads, [&](std::size_t i) {
    const PlanarGeometry g(s.z_grid[i], s.material);
    const DressedLevels dressed = dress(s.atom, g, s.temperature, dopt);
    for (int n = 0; n < s.atom.size(); ++n) {
      for (int k = 0; k < s.atom.size(); ++k)
        if (k != n)
          rate_rows[i].push_back({s.z_grid[i], static_cast<double>(n),
                                  static_cast<double>(k), dressed.gamma(n, k)});
      shift_rows[i].push_back({s.z_grid[i], static_cast<double>(n),
                               dressed.shifts[n], dressed.gamma_total(n)});
    }
  });

  std::vector<std::vector<double>> rates_flat, shifts_flat;
  for (const auto& block : rate_rows)
    rates_flat.insert(rates_flat.end(), block.begin(), block.end());
  for (const auto& block : shift_rows)
    shifts_flat.insert(shifts_flat.end(), block.begin(), block.end());

  emit_csv(out_path(run, "rates.csv"),
           "transition rates Gamma_nk in 1/s (loss from n toward k)",
           {"z_m", "n", "k", "Gamma_nk_per_s"}, rates_flat);
  emit_csv(out_path(run, "shifts.csv"),
           "surface-induced level shifts delta_omega_n in rad/s and total "
           "loss rates in 1/s",
           {"z_m", "n", "delta_omega_rad_per_s", "Gamma_total_per_s"},
           shifts_flat);
}

void run_compare(const Scenario& s, const RunOptions& run) {
  const ForceOptions fopt = force_options(s);
  const DressingOptions dopt = dressing_options(s);
  const int nz = static_cast<int>(s.z_grid.size());
  std::vector<std::vector<double>> rows(nz);

  parallel_for(nz, run.threads, [&](std::size_t i) {
    const PlanarGeometry g(s.z_grid[i], s.material);
    const DressedLevels dressed = dress(s.atom, g, s.temperature, dopt);
    const DressedLevels bare = DressedLevels::bare(s.atom);
    const auto alpha0 = alpha_imag_axis_scalar(s.atom, bare, 0);
    const double f_macro =
        force_macroscopic(alpha0, g, s.temperature, fopt).newtons;
    const ForceBreakdown ground =
        force_state_perturbative(s.atom, dressed, g, s.temperature, 0, fopt);
    const std::vector<double> pop =
        thermal_state(s.atom, dressed, s.temperature);
    InternalState eq;
    eq.populations = pop;
    const double f_eq =
        force_total(s.atom, dressed, g, s.temperature, {eq},
                    StateForceVariant::perturbative, fopt)[0];
    const double r_t =
        thermal_reduction_ratio(s.atom.omega(1, 0), s.temperature);
    rows[i] = {s.z_grid[i],
               f_macro,
               ground.total,
               ground.total - f_macro,
               f_eq,
               f_eq / f_macro,
               r_t};
  });

  emit_csv(out_path(run, "compare.csv"),
           std::string("ground-state vs macroscopic force and equilibrium "
                       "ratio; ") +
               kSignNote,
           {"z_m", "F_macroscopic_alpha0_N", "F_ground_N",
            "ground_state_deviation_N", "F_equilibrium_N",
            "equilibrium_over_macroscopic", "r_T_first_transition"},
           rows);

  for (const auto& r : rows) {
    std::cout << "z = " << format_double(r[0]) << " m\n"
              << "  macroscopic force (alpha_0):   " << format_double(r[1])
              << " N\n"
              << "  ground-state force:            " << format_double(r[2])
              << " N  (deviation " << format_double(r[3]) << " N)\n"
              << "  equilibrium force:             " << format_double(r[4])
              << " N  (ratio to macroscopic " << format_double(r[5])
              << ", r_T = " << format_double(r[6]) << ")\n";
  }
}

void run_dilute_check(const Scenario& s, const RunOptions& run) {
  if (!s.dilute_eta)
    throw ConfigError("dilute-check needs a dilute.eta_per_m3 field", "dilute");
  const ForceOptions fopt = force_options(s);
  const int nz = static_cast<int>(s.z_grid.size());
  std::vector<std::vector<double>> rows(nz);

  parallel_for(nz, run.threads, [&](std::size_t i) {
    const PlanarGeometry g(s.z_grid[i], s.material);
    const DiluteGasCheck check =
        dilute_gas_check(s.atom, g, s.temperature, *s.dilute_eta, fopt);
    rows[i] = {s.z_grid[i], check.deviation, check.per_atom_force,
               check.reference_force,
               check.nonlinearity_warning ? 1.0 : 0.0};
  });

  emit_csv(out_path(run, "dilute_check.csv"),
           std::string("dilute-gas pressure oracle vs macroscopic CP force; ") +
               kSignNote,
           {"z_m", "relative_deviation", "per_atom_force_N",
            "reference_force_N", "nonlinearity_warning"},
           rows);
  for (const auto& r : rows)
    std::cout << "z = " << format_double(r[0])
              << " m  relative deviation = " << format_double(r[1])
              << (r[4] != 0.0 ? "  [nonlinearity warning]" : "") << "\n";
}

int dispatch(const std::string& computation, RunOptions run) {
  Scenario s = load_scenario(run.config_path);
  s.computation = computation;
  if (run.out_dir.empty()) run.out_dir = s.out_dir;
  if (run.tol > 0.0) {
    s.matsubara_rel_tol = run.tol;
    s.quadrature_rel_tol = std::min(run.tol, 1e-10);
  }
  if (computation == "force-vs-distance") run_force_vs_distance(s, run);
  else if (computation == "dynamics") run_dynamics(s, run);
  else if (computation == "ratio") run_ratio(s, run);
  else if (computation == "rates") run_rates(s, run);
  else if (computation == "compare") run_compare(s, run);
  else if (computation == "dilute-check") run_dilute_check(s, run);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thermal Casimir-Polder force engine"};
  app.require_subcommand(1);

  RunOptions run;
  std::vector<CLI::App*> subs;
  for (const auto& name : known_computations()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", run.config_path, "scenario config (JSON)")
        ->required();
    sub->add_option("--out", run.out_dir, "output directory");
    sub->add_option("--tol", run.tol, "relative tolerance override");
    sub->add_option("--threads", run.threads, "worker threads for grids");
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) return dispatch(known_computations()[i], run);
    return 1;
  } catch (const cpforce::ConfigError& ex) {
    std::cerr << "config error";
    if (ex.line() >= 0) std::cerr << " (byte " << ex.line() << ")";
    std::cerr << " [" << ex.field() << "]: " << ex.what() << "\n";
    return 2;
  } catch (const cpforce::ConvergenceError& ex) {
    std::cerr << "convergence failure in " << ex.operation()
              << ": achieved relative tolerance " << ex.achieved_tolerance()
              << ", partial result " << ex.partial_result() << "\n";
    return 3;
  } catch (const cpforce::QuadratureError& ex) {
    std::cerr << "quadrature failure: " << ex.what() << " (estimate "
              << ex.estimate() << ", bound " << ex.error_bound() << ")\n";
    return 3;
  } catch (const cpforce::CsvWriteError& ex) {
    std::cerr << "output error: " << ex.what() << "\n";
    return 4;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
}
