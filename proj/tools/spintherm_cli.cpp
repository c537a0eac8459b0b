#include "spintherm/analytic.hpp"
#include "spintherm/io.hpp"
#include "spintherm/model.hpp"
#include "spintherm/observables.hpp"
#include "spintherm/presets.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace spintherm;

const double kPi = std::acos(-1.0);

struct Options {
  std::string preset;
  std::string config_path;
  std::string out_path;
  std::string plot_path;
  std::string policy = "carry";
  std::optional<double> kappa_m, theta, t_l, t_m, t_r, p, gx, gy, gz;
  std::optional<double> tmax, dt, tm_min, tm_max;
  int grid = 0;  // 0 = command default
  unsigned threads = 0;
};

void add_common_options(CLI::App* cmd, Options& opt) {
  auto* preset = cmd->add_option("--preset", opt.preset, "Named demonstration scenario");
  auto* config = cmd->add_option("--config", opt.config_path, "JSON configuration file");
  preset->excludes(config);
  cmd->add_option("--out", opt.out_path, "Output file (default: standard output)");
  cmd->add_option("--kappa-m", opt.kappa_m, "Override middle-reservoir coupling");
  cmd->add_option("--theta", opt.theta, "Override field direction (radians)");
  cmd->add_option("--t-l", opt.t_l, "Override left reservoir temperature");
  cmd->add_option("--t-m", opt.t_m, "Override middle reservoir temperature");
  cmd->add_option("--t-r", opt.t_r, "Override right reservoir temperature");
  cmd->add_option("--p", opt.p, "Override initial-state fraction p");
  cmd->add_option("--gx", opt.gx, "Override coupling component g_x");
  cmd->add_option("--gy", opt.gy, "Override coupling component g_y");
  cmd->add_option("--gz", opt.gz, "Override coupling component g_z");
  cmd->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");
}

SystemConfig resolve_config(const Options& opt) {
  if (opt.preset.empty() == opt.config_path.empty()) {
    throw InvalidInput("exactly one of --preset or --config is required");
  }
  SystemConfig config =
      opt.preset.empty() ? load_config(opt.config_path) : make_preset(opt.preset);

  if (opt.theta) config.fields.theta = *opt.theta;
  if (opt.kappa_m) {
    if (*opt.kappa_m < 0.0) throw InvalidInput("--kappa-m must be non-negative");
    config.reservoirs.kappa_M = *opt.kappa_m;
  }
  const auto set_temp = [](std::optional<double> v, double& target, const char* flag) {
    if (!v) return;
    if (*v < 0.0) throw InvalidInput(std::string(flag) + " must be non-negative");
    target = *v;
  };
  set_temp(opt.t_l, config.reservoirs.T_L, "--t-l");
  set_temp(opt.t_m, config.reservoirs.T_M, "--t-m");
  set_temp(opt.t_r, config.reservoirs.T_R, "--t-r");
  if (opt.gx) config.coupling.g[0] = *opt.gx;
  if (opt.gy) config.coupling.g[1] = *opt.gy;
  if (opt.gz) config.coupling.g[2] = *opt.gz;
  if (opt.p) {
    if (!(*opt.p >= 0.0 && *opt.p <= 1.0)) throw InvalidInput("--p must lie in [0, 1]");
    if (opt.preset.rfind("fig4", 0) == 0) {
      // The transient scenarios start from the pair of lowest family levels;
      // p re-weights that pair rather than a generic component fraction.
      config.initial = EigenPopulationsInitial{
          tf_pair_initial(config.fields.B_L, config.coupling.J_LM, config.coupling.J_MR,
                          *opt.p)};
    } else {
      config.initial = SubspaceFractionInitial{*opt.p};
    }
  }
  return config;
}

// Output stream selection: --out file or stdout.
class OutputTarget {
 public:
  explicit OutputTarget(const Options& opt) {
    if (!opt.plot_path.empty() && opt.out_path.empty()) {
      throw InvalidInput("--plot-script requires --out");
    }
    if (!opt.out_path.empty()) {
      file_.open(opt.out_path);
      if (!file_) throw InvalidInput("cannot open '" + opt.out_path + "' for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
};

void emit_plot_script(const Options& opt, const std::string& xlabel) {
  if (opt.plot_path.empty()) return;
  std::ofstream script(opt.plot_path);
  if (!script) throw InvalidInput("cannot open '" + opt.plot_path + "' for writing");
  write_plot_script(script, opt.out_path, xlabel);
}

void print_diagnostics(const RateMatrix& rates) {
  for (const std::string& msg : rates.diagnostics) std::cerr << "warning: " << msg << '\n';
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return grid;
}

int run_spectrum(const Options& opt) {
  const SystemConfig config = resolve_config(opt);
  OutputTarget out(opt);
  const Spectrum spec = diagonalize(build_hamiltonian(config.fields, config.coupling));
  const std::array<int, 8> dominant = analytic::dominant_bare_indices(spec.transform);
  out.stream() << "index,energy,dominant_bare\n";
  for (int i = 0; i < 8; ++i) {
    out.stream() << i << ',' << format_g17(spec.energies(i)) << ',' << dominant[i] << '\n';
  }
  return 0;
}

int run_steady(const Options& opt) {
  const SystemConfig config = resolve_config(opt);
  OutputTarget out(opt);
  const SteadyPoint point = solve_steady_point(config);
  print_diagnostics(point.rates);

  std::vector<SweepRow> rows(1);
  rows[0].value = config.fields.theta;
  rows[0].currents = point.currents;
  rows[0].components = static_cast<int>(point.solution.decomposition.count());
  write_sweep_csv(out.stream(), rows);

  const Vector8 pops = point.solution.flattened();
  out.stream() << "# populations";
  for (int i = 0; i < 8; ++i) out.stream() << ',' << format_g17(pops(i));
  out.stream() << "\n# weights";
  for (double w : point.solution.weights) out.stream() << ',' << format_g17(w);
  out.stream() << '\n';
  return 0;
}

int run_evolve(const Options& opt) {
  const SystemConfig config = resolve_config(opt);
  OutputTarget out(opt);

  const Spectrum spec = diagonalize(build_hamiltonian(config.fields, config.coupling));
  const TransitionTable table =
      enumerate_transitions(spec, config.tolerances.eps_zero, config.tolerances.eps_amp);
  const RateMatrix rates = build_rate_matrices(table, config.reservoirs);
  print_diagnostics(rates);
  const SubspaceDecomposition dec = config.tolerances.eps_conn
                                        ? detect_subspaces(rates, *config.tolerances.eps_conn)
                                        : detect_subspaces(rates);

  double tmax;
  if (opt.tmax) {
    tmax = *opt.tmax;
    if (!(tmax > 0.0)) throw InvalidInput("--tmax must be positive");
  } else {
    const double rate = slowest_relaxation_rate(rates);
    if (rate == 0.0) {
      throw InvalidInput("no relaxation in this configuration; specify --tmax explicitly");
    }
    tmax = 50.0 / rate;
  }
  double dt = opt.dt ? *opt.dt : tmax / 200.0;
  if (!(dt > 0.0)) throw InvalidInput("--dt must be positive");

  std::vector<double> times;
  for (double t = 0.0; t <= tmax * (1.0 + 1e-12); t += dt) times.push_back(t);

  const Vector8 p0 = resolve_initial(config.initial, spec, dec);
  const std::vector<Vector8> trajectory = evolve(rates, p0, times);
  const std::vector<HeatCurrents> currents = transient_currents(rates, spec, trajectory);

  std::vector<SweepRow> rows(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    rows[k].value = times[k];
    rows[k].currents = currents[k];
    rows[k].components = static_cast<int>(dec.count());
  }
  write_sweep_csv(out.stream(), rows);
  emit_plot_script(opt, "t");
  return 0;
}

int run_sweep_theta(const Options& opt) {
  const SystemConfig config = resolve_config(opt);
  OutputTarget out(opt);
  const int grid = opt.grid > 0 ? opt.grid : 721;
  if (grid < 2) throw InvalidInput("--grid must be at least 2");

  InitialPolicy policy;
  if (opt.policy == "carry") {
    policy = InitialPolicy::CarryPrevious;
  } else if (opt.policy == "fixed") {
    policy = InitialPolicy::FixedP;
  } else {
    throw InvalidInput("--policy must be 'carry' or 'fixed'");
  }

  const std::vector<SweepRow> rows =
      theta_sweep(config, linspace(0.0, 2.0 * kPi, grid), policy, opt.threads);
  write_sweep_csv(out.stream(), rows);
  emit_plot_script(opt, "theta");
  return 0;
}

int run_sweep_tm(const Options& opt) {
  const SystemConfig config = resolve_config(opt);
  OutputTarget out(opt);
  const SweepDefaults defaults =
      opt.preset.empty() ? SweepDefaults{} : preset_sweep_defaults(opt.preset);
  const double lo = opt.tm_min ? *opt.tm_min : defaults.tm_min;
  const double hi = opt.tm_max ? *opt.tm_max : defaults.tm_max;
  if (!(lo > 0.0 && hi > lo)) throw InvalidInput("need 0 < --tm-min < --tm-max");
  const int grid = opt.grid > 0 ? opt.grid : defaults.grid;
  if (grid < 2) throw InvalidInput("--grid must be at least 2");

  const TmSweepResult result = tm_sweep(config, linspace(lo, hi, grid), opt.threads);
  write_sweep_csv(out.stream(), result.rows);
  for (double tc : result.critical_temperatures) {
    out.stream() << "# critical_T_M," << format_g17(tc) << '\n';
    if (out.to_file()) std::cout << "critical_T_M," << format_g17(tc) << '\n';
  }
  emit_plot_script(opt, "T_M");
  return 0;
}

int run_transistor(const Options& opt) {
  const SystemConfig config = resolve_config(opt);
  OutputTarget out(opt);
  const SweepDefaults defaults =
      opt.preset.empty() ? SweepDefaults{} : preset_sweep_defaults(opt.preset);
  const double lo = opt.tm_min ? *opt.tm_min : defaults.tm_min;
  const double hi = opt.tm_max ? *opt.tm_max : defaults.tm_max;
  if (!(lo > 0.0 && hi > lo)) throw InvalidInput("need 0 < --tm-min < --tm-max");
  const int grid = opt.grid > 0 ? opt.grid : defaults.grid;
  if (grid < 2) throw InvalidInput("--grid must be at least 2");

  const std::vector<double> tms = linspace(lo, hi, grid);
  out.stream() << "sweep_value,alpha_L,alpha_R,dQM_dTM,components,flag\n";
  for (double tm : tms) {
    const AmplificationResult amp = amplification(config, tm, config.tolerances.dT);
    SystemConfig local = config;
    local.reservoirs.T_M = tm;
    const SteadyPoint point = solve_steady_point(local);
    out.stream() << format_g17(tm) << ',' << format_g17(amp.alpha_L) << ','
                 << format_g17(amp.alpha_R) << ',' << format_g17(amp.dQM_dTM) << ','
                 << point.solution.decomposition.count() << ','
                 << (amp.defined ? "" : "undefined") << '\n';
  }
  return 0;
}

int run_diode(const Options& opt) {
  const SystemConfig config = resolve_config(opt);
  OutputTarget out(opt);
  const RectificationResult rect = rectification(config);
  if (rect.middle_coupled) {
    std::cerr << "warning: middle reservoir coupled (kappa_M > 0); "
                 "rectification assumes a two-terminal device\n";
  }
  const SteadyPoint point = solve_steady_point(config);
  out.stream() << "sweep_value,Q_forward,Q_reverse,R,components,flag\n";
  out.stream() << format_g17(config.fields.theta) << ',' << format_g17(rect.Q_forward) << ','
               << format_g17(rect.Q_reverse) << ',' << format_g17(rect.R) << ','
               << point.solution.decomposition.count() << ','
               << (rect.middle_coupled ? "middle-coupled" : "") << '\n';
  return 0;
}

int run_subspaces(const Options& opt) {
  const SystemConfig config = resolve_config(opt);
  OutputTarget out(opt);
  const Spectrum spec = diagonalize(build_hamiltonian(config.fields, config.coupling));
  const TransitionTable table =
      enumerate_transitions(spec, config.tolerances.eps_zero, config.tolerances.eps_amp);
  const RateMatrix rates = build_rate_matrices(table, config.reservoirs);
  print_diagnostics(rates);
  const SubspaceDecomposition dec = config.tolerances.eps_conn
                                        ? detect_subspaces(rates, *config.tolerances.eps_conn)
                                        : detect_subspaces(rates);
  out.stream() << dec.count() << '\n';
  for (std::size_t c = 0; c < dec.count(); ++c) {
    out.stream() << "component " << c << ':';
    for (int s : dec.components[c]) out.stream() << ' ' << s;
    out.stream() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady-state and transient thermodynamics of a three-spin chain\n"
               "in a direction-adjustable magnetic field"};
  app.require_subcommand(1);

  Options opt;
  CLI::App* spectrum = app.add_subcommand("spectrum", "Eigenvalues of the chain Hamiltonian");
  CLI::App* steady = app.add_subcommand("steady", "Steady-state currents and populations");
  CLI::App* evolve_cmd = app.add_subcommand("evolve", "Transient currents over time");
  CLI::App* sweep_theta = app.add_subcommand("sweep-theta", "Currents across field directions");
  CLI::App* sweep_tm =
      app.add_subcommand("sweep-tm", "Currents across middle-reservoir temperatures");
  CLI::App* transistor =
      app.add_subcommand("transistor", "Amplification factors across T_M");
  CLI::App* diode = app.add_subcommand("diode", "Rectification under terminal swap");
  CLI::App* subspaces = app.add_subcommand("subspaces", "Invariant components of the rate graph");

  for (CLI::App* cmd :
       {spectrum, steady, evolve_cmd, sweep_theta, sweep_tm, transistor, diode, subspaces}) {
    add_common_options(cmd, opt);
  }
  for (CLI::App* cmd : {evolve_cmd, sweep_theta, sweep_tm}) {
    cmd->add_option("--plot-script", opt.plot_path,
                    "Write a gnuplot script for the CSV (requires --out)");
  }
  evolve_cmd->add_option("--tmax", opt.tmax, "Final time (default: 50 relaxation times)");
  evolve_cmd->add_option("--dt", opt.dt, "Sample spacing (default: tmax/200)");
  sweep_theta->add_option("--grid", opt.grid, "Grid points over [0, 2*pi] (default: 721)");
  sweep_theta->add_option("--policy", opt.policy,
                          "Initial state along the sweep: carry | fixed (default: carry)");
  for (CLI::App* cmd : {sweep_tm, transistor}) {
    cmd->add_option("--grid", opt.grid, "Grid points (default: 200)");
    cmd->add_option("--tm-min", opt.tm_min, "Lowest T_M (default: preset-specific)");
    cmd->add_option("--tm-max", opt.tm_max, "Highest T_M (default: preset-specific)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(spectrum)) return run_spectrum(opt);
    if (app.got_subcommand(steady)) return run_steady(opt);
    if (app.got_subcommand(evolve_cmd)) return run_evolve(opt);
    if (app.got_subcommand(sweep_theta)) return run_sweep_theta(opt);
    if (app.got_subcommand(sweep_tm)) return run_sweep_tm(opt);
    if (app.got_subcommand(transistor)) return run_transistor(opt);
    if (app.got_subcommand(diode)) return run_diode(opt);
    if (app.got_subcommand(subspaces)) return run_subspaces(opt);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DegenerateSteadyState& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const RadicalBranchError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
