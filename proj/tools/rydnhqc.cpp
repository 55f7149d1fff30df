// Command-line runner for the gate simulations.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rydnhqc/experiments.hpp"

namespace {

using rydnhqc::Experiment;
using rydnhqc::ExperimentConfig;

constexpr int kExitConfig = 2;
constexpr int kExitGuard = 3;

// Flag values; unset optionals leave the config untouched.
struct Flags {
  std::string config_path;
  std::optional<std::string> level, gate, out;
  std::optional<double> gamma_khz, epsilon, chi0, theta_s, theta1, phi1, omega3;
  std::optional<int> steps, master_steps, snapshots, threads;
  std::optional<uint64_t> seed;
  std::optional<std::vector<double>> epsilons, chi0_values, gammas;
  bool strict = false;
  bool quiet = false;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_path, "TOML-like config file; flags override it");
  app->add_option("--model-level", f.level, "L0 (full lab), L1 (blockade frame), L2 (effective), L3 (two-qubit RWA)");
  app->add_option("--gamma-khz", f.gamma_khz, "Rydberg decay rate in kHz");
  app->add_option("--epsilon", f.epsilon, "systematic amplitude error, pulses scale by 1 + epsilon");
  app->add_option("--steps", f.steps, "propagator steps (0: model default)");
  app->add_option("--master-steps", f.master_steps, "RK4 steps for master-equation runs (0: model default)");
  app->add_option("--snapshots", f.snapshots, "stored time points per run");
  app->add_option("--seed", f.seed, "seed for the Monte-Carlo fidelity check");
  app->add_option("--threads", f.threads, "sweep workers (0: all cores)");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--chi0", f.chi0, "schedule parameter chi0");
  app->add_flag("--strict", f.strict, "exit with status 3 when a step-size advisory fires");
  app->add_flag("-q,--quiet", f.quiet, "do not print the summary");
}

ExperimentConfig resolve(Experiment e, const Flags& f) {
  ExperimentConfig c = ExperimentConfig::defaults(e);
  if (!f.config_path.empty()) {
    c = ExperimentConfig::from_document(rydnhqc::io::ConfigDocument::load(f.config_path));
    if (c.experiment != e) {
      throw rydnhqc::io::ConfigError("config file is for experiment " + rydnhqc::to_string(c.experiment) +
                                     ", not " + rydnhqc::to_string(e));
    }
  }
  if (f.level) {
    try {
      c.level = rydnhqc::parse_model_level(*f.level);
    } catch (const std::invalid_argument& err) {
      throw rydnhqc::io::ConfigError(err.what());
    }
  }
  if (f.gate) c.use_gate(rydnhqc::parse_gate_choice(*f.gate));
  c.params.level = c.level;
  if (f.gamma_khz) c.gamma_khz = *f.gamma_khz;
  if (f.epsilon) c.epsilon = *f.epsilon;
  if (f.steps) c.steps = *f.steps;
  if (f.master_steps) c.master_steps = *f.master_steps;
  if (f.snapshots) c.snapshots = *f.snapshots;
  if (f.seed) c.seed = *f.seed;
  if (f.threads) c.threads = *f.threads;
  if (f.out) c.out_dir = *f.out;
  if (f.chi0) c.chi0 = *f.chi0;
  if (f.theta_s) c.theta_s = *f.theta_s;
  if (f.theta1) c.theta1 = *f.theta1;
  if (f.phi1) c.phi1 = *f.phi1;
  if (f.omega3) c.omega3_tilde = *f.omega3;
  if (f.epsilons) c.epsilons = *f.epsilons;
  if (f.chi0_values) c.chi0_values = *f.chi0_values;
  if (f.gammas) c.gammas_khz = *f.gammas;
  if (f.strict) c.strict = true;
  c.validate();
  return c;
}

void print_summary(const rydnhqc::RunOutput& out, const std::vector<std::filesystem::path>& files) {
  for (const auto& s : out.scalars) std::cout << s.name << " = " << rydnhqc::io::format_number(s.value) << '\n';
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& p : files) std::cout << "wrote " << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heralded holonomic Rydberg gate simulations"};
  app.require_subcommand(1);
  Flags flags;

  struct Sub {
    const char* name;
    Experiment experiment;
    const char* help;
  };
  const Sub subs[] = {
      {"not-gate", Experiment::not_gate, "Not gate: controls, phases, fidelity curve (fig3b, fig3c, fig4a)"},
      {"single-gate", Experiment::single_gate_custom, "arbitrary single-qubit rotation"},
      {"cnot-gate", Experiment::cnot_gate, "C-Not gate fidelity curve (fig5a), optional sweeps"},
      {"error-sweep", Experiment::error_sweep, "final fidelity versus systematic error (fig3d, fig4b, fig5b)"},
      {"gamma-sweep", Experiment::gamma_sweep, "master-equation fidelity versus decay (fig4c/d, fig5c/d)"},
      {"qs-map", Experiment::qs_map, "Q_s over (theta_s, chi0) (fig3a)"},
      {"tables", Experiment::tables, "post-selected metrics tables (table1, table2)"},
  };
  std::vector<std::pair<CLI::App*, Experiment>> commands;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, flags);
    commands.emplace_back(sub, s.experiment);
    switch (s.experiment) {
      case Experiment::single_gate_custom:
        sub->add_option("--theta-s", flags.theta_s, "geometric phase theta_s (rad)");
        sub->add_option("--theta1", flags.theta1, "rotation axis polar angle (rad)");
        sub->add_option("--phi1", flags.phi1, "rotation axis azimuth (rad)");
        break;
      case Experiment::cnot_gate:
        sub->add_option("--omega3", flags.omega3, "exchange drive tilde-Omega_3 in 1/T");
        sub->add_option("--epsilons", flags.epsilons, "optional epsilon sweep (fig5b)")->delimiter(',');
        sub->add_option("--gammas-khz", flags.gammas, "optional decay sweep (fig5c, fig5d)")->delimiter(',');
        break;
      case Experiment::error_sweep:
        sub->add_option("--gate", flags.gate, "not or cnot");
        sub->add_option("--epsilons", flags.epsilons, "comma-separated epsilon values")->delimiter(',');
        sub->add_option("--chi0-values", flags.chi0_values, "comma-separated chi0 values")->delimiter(',');
        break;
      case Experiment::gamma_sweep:
        sub->add_option("--gate", flags.gate, "not or cnot");
        sub->add_option("--gammas-khz", flags.gammas, "comma-separated decay rates in kHz")->delimiter(',');
        break;
      default:
        break;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  Experiment experiment = Experiment::not_gate;
  for (const auto& [sub, e] : commands) {
    if (sub->parsed()) experiment = e;
  }

  ExperimentConfig config;
  try {
    config = resolve(experiment, flags);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const auto out = rydnhqc::run_experiment(config);
    const auto files = rydnhqc::emit_outputs(out, config, config.out_dir);
    if (!flags.quiet) print_summary(out, files);
    if (config.strict && out.guard_violation) {
      std::cerr << "step-size advisory exceeded under --strict\n";
      return kExitGuard;
    }
  } catch (const rydnhqc::io::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
