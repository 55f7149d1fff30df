#include "rydnhqc/experiments.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#ifndef RYDNHQC_VERSION
#define RYDNHQC_VERSION "unknown"
#endif

namespace rydnhqc {

namespace {

using io::Column;
using io::ConfigError;
using io::ResultTable;

constexpr double kAdvisoryLimit = 0.1;
constexpr int kQsSteps = 20000;
constexpr int kHaarSamples = 100000;

struct ExperimentName {
  Experiment e;
  const char* name;
};
constexpr ExperimentName kExperimentNames[] = {
    {Experiment::not_gate, "not_gate"},       {Experiment::single_gate_custom, "single_gate_custom"},
    {Experiment::cnot_gate, "cnot_gate"},     {Experiment::error_sweep, "error_sweep"},
    {Experiment::gamma_sweep, "gamma_sweep"}, {Experiment::qs_map, "qs_map"},
    {Experiment::tables, "tables"},
};

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return out;
}

// Rounds away the last few ulps that linspace leaves in values like 0.07.
std::vector<double> tidy(std::vector<double> xs) {
  for (double& x : xs) x = std::round(x * 1e12) / 1e12;
  return xs;
}

GateKind kind_of(GateChoice g) { return g == GateChoice::cnot ? GateKind::two_qubit : GateKind::single_qubit; }

PhysicalParams with_level(PhysicalParams p, ModelLevel level) {
  p.level = level;
  return p;
}

double t_phys(const PhysicalParams& p) { return physical_time(kDefaultVPhys, p.V); }

int resolve_threads(int threads) {
  return threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void check_advisory(RunOutput& out, double advisory, const std::string& what) {
  if (advisory <= kAdvisoryLimit) return;
  out.guard_violation = true;
  out.warnings.push_back(what + ": h*f_max = " + io::format_number(advisory) + " exceeds " +
                         io::format_number(kAdvisoryLimit));
}

std::string tag(const std::string& name, double x) { return name + "@" + io::format_number(x); }

}  // namespace

Experiment parse_experiment(const std::string& s) {
  std::string key = s;
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "single_gate") key = "single_gate_custom";
  for (const auto& [e, name] : kExperimentNames) {
    if (key == name) return e;
  }
  throw ConfigError("unknown experiment '" + s + "'");
}

std::string to_string(Experiment e) {
  for (const auto& [x, name] : kExperimentNames) {
    if (x == e) return name;
  }
  return "?";
}

GateChoice parse_gate_choice(const std::string& s) {
  if (s == "not") return GateChoice::not_gate;
  if (s == "cnot") return GateChoice::cnot;
  throw ConfigError("unknown gate '" + s + "' (expected not or cnot)");
}

std::string to_string(GateChoice g) { return g == GateChoice::cnot ? "cnot" : "not"; }

ExperimentConfig ExperimentConfig::defaults(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::cnot_gate:
      c.use_gate(GateChoice::cnot);
      break;
    case Experiment::error_sweep:
      c.level = ModelLevel::effective;
      c.epsilons = tidy(linspace(-0.1, 0.1, 21));
      c.chi0_values = {1.0, 0.5, 0.0};
      break;
    case Experiment::gamma_sweep:
      c.gamma_khz = 1.0;
      c.gammas_khz = tidy(linspace(0.0, 4.0, 9));
      break;
    case Experiment::qs_map:
      c.qs_theta_over_pi = tidy(linspace(0.0, 2.0, 21));
      c.qs_chi0 = tidy(linspace(0.0, 2.0, 21));
      break;
    case Experiment::tables:
      c.gammas_khz = {0.0, 1.0, 2.0, 3.0, 4.0};
      break;
    default:
      break;
  }
  c.params.level = c.level;
  return c;
}

void ExperimentConfig::use_gate(GateChoice g) {
  gate = g;
  preset = g == GateChoice::cnot ? "two-qubit-paper" : "single-qubit-paper";
  params = with_level(PhysicalParams::preset(preset), level);
  if (g == GateChoice::cnot && experiment == Experiment::gamma_sweep) gammas_khz = tidy(linspace(0.0, 2.0, 5));
  if (g == GateChoice::cnot && experiment == Experiment::error_sweep) chi0_values = {1.0};
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  auto in_eps_range = [](double e) { return e >= -0.5 && e <= 0.5; };
  require(in_eps_range(epsilon), "epsilon must lie in [-0.5, 0.5]");
  for (double e : epsilons) require(in_eps_range(e), "every sweep epsilon must lie in [-0.5, 0.5]");
  require(gamma_khz >= 0.0, "gamma_khz must be non-negative");
  for (double g : gammas_khz) require(g >= 0.0, "sweep decay rates must be non-negative");
  require(steps >= 0 && master_steps >= 0, "step counts must be non-negative");
  require(snapshots >= 1, "snapshots must be positive");
  require(threads >= 0, "threads must be non-negative");
  require(params.V > 0.0, "V must be positive");
  require(params.detunings.d1 > 0.0 && params.detunings.d2 > 0.0 && params.detunings.d3 > 0.0,
          "detunings must be positive");
  require(params.stark_fraction >= 0.0 && params.stark_fraction <= 1.0, "stark_fraction must lie in [0, 1]");
  require(chi0 >= 0.0, "chi0 must be non-negative");
  for (double c : chi0_values) require(c >= 0.0, "sweep chi0 values must be non-negative");
  for (double c : qs_chi0) require(c >= 0.0, "qs_chi0 values must be non-negative");
  require(omega3_tilde > 0.0, "omega3_tilde must be positive");
  const bool two_qubit = experiment == Experiment::cnot_gate ||
                         ((experiment == Experiment::error_sweep || experiment == Experiment::gamma_sweep) &&
                          gate == GateChoice::cnot);
  require(level != ModelLevel::two_qubit_rwa || two_qubit || experiment == Experiment::qs_map,
          "model level L3 exists only for the two-qubit gate");
  require(!out_dir.empty(), "output directory must not be empty");
}

io::ConfigDocument ExperimentConfig::to_document() const {
  using io::format_number;
  io::ConfigDocument d;
  d.set("", "experiment", io::quote(to_string(experiment)));
  d.set("", "gate", io::quote(to_string(gate)));
  d.set("", "model_level", io::quote(to_string(level)));
  d.set("", "preset", io::quote(preset));
  d.set("", "seed", std::to_string(seed));
  d.set("", "threads", std::to_string(threads));
  d.set("", "strict", io::raw_bool(strict));
  d.set("", "out", io::quote(out_dir));
  d.set("params", "V", format_number(params.V));
  d.set("params", "delta1", format_number(params.detunings.d1));
  d.set("params", "delta2", format_number(params.detunings.d2));
  d.set("params", "delta3", format_number(params.detunings.d3));
  d.set("params", "stark_compensation", io::raw_bool(params.stark_compensation));
  d.set("params", "stark_fraction", format_number(params.stark_fraction));
  d.set("schedule", "theta_s", format_number(theta_s));
  d.set("schedule", "theta1", format_number(theta1));
  d.set("schedule", "phi1", format_number(phi1));
  d.set("schedule", "chi0", format_number(chi0));
  d.set("schedule", "omega3_tilde", format_number(omega3_tilde));
  d.set("run", "epsilon", format_number(epsilon));
  d.set("run", "gamma_khz", format_number(gamma_khz));
  d.set("run", "steps", std::to_string(steps));
  d.set("run", "master_steps", std::to_string(master_steps));
  d.set("run", "snapshots", std::to_string(snapshots));
  d.set("sweep", "epsilons", io::raw_list(epsilons));
  d.set("sweep", "chi0_values", io::raw_list(chi0_values));
  d.set("sweep", "gammas_khz", io::raw_list(gammas_khz));
  d.set("sweep", "qs_theta_over_pi", io::raw_list(qs_theta_over_pi));
  d.set("sweep", "qs_chi0", io::raw_list(qs_chi0));
  return d;
}

ExperimentConfig ExperimentConfig::from_document(const io::ConfigDocument& doc) {
  static const std::set<std::string> known = {
      ".experiment", ".gate", ".model_level", ".preset", ".seed", ".threads", ".strict", ".out",
      "params.V", "params.delta1", "params.delta2", "params.delta3", "params.stark_compensation",
      "params.stark_fraction", "schedule.theta_s", "schedule.theta1", "schedule.phi1", "schedule.chi0",
      "schedule.omega3_tilde", "run.epsilon", "run.gamma_khz", "run.steps", "run.master_steps",
      "run.snapshots", "sweep.epsilons", "sweep.chi0_values", "sweep.gammas_khz",
      "sweep.qs_theta_over_pi", "sweep.qs_chi0"};
  for (const auto& [section, entries] : doc.sections()) {
    for (const auto& kv : entries) {
      if (!known.count(section + "." + kv.first)) {
        throw ConfigError("unknown config key " + (section.empty() ? "" : section + ".") + kv.first);
      }
    }
  }
  auto get = [&](const char* section, const char* key) { return doc.get(section, key); };
  auto to_int = [](const std::string& raw) {
    const long long v = io::parse_int(raw);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      throw ConfigError("integer out of range: " + raw);
    }
    return static_cast<int>(v);
  };

  const auto experiment = get("", "experiment");
  ExperimentConfig c = defaults(experiment ? parse_experiment(io::parse_string(*experiment)) : Experiment::not_gate);
  if (auto v = get("", "model_level")) {
    try {
      c.level = parse_model_level(io::parse_string(*v));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (auto v = get("", "gate")) c.use_gate(parse_gate_choice(io::parse_string(*v)));
  if (auto v = get("", "preset")) {
    c.preset = io::parse_string(*v);
    try {
      c.params = PhysicalParams::preset(c.preset);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  c.params.level = c.level;
  if (auto v = get("", "seed")) {
    const long long s = io::parse_int(*v);
    if (s < 0) throw ConfigError("seed must be non-negative");
    c.seed = static_cast<uint64_t>(s);
  }
  if (auto v = get("", "threads")) c.threads = to_int(*v);
  if (auto v = get("", "strict")) c.strict = io::parse_bool(*v);
  if (auto v = get("", "out")) c.out_dir = io::parse_string(*v);
  if (auto v = get("params", "V")) c.params.V = io::parse_double(*v);
  if (auto v = get("params", "delta1")) c.params.detunings.d1 = io::parse_double(*v);
  if (auto v = get("params", "delta2")) c.params.detunings.d2 = io::parse_double(*v);
  if (auto v = get("params", "delta3")) c.params.detunings.d3 = io::parse_double(*v);
  if (auto v = get("params", "stark_compensation")) c.params.stark_compensation = io::parse_bool(*v);
  if (auto v = get("params", "stark_fraction")) c.params.stark_fraction = io::parse_double(*v);
  if (auto v = get("schedule", "theta_s")) c.theta_s = io::parse_double(*v);
  if (auto v = get("schedule", "theta1")) c.theta1 = io::parse_double(*v);
  if (auto v = get("schedule", "phi1")) c.phi1 = io::parse_double(*v);
  if (auto v = get("schedule", "chi0")) c.chi0 = io::parse_double(*v);
  if (auto v = get("schedule", "omega3_tilde")) c.omega3_tilde = io::parse_double(*v);
  if (auto v = get("run", "epsilon")) c.epsilon = io::parse_double(*v);
  if (auto v = get("run", "gamma_khz")) c.gamma_khz = io::parse_double(*v);
  if (auto v = get("run", "steps")) c.steps = to_int(*v);
  if (auto v = get("run", "master_steps")) c.master_steps = to_int(*v);
  if (auto v = get("run", "snapshots")) c.snapshots = to_int(*v);
  if (auto v = get("sweep", "epsilons")) c.epsilons = io::parse_double_list(*v);
  if (auto v = get("sweep", "chi0_values")) c.chi0_values = io::parse_double_list(*v);
  if (auto v = get("sweep", "gammas_khz")) c.gammas_khz = io::parse_double_list(*v);
  if (auto v = get("sweep", "qs_theta_over_pi")) c.qs_theta_over_pi = io::parse_double_list(*v);
  if (auto v = get("sweep", "qs_chi0")) c.qs_chi0 = io::parse_double_list(*v);
  return c;
}

double amplitude_scale(ModelLevel level, double epsilon) {
  const bool effective = level == ModelLevel::effective || level == ModelLevel::two_qubit_rwa;
  return 1.0 + (effective ? 2.0 * epsilon : epsilon);
}

int default_steps(GateKind kind, ModelLevel level) {
  if (level == ModelLevel::effective || level == ModelLevel::two_qubit_rwa) return 200000;
  return kind == GateKind::single_qubit ? 200000 : 100000;
}

int default_master_steps(GateKind kind, ModelLevel level) {
  if (level == ModelLevel::effective || level == ModelLevel::two_qubit_rwa) return 200000;
  return kind == GateKind::single_qubit ? 200000 : 1200000;
}

double RunOutput::scalar(const std::string& name) const {
  for (const auto& s : scalars) {
    if (s.name == name) return s.value;
  }
  throw std::out_of_range("no scalar named " + name);
}

const io::ResultTable& RunOutput::table(const std::string& name) const {
  for (const auto& t : tables) {
    if (t.name == name) return t;
  }
  throw std::out_of_range("no table named " + name);
}

GateRun run_gate(const GateSchedule& gate, const PhysicalParams& params, double epsilon, int steps,
                 int snapshots) {
  const GateHamiltonian h(gate, params, amplitude_scale(params.level, epsilon));
  const auto comp = computational_states(h.basis());
  const int n = static_cast<int>(comp.size());
  Matrix x0(h.dim(), n);
  for (int j = 0; j < n; ++j) x0.col(j) = comp[static_cast<size_t>(j)];
  const Operator target = comparator(h.basis(), target_gate(gate));
  const auto grid = TimeGrid::uniform(0.0, gate.T, steps, snapshots);

  GateRun run;
  run.advisory = step_advisory(grid, h.drive_frequency());
  propagate_columns(as_source(h), grid, x0, [&](int, double t, const Matrix& x) {
    run.m = fidelity_matrix(target, comp, x);
    run.times.push_back(t);
    run.fidelity.push_back(average_fidelity(run.m, n));
  });
  run.final_fidelity = run.fidelity.back();
  return run;
}

StateVector standard_initial_state(const Basis& basis) {
  using level::aux_rydberg;
  if (basis.n_atoms() == 2) return basis.ket({aux_rydberg, level::zero});
  if (basis.n_atoms() == 3) {
    return (basis.ket({aux_rydberg, level::zero, level::zero}) + basis.ket({aux_rydberg, level::one, level::zero})) /
           std::sqrt(2.0);
  }
  throw LayoutError("no standard initial state for this layout");
}

MasterRun run_master(const GateSchedule& gate, const PhysicalParams& params, double gamma_dimless, int steps,
                     int snapshots) {
  const GateHamiltonian h(gate, params);
  const Basis& basis = h.basis();
  const StateVector psi0 = standard_initial_state(basis);
  const Matrix rho0 = psi0 * psi0.adjoint();
  const Operator target = comparator(basis, target_gate(gate));
  const Matrix ideal = target * rho0 * target.adjoint();
  const auto grid = TimeGrid::uniform(0.0, gate.T, steps, snapshots);

  MasterRun run;
  run.advisory = step_advisory(grid, h.max_frequency());
  run.worst.min_eigenvalue = 1.0;
  Matrix last;
  evolve_master(as_source(h), lindblad_ops(gamma_dimless, basis), rho0, grid,
                [&](int, double t, const DensityMatrix& rho) {
                  run.times.push_back(t);
                  run.fidelity.push_back((ideal * rho).trace().real());
                  const auto d = diagnose(rho);
                  run.worst.hermiticity = std::max(run.worst.hermiticity, d.hermiticity);
                  run.worst.trace_error = std::max(run.worst.trace_error, d.trace_error);
                  run.worst.min_eigenvalue = std::min(run.worst.min_eigenvalue, d.min_eigenvalue);
                  last = rho;
                });
  run.final_fidelity = run.fidelity.back();
  run.herald = heralded_metrics(last, target, rho0, basis);
  return run;
}

namespace {

ResultTable fidelity_table(const std::string& name, const std::vector<double>& times,
                           const std::vector<double>& fidelity, double T_seconds) {
  ResultTable t{name, {{"t", "T"}, {"t_us", "us"}, {"F_avg", "1"}}, {}};
  for (size_t i = 0; i < times.size(); ++i) t.add_row({times[i], times[i] * T_seconds * 1e6, fidelity[i]});
  return t;
}

// Controls, phases and effective-model fidelity of a single-qubit schedule on
// a uniform grid of `rows` intervals.
void schedule_tables(const GateSchedule& gate, const PhysicalParams& params, const ExperimentConfig& config,
                     RunOutput& out) {
  const int rows = std::min(config.snapshots, 4000);
  const double T_s = t_phys(params);
  const LoopSchedule loop = gate.loop(1);

  ResultTable controls{"fig3b",
                       {{"t", "T"}, {"t_us", "us"}, {"omega_x", "1/T"}, {"omega_y", "1/T"},
                        {"omega_tilde", "1/T"}, {"mu", "rad"}},
                       {}};
  std::vector<double> mu;
  std::vector<std::array<double, 4>> vals;
  double peak = 0.0;
  for (int i = 0; i <= rows; ++i) {
    const double t = gate.T * i / rows;
    const Controls c = controls_at(t, loop);
    const EffectiveDrive d = effective_drive(c);
    peak = std::max(peak, d.envelope);
    vals.push_back({t, c.omega_x, c.omega_y, d.envelope});
    mu.push_back(d.phase);
  }
  mu = unwrap_phase(mu);
  for (size_t i = 0; i < vals.size(); ++i) {
    controls.add_row({vals[i][0], vals[i][0] * T_s * 1e6, vals[i][1], vals[i][2], vals[i][3], mu[i]});
  }
  out.tables.push_back(std::move(controls));

  // Effective-model fidelity on a grid aligned with the phase record.
  const int base = config.level == ModelLevel::effective && config.steps > 0
                       ? config.steps
                       : default_steps(GateKind::single_qubit, ModelLevel::effective);
  const int steps = rows * ((base + rows - 1) / rows);
  const GateHamiltonian h(gate, with_level(params, ModelLevel::effective),
                          amplitude_scale(ModelLevel::effective, config.epsilon));
  const auto comp = computational_states(h.basis());
  Matrix x0(h.dim(), static_cast<Eigen::Index>(comp.size()));
  for (size_t j = 0; j < comp.size(); ++j) x0.col(static_cast<Eigen::Index>(j)) = comp[j];
  const Operator target = comparator(h.basis(), target_gate(gate));
  std::vector<double> f_eff;
  propagate_columns(as_source(h), TimeGrid{0.0, gate.T, steps, steps / rows}, x0,
                    [&](int, double, const Matrix& x) {
                      f_eff.push_back(average_fidelity(fidelity_matrix(target, comp, x), static_cast<int>(comp.size())));
                    });

  const PhaseRecord rec = accumulate_phases(loop, 4 * rows);
  ResultTable phases{"fig3c",
                     {{"t", "T"}, {"t_us", "us"}, {"F_avg", "1"}, {"beta1", "rad"}, {"beta2", "rad"},
                      {"vartheta_minus", "rad"}, {"theta_minus", "rad"}},
                     {}};
  for (int i = 0; i <= rows; ++i) {
    const size_t k = static_cast<size_t>(4 * i);
    phases.add_row({rec.t[k], rec.t[k] * T_s * 1e6, f_eff[static_cast<size_t>(i)], rec.beta1[k], rec.beta2[k],
                    rec.vartheta_minus[k], rec.theta_minus[k]});
  }
  out.tables.push_back(std::move(phases));

  const PhaseRecord fine = accumulate_phases(loop);
  out.scalars.push_back({"omega_tilde_max", peak});
  out.scalars.push_back({"F_avg_effective", f_eff.back()});
  out.scalars.push_back({"vartheta_minus_T", fine.vartheta_minus.back()});
  out.scalars.push_back({"theta_minus_T", fine.theta_minus.back()});
}

// Master runs at gamma = 0 and gamma_khz: final fidelities, the factorized
// estimate e^{-gamma T} F(gamma = 0) and the heralded metrics.
void master_scalars(const GateSchedule& gate, const PhysicalParams& params, const ExperimentConfig& config,
                    RunOutput& out) {
  const int steps = config.master_steps > 0 ? config.master_steps : default_master_steps(gate.kind, params.level);
  const double T_s = t_phys(params);
  const double gamma = gamma_dimensionless(config.gamma_khz, T_s);
  const auto runs = parallel_map<MasterRun>(2, config.threads, [&](int i) {
    return run_master(gate, params, i == 0 ? 0.0 : gamma, steps, config.snapshots);
  });
  for (const auto& r : runs) check_advisory(out, r.advisory, "master equation");
  const MasterRun& m = runs[1];
  out.scalars.push_back({"master_F_gamma0", runs[0].final_fidelity});
  out.scalars.push_back({"master_F", m.final_fidelity});
  out.scalars.push_back({"theory_F", success_probability(gate.T, gamma) * runs[0].final_fidelity});
  out.scalars.push_back({"P_s", m.herald.p_success});
  out.scalars.push_back({"F_prime", m.herald.fidelity_post});
  out.scalars.push_back({"purity", m.herald.purity_post});
  out.scalars.push_back({"exp_minus_gamma_T", success_probability(gate.T, gamma)});
  out.scalars.push_back({"max_hermiticity_error", std::max(runs[0].worst.hermiticity, m.worst.hermiticity)});
  out.scalars.push_back({"max_trace_error", std::max(runs[0].worst.trace_error, m.worst.trace_error)});
  out.scalars.push_back({"min_eigenvalue", std::min(runs[0].worst.min_eigenvalue, m.worst.min_eigenvalue)});
}

RunOutput single_qubit_run(const ExperimentConfig& config, const GateSchedule& gate) {
  const PhysicalParams params = with_level(config.params, config.level);
  const int steps = config.steps > 0 ? config.steps : default_steps(GateKind::single_qubit, config.level);
  const double T_s = t_phys(params);
  RunOutput out;
  out.scalars.push_back({"T_us", T_s * 1e6});
  schedule_tables(gate, params, config, out);

  const GateRun run = run_gate(gate, params, config.epsilon, steps, config.snapshots);
  check_advisory(out, run.advisory, "propagator");
  out.tables.push_back(fidelity_table("fig4a", run.times, run.fidelity, T_s));
  out.scalars.push_back({"F_avg", run.final_fidelity});
  const HaarEstimate haar = haar_average_oracle(run.m, kHaarSamples, config.seed);
  out.scalars.push_back({"F_avg_haar", haar.mean});
  out.scalars.push_back({"F_avg_haar_stderr", haar.std_error});
  if (config.gamma_khz > 0.0) master_scalars(gate, params, config, out);
  return out;
}

struct GammaPoint {
  double gamma_khz = 0;
  MasterRun run;
};

// Master runs over a list of decay rates (gamma = 0 always included).
std::vector<GammaPoint> gamma_runs(const GateSchedule& gate, const PhysicalParams& params,
                                   std::vector<double> gammas_khz, int steps, int snapshots, int threads) {
  gammas_khz.push_back(0.0);
  std::sort(gammas_khz.begin(), gammas_khz.end());
  gammas_khz.erase(std::unique(gammas_khz.begin(), gammas_khz.end()), gammas_khz.end());
  const double T_s = t_phys(params);
  const auto runs = parallel_map<MasterRun>(static_cast<int>(gammas_khz.size()), threads, [&](int i) {
    return run_master(gate, params, gamma_dimensionless(gammas_khz[static_cast<size_t>(i)], T_s), steps, snapshots);
  });
  std::vector<GammaPoint> out;
  for (size_t i = 0; i < runs.size(); ++i) out.push_back({gammas_khz[i], runs[i]});
  return out;
}

void gamma_tables(const GateSchedule& gate, const PhysicalParams& params, const ExperimentConfig& config,
                  const std::string& series_name, const std::string& final_name, RunOutput& out) {
  std::vector<double> gammas = config.gammas_khz;
  const double series_gamma = config.gamma_khz > 0.0 ? config.gamma_khz : 1.0;
  gammas.push_back(series_gamma);
  const int steps = config.master_steps > 0 ? config.master_steps : default_master_steps(gate.kind, params.level);
  const auto points = gamma_runs(gate, params, gammas, steps, config.snapshots, config.threads);
  const double T_s = t_phys(params);
  const MasterRun& ref = points.front().run;

  ResultTable fin{final_name,
                  {{"gamma_kHz", "kHz"}, {"F_master", "1"}, {"F_theory", "1"}, {"P_s", "1"},
                   {"F_prime", "1"}, {"purity", "1"}, {"min_eigenvalue", "1"}},
                  {}};
  const MasterRun* series = nullptr;
  for (const auto& p : points) {
    check_advisory(out, p.run.advisory, "master equation");
    const double decay = success_probability(gate.T, gamma_dimensionless(p.gamma_khz, T_s));
    if (p.gamma_khz == series_gamma) series = &p.run;
    const bool listed = std::find(config.gammas_khz.begin(), config.gammas_khz.end(), p.gamma_khz) !=
                        config.gammas_khz.end();
    if (!listed && !config.gammas_khz.empty()) continue;
    fin.add_row({p.gamma_khz, p.run.final_fidelity, decay * ref.final_fidelity, p.run.herald.p_success,
                 p.run.herald.fidelity_post, p.run.herald.purity_post, p.run.worst.min_eigenvalue});
    out.scalars.push_back({tag("F_master", p.gamma_khz), p.run.final_fidelity});
    out.scalars.push_back({tag("F_theory", p.gamma_khz), decay * ref.final_fidelity});
    out.scalars.push_back({tag("P_s", p.gamma_khz), p.run.herald.p_success});
    out.scalars.push_back({tag("F_prime", p.gamma_khz), p.run.herald.fidelity_post});
    out.scalars.push_back({tag("purity", p.gamma_khz), p.run.herald.purity_post});
  }

  ResultTable ser{series_name,
                  {{"t", "T"}, {"t_us", "us"}, {"F_gamma0", "1"}, {"F_theory", "1"}, {"F_master", "1"}},
                  {}};
  const double gamma_c = gamma_dimensionless(series_gamma, T_s);
  for (size_t i = 0; i < ref.times.size(); ++i) {
    const double t = ref.times[i];
    ser.add_row({t, t * T_s * 1e6, ref.fidelity[i], std::exp(-gamma_c * t) * ref.fidelity[i], series->fidelity[i]});
  }
  out.tables.push_back(std::move(ser));
  out.tables.push_back(std::move(fin));

  double worst_herm = 0, worst_trace = 0, min_eig = 1;
  for (const auto& p : points) {
    worst_herm = std::max(worst_herm, p.run.worst.hermiticity);
    worst_trace = std::max(worst_trace, p.run.worst.trace_error);
    min_eig = std::min(min_eig, p.run.worst.min_eigenvalue);
  }
  out.scalars.push_back({"max_hermiticity_error", worst_herm});
  out.scalars.push_back({"max_trace_error", worst_trace});
  out.scalars.push_back({"min_eigenvalue", min_eig});
}

GateSchedule schedule_for(GateChoice g, double chi0, double omega3_tilde) {
  if (g == GateChoice::cnot) {
    GateSchedule s = GateSchedule::cnot_gate(chi0);
    s.omega3_tilde = omega3_tilde;
    return s;
  }
  return GateSchedule::not_gate(chi0);
}

ResultTable error_sweep_table(const std::string& name, GateChoice g, const PhysicalParams& params,
                              const ExperimentConfig& config, const std::vector<double>& chi0s, RunOutput& out) {
  const GateKind kind = kind_of(g);
  const int steps = config.steps > 0 ? config.steps : default_steps(kind, params.level);
  const size_t n_eps = config.epsilons.size();
  const int n = static_cast<int>(chi0s.size() * n_eps);
  std::vector<double> advisories(static_cast<size_t>(n));
  const auto fids = parallel_map<double>(n, config.threads, [&](int i) {
    const double chi0 = chi0s[static_cast<size_t>(i) / n_eps];
    const double eps = config.epsilons[static_cast<size_t>(i) % n_eps];
    const GateRun r = run_gate(schedule_for(g, chi0, config.omega3_tilde), params, eps, steps, 1);
    advisories[static_cast<size_t>(i)] = r.advisory;
    return r.final_fidelity;
  });
  for (double a : advisories) check_advisory(out, a, "propagator");

  const double scale = amplitude_scale(params.level, 1.0) - 1.0;
  ResultTable t{name, {{"chi0", "1"}, {"epsilon", "1"}, {"epsilon_tilde", "1"}, {"F_avg", "1"}}, {}};
  for (size_t c = 0; c < chi0s.size(); ++c) {
    double lo = 2.0, hi = -1.0, arg_hi = 0.0;
    for (size_t e = 0; e < n_eps; ++e) {
      const double f = fids[c * n_eps + e];
      const double eps = config.epsilons[e];
      t.add_row({chi0s[c], eps, scale * eps, f});
      lo = std::min(lo, f);
      if (f > hi) {
        hi = f;
        arg_hi = eps;
      }
      out.scalars.push_back({tag(tag("F_avg", chi0s[c]), eps), f});
    }
    out.scalars.push_back({tag("min_F_avg", chi0s[c]), lo});
    out.scalars.push_back({tag("max_F_avg", chi0s[c]), hi});
    out.scalars.push_back({tag("argmax_epsilon", chi0s[c]), arg_hi});
  }
  return t;
}

}  // namespace

RunOutput run_not_gate(const ExperimentConfig& config) {
  config.validate();
  return single_qubit_run(config, GateSchedule::not_gate(config.chi0));
}

RunOutput run_single_gate(const ExperimentConfig& config) {
  config.validate();
  return single_qubit_run(config, GateSchedule::single_gate(config.theta_s, config.theta1, config.phi1, config.chi0));
}

RunOutput run_cnot_gate(const ExperimentConfig& config) {
  config.validate();
  const GateSchedule gate = schedule_for(GateChoice::cnot, config.chi0, config.omega3_tilde);
  const PhysicalParams params = with_level(config.params, config.level);
  const int steps = config.steps > 0 ? config.steps : default_steps(GateKind::two_qubit, config.level);
  const double T_s = t_phys(params);
  RunOutput out;
  out.scalars.push_back({"T_us", T_s * 1e6});
  const GateRun run = run_gate(gate, params, config.epsilon, steps, config.snapshots);
  check_advisory(out, run.advisory, "propagator");
  out.tables.push_back(fidelity_table("fig5a", run.times, run.fidelity, T_s));
  out.scalars.push_back({"F_avg", run.final_fidelity});
  const HaarEstimate haar = haar_average_oracle(run.m, kHaarSamples, config.seed);
  out.scalars.push_back({"F_avg_haar", haar.mean});
  out.scalars.push_back({"F_avg_haar_stderr", haar.std_error});
  if (!config.epsilons.empty()) {
    out.tables.push_back(error_sweep_table("fig5b", GateChoice::cnot, params, config, {config.chi0}, out));
  }
  if (!config.gammas_khz.empty()) {
    gamma_tables(gate, params, config, "fig5c", "fig5d", out);
  } else if (config.gamma_khz > 0.0) {
    master_scalars(gate, params, config, out);
  }
  return out;
}

RunOutput run_error_sweep(const ExperimentConfig& config) {
  config.validate();
  const PhysicalParams params = with_level(config.params, config.level);
  RunOutput out;
  std::string name = "fig5b";
  if (config.gate == GateChoice::not_gate) {
    const bool effective = config.level == ModelLevel::effective || config.level == ModelLevel::two_qubit_rwa;
    name = effective ? "fig3d" : "fig4b";
  }
  const std::vector<double> chi0s = config.chi0_values.empty() ? std::vector<double>{config.chi0} : config.chi0_values;
  out.tables.push_back(error_sweep_table(name, config.gate, params, config, chi0s, out));
  return out;
}

RunOutput run_gamma_sweep(const ExperimentConfig& config) {
  config.validate();
  const PhysicalParams params = with_level(config.params, config.level);
  RunOutput out;
  out.scalars.push_back({"T_us", t_phys(params) * 1e6});
  if (config.gate == GateChoice::cnot) {
    gamma_tables(schedule_for(GateChoice::cnot, config.chi0, config.omega3_tilde), params, config, "fig5c", "fig5d",
                 out);
  } else {
    gamma_tables(GateSchedule::not_gate(config.chi0), params, config, "fig4c", "fig4d", out);
  }
  return out;
}

RunOutput run_qs_map(const ExperimentConfig& config) {
  config.validate();
  const int steps = config.steps > 0 ? config.steps : kQsSteps;
  const auto& thetas = config.qs_theta_over_pi;
  const auto& chis = config.qs_chi0;
  const int n = static_cast<int>(thetas.size() * chis.size());
  const auto qs = parallel_map<double>(n, config.threads, [&](int i) {
    LoopSchedule s;
    s.theta_s = kPi * thetas[static_cast<size_t>(i) % thetas.size()];
    s.chi0 = chis[static_cast<size_t>(i) / thetas.size()];
    return systematic_error_sensitivity(s, steps);
  });
  RunOutput out;
  ResultTable t{"fig3a", {{"theta_s_over_pi", "1"}, {"chi0", "1"}, {"Q_s", "1"}, {"Q_s_closed", "1"}}, {}};
  double max_diff = 0.0, max_unit_row = 0.0;
  for (size_t c = 0; c < chis.size(); ++c) {
    for (size_t k = 0; k < thetas.size(); ++k) {
      const double q = qs[c * thetas.size() + k];
      const double closed = qs_closed_form(chis[c], kPi * thetas[k]);
      t.add_row({thetas[k], chis[c], q, closed});
      max_diff = std::max(max_diff, std::abs(q - closed));
      if (chis[c] == 1.0) max_unit_row = std::max(max_unit_row, q);
    }
  }
  out.tables.push_back(std::move(t));
  LoopSchedule nominal;
  out.scalars.push_back({"Q_s_chi0_1_theta_pi", systematic_error_sensitivity(nominal, steps)});
  out.scalars.push_back({"max_abs_closed_form_diff", max_diff});
  out.scalars.push_back({"max_Q_s_chi0_1", max_unit_row});
  return out;
}

RunOutput run_tables(const ExperimentConfig& config) {
  config.validate();
  RunOutput out;
  struct Spec {
    const char* name;
    GateChoice gate;
    std::vector<double> gammas;
  };
  const Spec specs[] = {{"table1", GateChoice::not_gate, {0.0, 1.0, 2.0, 3.0, 4.0}},
                        {"table2", GateChoice::cnot, {0.0, 1.0, 2.0}}};
  for (const auto& s : specs) {
    const PhysicalParams params =
        with_level(PhysicalParams::preset(s.gate == GateChoice::cnot ? "two-qubit-paper" : "single-qubit-paper"),
                   config.level);
    const GateSchedule gate = schedule_for(s.gate, config.chi0, config.omega3_tilde);
    const int steps = config.master_steps > 0 ? config.master_steps : default_master_steps(gate.kind, params.level);
    const auto points = gamma_runs(gate, params, s.gammas, steps, 1, config.threads);
    ResultTable t{s.name, {{"gamma_kHz", "kHz"}, {"P_s", "1"}, {"F_prime", "1"}, {"purity", "1"}}, {}};
    for (const auto& p : points) {
      check_advisory(out, p.run.advisory, "master equation");
      t.add_row({p.gamma_khz, p.run.herald.p_success, p.run.herald.fidelity_post, p.run.herald.purity_post});
      out.scalars.push_back({std::string(s.name) + "." + tag("F", p.gamma_khz), p.run.final_fidelity});
      out.scalars.push_back({std::string(s.name) + "." + tag("min_eigenvalue", p.gamma_khz),
                             p.run.worst.min_eigenvalue});
    }
    out.tables.push_back(std::move(t));
  }
  return out;
}

RunOutput run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case Experiment::not_gate: return run_not_gate(config);
    case Experiment::single_gate_custom: return run_single_gate(config);
    case Experiment::cnot_gate: return run_cnot_gate(config);
    case Experiment::error_sweep: return run_error_sweep(config);
    case Experiment::gamma_sweep: return run_gamma_sweep(config);
    case Experiment::qs_map: return run_qs_map(config);
    case Experiment::tables: return run_tables(config);
  }
  throw ConfigError("unhandled experiment");
}

namespace {

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) now = static_cast<std::time_t>(std::atoll(epoch));
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string hex_hash(const std::string& s) {
  std::ostringstream out;
  out << std::hex << std::hash<std::string>{}(s);
  return out.str();
}

}  // namespace

std::vector<std::filesystem::path> emit_outputs(const RunOutput& out, const ExperimentConfig& config,
                                                const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io::IoError("cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  for (const auto& t : out.tables) written.push_back(io::write_csv(t, dir));

  const std::string config_text = config.to_document().serialize();
  const PhysicalParams p = with_level(config.params, config.level);
  const GateKind kind = config.experiment == Experiment::cnot_gate ? GateKind::two_qubit : kind_of(config.gate);
  nlohmann::ordered_json j;
  j["experiment"] = to_string(config.experiment);
  nlohmann::ordered_json scalars = nlohmann::ordered_json::object();
  for (const auto& s : out.scalars) scalars[s.name] = s.value;
  j["scalars"] = scalars;
  j["warnings"] = out.warnings;
  j["resolved"] = {
      {"preset", config.preset},
      {"model_level", to_string(config.level)},
      {"V", p.V},
      {"delta1", p.detunings.d1},
      {"delta2", p.detunings.d2},
      {"delta3", p.detunings.d3},
      {"stark_compensation", p.stark_compensation},
      {"stark_fraction", p.stark_fraction},
      {"gamma_khz", config.gamma_khz},
      {"T_us", t_phys(p) * 1e6},
      {"steps", config.steps > 0 ? config.steps : default_steps(kind, config.level)},
      {"master_steps", config.master_steps > 0 ? config.master_steps : default_master_steps(kind, config.level)},
      {"threads", resolve_threads(config.threads)},
  };
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& w : written) files.push_back(w.filename().string());
  j["provenance"] = {
      {"code_version", RYDNHQC_VERSION},
      {"config_hash", hex_hash(config_text)},
      {"timestamp_utc", utc_timestamp()},
      {"files", files},
  };
  j["config"] = config_text;
  const auto summary = dir / "summary.json";
  io::write_text(summary, j.dump(2) + "\n");
  written.push_back(summary);
  return written;
}

}  // namespace rydnhqc
