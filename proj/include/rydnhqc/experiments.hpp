#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rydnhqc/control.hpp"
#include "rydnhqc/dynamics.hpp"
#include "rydnhqc/hamiltonians.hpp"
#include "rydnhqc/holonomy.hpp"
#include "rydnhqc/io.hpp"

namespace rydnhqc {

enum class Experiment { not_gate, single_gate_custom, cnot_gate, error_sweep, gamma_sweep, qs_map, tables };

/// Accepts both "not_gate" and the CLI spelling "not-gate".
Experiment parse_experiment(const std::string& s);
std::string to_string(Experiment e);

/// Which gate a sweep runs.
enum class GateChoice { not_gate, cnot };
GateChoice parse_gate_choice(const std::string& s);
std::string to_string(GateChoice g);

struct ExperimentConfig {
  Experiment experiment = Experiment::not_gate;
  GateChoice gate = GateChoice::not_gate;
  ModelLevel level = ModelLevel::full_lab;
  std::string preset = "single-qubit-paper";
  PhysicalParams params = PhysicalParams::single_qubit_paper();

  // single_gate_custom rotation; not_gate and cnot_gate use the fixed targets
  double theta_s = kPi;
  double theta1 = kPi / 2;
  double phi1 = kPi;
  double chi0 = 1.0;
  double omega3_tilde = 100.0;

  double epsilon = 0.0;    // amplitudes scale by 1 + eps (1 + 2 eps on L2/L3)
  double gamma_khz = 0.0;  // single runs; master equation only when > 0
  int steps = 0;           // 0 selects the per-model default
  int master_steps = 0;
  int snapshots = 2000;

  std::vector<double> epsilons;
  std::vector<double> chi0_values;
  std::vector<double> gammas_khz;
  std::vector<double> qs_theta_over_pi;
  std::vector<double> qs_chi0;

  uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  bool strict = false;
  std::string out_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;

  /// Defaults matching an experiment (preset, gate, level and sweep grids).
  static ExperimentConfig defaults(Experiment e);
  /// Switches the gate of a sweep together with its default preset.
  void use_gate(GateChoice g);
  /// Throws io::ConfigError on out-of-range values.
  void validate() const;

  io::ConfigDocument to_document() const;
  /// Missing keys keep the values of defaults(experiment).
  static ExperimentConfig from_document(const io::ConfigDocument& doc);
};

/// Effective error coefficient: 2 eps on the effective models, eps otherwise.
double amplitude_scale(ModelLevel level, double epsilon);

/// Step counts used when the config leaves them at zero.
int default_steps(GateKind kind, ModelLevel level);
int default_master_steps(GateKind kind, ModelLevel level);

struct Scalar {
  std::string name;
  double value = 0;
};

struct RunOutput {
  std::vector<io::ResultTable> tables;
  std::vector<Scalar> scalars;
  std::vector<std::string> warnings;
  bool guard_violation = false;  // step advisory exceeded

  double scalar(const std::string& name) const;
  const io::ResultTable& table(const std::string& name) const;
};

/// Unitary gate run: average fidelity against the comparator at each snapshot.
struct GateRun {
  std::vector<double> times;
  std::vector<double> fidelity;
  double final_fidelity = 0;
  double advisory = 0;  // h * drive frequency
  Matrix m;             // fidelity matrix at T
};
GateRun run_gate(const GateSchedule& gate, const PhysicalParams& params, double epsilon, int steps,
                 int snapshots);

/// Master-equation run from the standard initial state of the gate:
/// |r0> for single-qubit gates, (|r00> + |r10>)/sqrt 2 for two-qubit gates.
struct MasterRun {
  std::vector<double> times;
  std::vector<double> fidelity;  // Tr[U rho0 U^dag rho(t)]
  double final_fidelity = 0;
  HeraldedMetrics herald;
  DensityDiagnostics worst;  // max hermiticity/trace error, min eigenvalue over snapshots
  double advisory = 0;       // h * spectral width
};
StateVector standard_initial_state(const Basis& basis);
MasterRun run_master(const GateSchedule& gate, const PhysicalParams& params, double gamma_dimless,
                     int steps, int snapshots);

RunOutput run_not_gate(const ExperimentConfig& config);
RunOutput run_single_gate(const ExperimentConfig& config);
RunOutput run_cnot_gate(const ExperimentConfig& config);
RunOutput run_error_sweep(const ExperimentConfig& config);
RunOutput run_gamma_sweep(const ExperimentConfig& config);
RunOutput run_qs_map(const ExperimentConfig& config);
RunOutput run_tables(const ExperimentConfig& config);
RunOutput run_experiment(const ExperimentConfig& config);

/// Runs fn(0..n-1) on at most `threads` workers (0: hardware concurrency);
/// results keep input order. The first exception is rethrown after all
/// workers stop.
template <class R>
std::vector<R> parallel_map(int n, int threads, const std::function<R(int)>& fn) {
  std::vector<R> out(static_cast<size_t>(std::max(n, 0)));
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::clamp(threads, 1, std::max(n, 1));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        out[static_cast<size_t>(i)] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

/// Writes every table as CSV plus summary.json (scalars, resolved config and
/// provenance). Returns the written paths.
std::vector<std::filesystem::path> emit_outputs(const RunOutput& out, const ExperimentConfig& config,
                                                const std::filesystem::path& dir);

}  // namespace rydnhqc
