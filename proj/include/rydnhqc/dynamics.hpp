#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rydnhqc/hamiltonians.hpp"
#include "rydnhqc/hilbert.hpp"

namespace rydnhqc {

using DensityMatrix = Matrix;

/// Time-dependent Hermitian operator filled in place.
struct HamiltonianSource {
  int dim = 0;
  std::function<void(double, Operator&)> fill;

  Operator operator()(double t) const {
    Operator h(dim, dim);
    fill(t, h);
    return h;
  }
};

HamiltonianSource as_source(const GateHamiltonian& h);
/// Wraps a constant operator.
HamiltonianSource constant_source(const Operator& h);

/// Uniform grid; observers fire every `stride` steps and at the last step.
struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  int n_steps = 1000;
  int stride = 1;

  double step() const { return (t_end - t_start) / n_steps; }
  double time(int i) const;
  bool samples(int i) const { return i % stride == 0 || i == n_steps; }

  /// Stride chosen so that at most `max_snapshots` + 1 instants are sampled.
  static TimeGrid uniform(double t_start, double t_end, int n_steps, int max_snapshots = 2000);
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Matrix> states;
  std::map<std::string, std::vector<double>> observables;
};

class StepSizeWarning : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Returns h * f_max; callers decide whether to escalate values above 0.1.
double step_advisory(const TimeGrid& grid, double f_max);

/// exp(-i h H) X by a truncated Taylor series, with the step split until
/// ||h H||_1 <= 1/2. Accurate to machine precision.
void apply_exponential(const Operator& h_times_dt, Matrix& x, Matrix& work1, Matrix& work2);

using BlockObserver = std::function<void(int step, double t, const Matrix& x)>;

/// Exponential-midpoint propagation of a block of state columns.
Matrix propagate_columns(const HamiltonianSource& h, const TimeGrid& grid, Matrix x0,
                         const BlockObserver& observe = {});

/// U(t_end, t_start) from the identity.
Matrix propagate_unitary(const HamiltonianSource& h, const TimeGrid& grid,
                         const BlockObserver& observe = {});

using DensityObserver = std::function<void(int step, double t, const DensityMatrix& rho)>;

/// Classic RK4 on the Lindblad equation. `keep_states` stores every sampled
/// snapshot in the returned trajectory.
Trajectory evolve_master(const HamiltonianSource& h, const LindbladSet& lindblad,
                         const DensityMatrix& rho0, const TimeGrid& grid,
                         const DensityObserver& observe = {}, bool keep_states = false);

/// Projector onto the subspace reached by the effective dynamics from the
/// register states: every basis state with exactly one Rydberg excitation.
Operator herald_subspace_projector(const Basis& basis);

/// e^{-gamma t} U_e rho0 U_e^dag plus the leaked block
/// rho'(t) = int_0^t sum_i L_i rho_B(s) L_i^dag ds, with U_e propagated on
/// `grid` (even stride required) and the integral by composite Simpson.
Trajectory factorized_evolution(const DensityMatrix& rho0, const HamiltonianSource& h_eff,
                                const LindbladSet& lindblad, const Basis& basis,
                                const TimeGrid& grid);

/// e^{-gamma T}.
double success_probability(double T, double gamma);

/// Max |A - A^dag|, |Tr A - 1|, and min eigenvalue of the Hermitian part.
struct DensityDiagnostics {
  double hermiticity = 0;
  double trace_error = 0;
  double min_eigenvalue = 0;
};
DensityDiagnostics diagnose(const DensityMatrix& rho);

}  // namespace rydnhqc
