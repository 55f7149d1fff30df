#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "rydnhqc/control.hpp"
#include "rydnhqc/hilbert.hpp"

namespace rydnhqc {

/// Invariant I = lx sx + ly sy + lz sz of a driven block and its eigenvectors,
/// written on the ordered pair (lower, upper) = (|0r>, |r+>)-type kets.
struct InvariantFrame {
  double beta1 = 0;
  double beta2 = 0;
  std::array<double, 3> lambda{};  // (lx, ly, lz), unit norm
  Vector phi_plus;                 // eigenvalue +1
  Vector phi_minus;                // eigenvalue -1
};

InvariantFrame invariant_frame(double beta1, double beta2);

/// 2x2 matrix of the invariant in the (lower, upper) block basis.
Matrix invariant_operator(double beta1, double beta2);

/// Block Pauli matrices sx = |lower><upper| + h.c., sy = -i|lower><upper| + h.c.,
/// sz = |lower><lower| - |upper><upper|, all as 2x2.
std::array<Matrix, 3> block_paulis();

enum class Block { single, two_qubit_s1, two_qubit_s2 };

/// The ordered pair spanning a driven block, embedded in the full space:
/// single: (|0r>, |r+>); S1: (|0r->, |r+->); S2: (|0-r>, |r-+>).
struct BlockKets {
  StateVector lower;
  StateVector upper;
};
BlockKets block_kets(const Basis& basis, const Dressing& dressing, Block block);

/// Invariant eigenvectors (phi_plus, phi_minus) embedded in the full space.
std::pair<StateVector, StateVector> invariant_eigenvectors(double beta1, double beta2,
                                                           const BlockKets& kets);

struct PhaseRates {
  double vartheta_plus = 0, vartheta_minus = 0;
  double theta_plus = 0, theta_minus = 0;
};

/// Raw rates; throws when cos(beta1) = 0 with nonzero beta2_dot.
PhaseRates phase_rates(double beta1, double beta2_dot);
/// Rates with beta2_dot * tan(beta1) supplied as a product.
PhaseRates phase_rates_product(double beta1, double beta2_dot, double beta2_dot_tan);

/// Dynamic and geometric phases of phi_- sampled on a uniform grid. Values at
/// and after tau include the closed-form geometric jump theta_s.
struct PhaseRecord {
  std::vector<double> t;
  std::vector<double> beta1;
  std::vector<double> beta2;
  std::vector<double> vartheta_minus;
  std::vector<double> theta_minus;
  size_t tau_index = 0;
  double jump = 0;

  double alpha_minus(size_t i) const { return vartheta_minus[i] + theta_minus[i]; }
  /// One-sided limits at tau: the last node of [0, tau) carries pre-jump values.
  double theta_minus_before_tau() const { return theta_minus[tau_index] - jump; }
  double beta2_before_tau() const { return beta2[tau_index] + jump; }
};

/// Per-interval Simpson quadrature of the phase rates; n_steps is rounded up
/// to a multiple of 4 so each half carries an even number of intervals.
PhaseRecord accumulate_phases(const LoopSchedule& s, int n_steps = 200000);

/// e^{i theta_s/2} exp(i theta_s n.sigma/2) on {|0>, |1>} of atom 1.
Matrix target_single_gate(double theta_s, double theta1, double phi1);

/// Controlled rotation on {|00>, |01>, |10>, |11>} (atom 1 major):
/// |++><++| + e^{i tb1}|+-><+-| + e^{i tb2}|-+><-+| + |--><--|.
Matrix target_two_qubit_gate(double theta_bar_1, double theta_bar_2, const Dressing& d);

/// Ideal gate of a schedule on the computational kets.
Matrix target_gate(const GateSchedule& g);

/// |r>_0<r| (x) U + |0>_0<0| (x) 1, with U acting on the {0,1} levels of the
/// computational atoms and trivially on their Rydberg levels.
Operator comparator(const Basis& basis, const Matrix& gate);

/// [Tr(M M^dag) + |Tr M|^2] / (n (n + 1)).
double average_fidelity(const Matrix& m, int n_dim);

/// M = P_c U_target^dag U P_c restricted to the computational kets, given the
/// evolved computational kets as columns.
Matrix fidelity_matrix(const Operator& target, const std::vector<StateVector>& comp,
                       const Matrix& evolved_columns);

struct HaarEstimate {
  double mean = 0;
  double std_error = 0;
};

/// Monte-Carlo average of |<psi|M|psi>|^2 over normalized complex Gaussian
/// states. Deterministic for a given seed.
HaarEstimate haar_average_oracle(const Matrix& m, int64_t n_samples, uint64_t seed);

struct HeraldedMetrics {
  double p_success = 0;
  double fidelity_post = 0;
  double purity_post = 0;
};

class HeraldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Success probability Tr[P_r rho], post-selected fidelity against
/// target rho0 target^dag, and post-selected purity.
HeraldedMetrics heralded_metrics(const Matrix& rho_final, const Operator& target,
                                 const Matrix& rho0, const Basis& basis);

}  // namespace rydnhqc
