#pragma once

#include <array>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rydnhqc/hilbert.hpp"

namespace rydnhqc {

inline constexpr double kPi = std::numbers::pi;

class ScheduleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// One cyclic loop of the invariant parameters (beta1, beta2) on a driven
/// two-level block. beta1 = pi sin^2(pi t / T); beta2 jumps by -theta_s at
/// tau = T/2.
struct LoopSchedule {
  double theta_s = kPi;
  double chi0 = 1.0;
  double T = 1.0;

  double tau() const { return 0.5 * T; }
};

enum class GateKind { single_qubit, two_qubit };

/// Full control-parameter record of a gate.
struct GateSchedule {
  GateKind kind = GateKind::single_qubit;
  double theta_s = kPi;  // single-qubit geometric phase
  double chi0 = 1.0;
  Dressing dressing{};
  double T = 1.0;
  // two-qubit extras
  double theta_bar_1 = 0.0;
  double theta_bar_2 = kPi;
  double omega3_tilde = 100.0;

  double tau() const { return 0.5 * T; }

  /// Loop driving subspace j (1: S1 / single-qubit block, 2: S2).
  LoopSchedule loop(int j) const;
  /// A subspace whose target phase is zero is left undriven.
  bool drives(int j) const;

  static GateSchedule single_gate(double theta_s, double theta1, double phi1, double chi0 = 1.0);
  static GateSchedule not_gate(double chi0 = 1.0) { return single_gate(kPi, kPi / 2, kPi, chi0); }
  static GateSchedule two_qubit_gate(double theta_bar_1, double theta_bar_2, const Dressing& d,
                                     double omega3_tilde, double chi0 = 1.0);
  static GateSchedule cnot_gate(double chi0 = 1.0) {
    return two_qubit_gate(0.0, kPi, Dressing{0.0, 0.0, kPi / 2, kPi}, 100.0, chi0);
  }
};

double beta1(double t, const LoopSchedule& s);
double beta1_dot(double t, const LoopSchedule& s);
double beta2(double t, const LoopSchedule& s);
double beta2_dot(double t, const LoopSchedule& s);
double chi(double t, const LoopSchedule& s);

/// All schedule quantities at t. `beta2_dot_tan` is the product
/// beta2_dot * tan(beta1) in its removable-singularity form 4 chi0 sin^3(beta1) beta1_dot.
struct SchedulePoint {
  double beta1 = 0, beta1_dot = 0, beta2 = 0, beta2_dot = 0, beta2_dot_tan = 0;
};
SchedulePoint sample_schedule(double t, const LoopSchedule& s);

struct Controls {
  double omega_x = 0;
  double omega_y = 0;
};

/// Invariant-based inversion with a raw tangent. Throws when cos(beta1)
/// vanishes and beta2_dot does not.
Controls reverse_controls(double beta1, double beta1_dot, double beta2, double beta2_dot);
/// Same inversion with the product beta2_dot * tan(beta1) supplied.
Controls reverse_controls_product(double beta1_dot, double beta2, double beta2_dot_tan);
Controls controls_at(double t, const LoopSchedule& s);

struct EffectiveDrive {
  double envelope = 0;  // tilde Omega >= 0
  double phase = 0;     // mu

  cplx value() const { return std::polar(envelope, phase); }
};

/// Polar decomposition of omega_x + i omega_y; phase is 0 where the envelope is.
EffectiveDrive effective_drive(const Controls& c);

/// Removes 2 pi jumps from a sampled phase series.
std::vector<double> unwrap_phase(std::vector<double> phase);

/// Effective drives of the whole gate at one instant: d1, d2 couple the blocks
/// of atoms 1 and 2; d3 is the constant exchange drive (phase 0).
struct EffectiveDrives {
  EffectiveDrive d1{}, d2{}, d3{};
};
EffectiveDrives effective_drives_at(double t, const GateSchedule& g);

/// A +-Delta laser pair: `blue` multiplies e^{+i Delta t}, `red` e^{-i Delta t}.
struct PulsePair {
  cplx blue{};
  cplx red{};
  double envelope = 0;  // real bar-Omega
};

struct Detunings {
  double d1 = 360.0;
  double d2 = 360.0;
  double d3 = 1500.0;

  double of(int k) const { return k == 1 ? d1 : (k == 2 ? d2 : d3); }
  bool operator==(const Detunings&) const = default;
};

/// Lab-frame pulses at one instant. Index 0 refers to atom/pair 1, index 1 to 2.
struct LaserPulseSet {
  std::array<PulsePair, 2> atom{};   // Omega_k, Omega_k' on |+>_k<r|, detuning Delta_k
  std::array<PulsePair, 2> aux{};    // Omega_0k, Omega_0k' on |0>_0<r|, detuning Delta_k
  std::array<PulsePair, 2> third{};  // Omega_k3, Omega_k3' on |+>_k<r|, detuning Delta_3
  Detunings detunings{};

  /// Every Rabi amplitude multiplied by `factor` (systematic error 1 + eps).
  LaserPulseSet scaled(double factor) const;
};

/// Equal split bar-Omega_k = bar-Omega_0k = sqrt(tilde-Omega_k Delta_k / 2),
/// mu_k' = mu_k - pi, Omega_0k = Omega_0k' = -bar-Omega_0k; the Delta_3 pair
/// uses mu_3 = 0 on atom 1 and the real negative convention on atom 2.
LaserPulseSet lab_pulses(const EffectiveDrives& drives, const Detunings& detunings);

/// Second-order effective couplings of a lab pulse set:
/// Omega_e = (Omega' Omega_0'^* - Omega Omega_0^*) / Delta.
std::array<cplx, 3> effective_couplings(const LaserPulseSet& p);

/// Systematic-error sensitivity from the first-order perturbation integral
/// |int e^{2 i alpha_-} <phi_+|H_s|phi_-> dt|^2 with alpha_- accumulated from the
/// phase rates. Composite Simpson on each half interval.
double systematic_error_sensitivity(const LoopSchedule& s, int n_steps = 200000);

/// The same quantity from the simplified integrand |int e^{i chi} beta1_dot sin^2 beta1 dt|^2.
double systematic_error_sensitivity_simplified(const LoopSchedule& s, int n_steps = 200000);

/// sin^2(chi0 pi) sin^2(theta_s / 2) / chi0^2, with the chi0 -> 0 limit.
double qs_closed_form(double chi0, double theta_s);

}  // namespace rydnhqc
