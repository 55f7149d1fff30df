#pragma once

#include <array>
#include <string>
#include <vector>

#include "rydnhqc/control.hpp"
#include "rydnhqc/hilbert.hpp"

namespace rydnhqc {

enum class ModelLevel { full_lab, blockade_frame, effective, two_qubit_rwa };

/// "L0".."L3"; throws std::invalid_argument on anything else.
ModelLevel parse_model_level(const std::string& s);
std::string to_string(ModelLevel level);

/// Rates in units of 1/T.
struct PhysicalParams {
  double V = 7200.0;
  Detunings detunings{};
  double gamma = 0.0;
  bool stark_compensation = true;
  /// Fraction of the Stark shift cancelled when compensation is on.
  double stark_fraction = 1.0;
  ModelLevel level = ModelLevel::full_lab;

  /// V = 7200, Delta_1 = 360, half of the Stark shift compensated.
  static PhysicalParams single_qubit_paper();
  /// V = 27000, Delta_2 = 360, Delta_3 = 1500.
  static PhysicalParams two_qubit_paper();
  /// By name: "single-qubit-paper" or "two-qubit-paper".
  static PhysicalParams preset(const std::string& name);
  bool operator==(const PhysicalParams&) const = default;
};

struct LindbladSet {
  double gamma = 0;
  std::vector<Operator> operators;
  std::vector<std::string> labels;
};

/// L0 = sqrt(g)|0>_0<r|, L_{-k} = sqrt(g/2)|0>_k<r|, L_{+k} = sqrt(g/2)|1>_k<r|.
LindbladSet lindblad_ops(double gamma, const Basis& basis);

/// Lab-frame Hamiltonian with explicit e^{+-i Delta t} factors and the static
/// pair interaction V on every doubly excited pair.
Operator full_hamiltonian(double t, const LaserPulseSet& pulses, const PhysicalParams& params,
                          const Basis& basis, const Dressing& dressing);

/// Same couplings in the frame of exp(-i H_v t) with every matrix element that
/// touches a multiply excited state dropped.
Operator blockade_frame_hamiltonian(double t, const LaserPulseSet& pulses,
                                    const Basis& basis, const Dressing& dressing);

/// Second-order effective model written on dressed kets. Single-qubit layout:
/// Omega_e1 |r+><0r| + h.c.
Operator effective_hamiltonian(const EffectiveDrives& drives, const Basis& basis,
                               const Dressing& dressing);

/// Omega_e1 |r+-><0r-| + Omega_e2 |r-+><0-r| + h.c. (two-qubit layout only).
Operator two_qubit_rwa_hamiltonian(const EffectiveDrives& drives, const Basis& basis,
                                   const Dressing& dressing);

/// Diagonal counter-term that cancels the blockade-induced Stark shifts of
/// every singly excited dressed state. A drive on an atom sitting in its
/// drivable level (|0>_0, |+>_k) while another atom is in |r> shifts the state
/// by -2 V bar-Omega^2 / (V^2 - Delta^2); the returned operator is minus the
/// total shift.
Operator stark_compensation(const LaserPulseSet& pulses, const PhysicalParams& params,
                            const Basis& basis, const Dressing& dressing);

/// V = C6 / d^6.
double interaction_from_distance(double c6, double d);

/// T = v_dimensionless / v_phys (seconds when v_phys is in rad/s).
double physical_time(double v_phys, double v_dimensionless);

inline constexpr double kDefaultVPhys = 2.0 * kPi * 50e6;

/// gamma in kHz (10^3 / s) expressed in units of 1/T.
double gamma_dimensionless(double gamma_khz, double t_seconds);

/// Gate Hamiltonian at any model level with all static pieces precomputed.
/// `amplitude_scale` multiplies every laser Rabi amplitude (1 + eps) for the
/// lab-frame levels and every effective coupling (1 + eps_tilde) for L2/L3.
/// The Stark compensator follows the scaled pulses.
class GateHamiltonian {
 public:
  GateHamiltonian(const GateSchedule& gate, const PhysicalParams& params,
                  double amplitude_scale = 1.0);

  const Basis& basis() const { return basis_; }
  int dim() const { return basis_.dim(); }
  const GateSchedule& gate() const { return gate_; }
  const PhysicalParams& params() const { return params_; }

  void evaluate(double t, Operator& out) const;
  Operator operator()(double t) const;

  /// Largest frequency scale of the model (spectral width), for RK4 step advisories.
  double max_frequency() const;
  /// Fastest explicit time dependence; what the exponential midpoint rule has to resolve.
  double drive_frequency() const;

 private:
  struct Coupling {
    Operator op;  // lowering-type operator; H gets c op + conj(c) op^dag
    int group;    // pulse group index, see hamiltonians.cpp
  };

  void evaluate_lab(double t, Operator& out) const;
  void evaluate_effective(double t, Operator& out) const;

  GateSchedule gate_;
  PhysicalParams params_;
  double amplitude_scale_;
  Basis basis_;
  Operator static_;
  std::vector<Coupling> couplings_;
  std::array<Operator, 6> stark_kernels_;
  std::array<Operator, 3> effective_ops_;
};

}  // namespace rydnhqc
