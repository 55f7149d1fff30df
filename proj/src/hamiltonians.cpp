#include "rydnhqc/hamiltonians.hpp"

#include <cmath>
#include <stdexcept>

namespace rydnhqc {

namespace {

// Pulse groups: 0/1 atom k on its Delta_k pair, 2/3 the auxiliary atom on the
// Delta_1/Delta_2 pair, 4/5 atom k on the Delta_3 pair.
constexpr int kGroups = 6;

int group_atom(int g) { return g == 2 || g == 3 ? 0 : (g % 2 == 0 ? 1 : 2); }

int group_detuning_index(int g) { return g >= 4 ? 3 : (g % 2 == 0 ? 1 : 2); }

const PulsePair& group_pulse(const LaserPulseSet& p, int g) {
  switch (g) {
    case 0: return p.atom[0];
    case 1: return p.atom[1];
    case 2: return p.aux[0];
    case 3: return p.aux[1];
    case 4: return p.third[0];
    default: return p.third[1];
  }
}

cplx group_coefficient(const LaserPulseSet& p, int g, double t) {
  const PulsePair& pp = group_pulse(p, g);
  const double d = p.detunings.of(group_detuning_index(g));
  return pp.blue * std::polar(1.0, d * t) + pp.red * std::polar(1.0, -d * t);
}

bool group_present(const Basis& basis, int g) { return group_atom(g) < basis.n_atoms(); }

// |+>_k<r| for computational atoms, |0>_0<r| for the auxiliary atom.
Operator lowering(const Basis& basis, const Dressing& dressing, int atom) {
  if (atom == 0) {
    Matrix m = Matrix::Zero(2, 2);
    m(level::aux_ground, level::aux_rydberg) = 1.0;
    return embed(basis, 0, m);
  }
  Matrix m = Matrix::Zero(3, 3);
  m.col(level::rydberg) = dressed_state(atom, Sign::plus, dressing.theta(atom), dressing.phi(atom));
  return embed(basis, atom, m);
}

Operator pair_interaction(const Basis& basis, double V) {
  Operator h = Operator::Zero(basis.dim(), basis.dim());
  for (int i = 0; i < basis.dim(); ++i) {
    const int n = basis.rydberg_count(i);
    h(i, i) = V * n * (n - 1) / 2.0;
  }
  return h;
}

void drop_multiply_excited(const Basis& basis, Operator& op) {
  for (int i = 0; i < basis.dim(); ++i) {
    if (basis.rydberg_count(i) >= 2) {
      op.row(i).setZero();
      op.col(i).setZero();
    }
  }
}

Operator lab_couplings(double t, const LaserPulseSet& pulses, const Basis& basis,
                       const Dressing& dressing) {
  Operator h = Operator::Zero(basis.dim(), basis.dim());
  for (int g = 0; g < kGroups; ++g) {
    if (!group_present(basis, g)) continue;
    const Operator a = lowering(basis, dressing, group_atom(g));
    const cplx c = group_coefficient(pulses, g, t);
    h += c * a + std::conj(c) * a.adjoint();
  }
  return h;
}

Matrix outer(const StateVector& a, const StateVector& b) { return a * b.adjoint(); }

// Operators multiplying Omega_e1, Omega_e2, Omega_e3.
std::array<Operator, 3> effective_operators(const Basis& basis, const Dressing& d, bool rwa) {
  using level::aux_ground;
  using level::aux_rydberg;
  using level::rydberg;
  constexpr int P = dressed::plus;
  constexpr int M = dressed::minus;
  const int n = basis.dim();
  std::array<Operator, 3> ops{Operator::Zero(n, n), Operator::Zero(n, n), Operator::Zero(n, n)};
  if (basis.n_atoms() == 2) {
    if (rwa) throw LayoutError("the two-qubit RWA model needs the two-qubit layout");
    ops[0] = outer(dressed_ket(basis, d, {aux_rydberg, P}), dressed_ket(basis, d, {aux_ground, rydberg}));
    return ops;
  }
  auto k = [&](std::initializer_list<int> labels) { return dressed_ket(basis, d, labels); };
  ops[0] = outer(k({aux_rydberg, P, M}), k({aux_ground, rydberg, M}));
  ops[1] = outer(k({aux_rydberg, M, P}), k({aux_ground, M, rydberg}));
  if (!rwa) {
    ops[0] += outer(k({aux_rydberg, P, P}), k({aux_ground, rydberg, P}));
    ops[1] += outer(k({aux_rydberg, P, P}), k({aux_ground, P, rydberg}));
    ops[2] = outer(k({aux_ground, rydberg, P}), k({aux_ground, P, rydberg}));
  }
  return ops;
}

Operator assemble_effective(const std::array<Operator, 3>& ops, const std::array<cplx, 3>& e) {
  Operator h = Operator::Zero(ops[0].rows(), ops[0].cols());
  for (size_t j = 0; j < 3; ++j) h += e[j] * ops[j] + std::conj(e[j]) * ops[j].adjoint();
  return h;
}

std::array<cplx, 3> drive_values(const EffectiveDrives& d) {
  return {d.d1.value(), d.d2.value(), d.d3.value()};
}

// Per-group diagonal kernels K_g with compensation = sum_g bar-Omega_g^2 K_g.
std::array<Operator, 6> stark_kernels(const PhysicalParams& params, const Basis& basis,
                                      const Dressing& dressing) {
  const int n = basis.dim();
  const Operator D = dressing_transform(basis, dressing);
  std::array<Operator, 6> out;
  for (int g = 0; g < kGroups; ++g) {
    out[static_cast<size_t>(g)] = Operator::Zero(n, n);
    if (!group_present(basis, g)) continue;
    const double delta = params.detunings.of(group_detuning_index(g));
    const double denom = params.V * params.V - delta * delta;
    if (denom == 0.0) throw std::domain_error("Stark shift pole: V equals a detuning");
    const double coeff = 2.0 * params.V / denom;
    const int atom = group_atom(g);
    const int drivable = atom == 0 ? level::aux_ground : dressed::plus;
    for (int i = 0; i < n; ++i) {
      if (basis.rydberg_count(i) != 1) continue;
      if (basis.tuple_of(i)[static_cast<size_t>(atom)] != drivable) continue;
      out[static_cast<size_t>(g)] += coeff * D.col(i) * D.col(i).adjoint();
    }
  }
  return out;
}

}  // namespace

ModelLevel parse_model_level(const std::string& s) {
  if (s == "L0" || s == "full_lab") return ModelLevel::full_lab;
  if (s == "L1" || s == "blockade_frame") return ModelLevel::blockade_frame;
  if (s == "L2" || s == "effective") return ModelLevel::effective;
  if (s == "L3" || s == "two_qubit_rwa") return ModelLevel::two_qubit_rwa;
  throw std::invalid_argument("unknown model level '" + s + "'");
}

std::string to_string(ModelLevel level) {
  switch (level) {
    case ModelLevel::full_lab: return "L0";
    case ModelLevel::blockade_frame: return "L1";
    case ModelLevel::effective: return "L2";
    case ModelLevel::two_qubit_rwa: return "L3";
  }
  return "?";
}

PhysicalParams PhysicalParams::single_qubit_paper() {
  PhysicalParams p;
  p.V = 7200.0;
  p.detunings = {360.0, 360.0, 1500.0};
  p.stark_fraction = 0.5;
  return p;
}

PhysicalParams PhysicalParams::two_qubit_paper() {
  PhysicalParams p;
  p.V = 27000.0;
  p.detunings = {360.0, 360.0, 1500.0};
  return p;
}

PhysicalParams PhysicalParams::preset(const std::string& name) {
  if (name == "single-qubit-paper") return single_qubit_paper();
  if (name == "two-qubit-paper") return two_qubit_paper();
  throw std::invalid_argument("unknown preset '" + name + "'");
}

LindbladSet lindblad_ops(double gamma, const Basis& basis) {
  if (gamma < 0.0) throw std::domain_error("decay rate must be non-negative");
  LindbladSet set;
  set.gamma = gamma;
  Matrix l0 = Matrix::Zero(2, 2);
  l0(level::aux_ground, level::aux_rydberg) = std::sqrt(gamma);
  set.operators.push_back(embed(basis, 0, l0));
  set.labels.push_back("L0");
  for (int k = 1; k < basis.n_atoms(); ++k) {
    for (int target : {level::one, level::zero}) {
      Matrix l = Matrix::Zero(3, 3);
      l(target, level::rydberg) = std::sqrt(gamma / 2.0);
      set.operators.push_back(embed(basis, k, l));
      set.labels.push_back((target == level::one ? "L+" : "L-") + std::to_string(k));
    }
  }
  return set;
}

Operator full_hamiltonian(double t, const LaserPulseSet& pulses, const PhysicalParams& params,
                          const Basis& basis, const Dressing& dressing) {
  return pair_interaction(basis, params.V) + lab_couplings(t, pulses, basis, dressing);
}

Operator blockade_frame_hamiltonian(double t, const LaserPulseSet& pulses,
                                    const Basis& basis, const Dressing& dressing) {
  Operator h = lab_couplings(t, pulses, basis, dressing);
  drop_multiply_excited(basis, h);
  return h;
}

Operator effective_hamiltonian(const EffectiveDrives& drives, const Basis& basis,
                               const Dressing& dressing) {
  return assemble_effective(effective_operators(basis, dressing, false), drive_values(drives));
}

Operator two_qubit_rwa_hamiltonian(const EffectiveDrives& drives, const Basis& basis,
                                   const Dressing& dressing) {
  return assemble_effective(effective_operators(basis, dressing, true), drive_values(drives));
}

Operator stark_compensation(const LaserPulseSet& pulses, const PhysicalParams& params,
                            const Basis& basis, const Dressing& dressing) {
  const auto kernels = stark_kernels(params, basis, dressing);
  Operator out = Operator::Zero(basis.dim(), basis.dim());
  for (int g = 0; g < kGroups; ++g) {
    const double env = group_pulse(pulses, g).envelope;
    out += env * env * kernels[static_cast<size_t>(g)];
  }
  return out;
}

double interaction_from_distance(double c6, double d) {
  if (!(d > 0.0)) throw std::domain_error("distance must be positive");
  return c6 / std::pow(d, 6);
}

double physical_time(double v_phys, double v_dimensionless) { return v_dimensionless / v_phys; }

double gamma_dimensionless(double gamma_khz, double t_seconds) { return gamma_khz * 1e3 * t_seconds; }

GateHamiltonian::GateHamiltonian(const GateSchedule& gate, const PhysicalParams& params,
                                 double amplitude_scale)
    : gate_(gate),
      params_(params),
      amplitude_scale_(amplitude_scale),
      basis_(gate.kind == GateKind::single_qubit ? SystemLayout::single_qubit()
                                                 : SystemLayout::two_qubit()) {
  const int n = basis_.dim();
  static_ = Operator::Zero(n, n);
  switch (params_.level) {
    case ModelLevel::full_lab:
    case ModelLevel::blockade_frame:
      if (params_.level == ModelLevel::full_lab) static_ = pair_interaction(basis_, params_.V);
      for (int g = 0; g < kGroups; ++g) {
        if (!group_present(basis_, g)) continue;
        Operator a = lowering(basis_, gate_.dressing, group_atom(g));
        if (params_.level == ModelLevel::blockade_frame) drop_multiply_excited(basis_, a);
        couplings_.push_back({std::move(a), g});
      }
      if (params_.level == ModelLevel::full_lab && params_.stark_compensation) {
        stark_kernels_ = stark_kernels(params_, basis_, gate_.dressing);
      }
      break;
    case ModelLevel::effective:
    case ModelLevel::two_qubit_rwa:
      effective_ops_ = effective_operators(basis_, gate_.dressing,
                                           params_.level == ModelLevel::two_qubit_rwa);
      break;
  }
}

void GateHamiltonian::evaluate(double t, Operator& out) const {
  if (params_.level == ModelLevel::full_lab || params_.level == ModelLevel::blockade_frame) {
    evaluate_lab(t, out);
  } else {
    evaluate_effective(t, out);
  }
}

Operator GateHamiltonian::operator()(double t) const {
  Operator h(dim(), dim());
  evaluate(t, h);
  return h;
}

void GateHamiltonian::evaluate_lab(double t, Operator& out) const {
  const LaserPulseSet pulses =
      lab_pulses(effective_drives_at(t, gate_), params_.detunings).scaled(amplitude_scale_);
  out = static_;
  for (const auto& c : couplings_) {
    const cplx v = group_coefficient(pulses, c.group, t);
    if (v == cplx(0.0)) continue;
    out.noalias() += v * c.op;
    out.noalias() += std::conj(v) * c.op.adjoint();
  }
  if (params_.level == ModelLevel::full_lab && params_.stark_compensation) {
    for (int g = 0; g < kGroups; ++g) {
      const double env = group_pulse(pulses, g).envelope;
      if (env == 0.0 || !group_present(basis_, g)) continue;
      out.noalias() += (params_.stark_fraction * env * env) * stark_kernels_[static_cast<size_t>(g)];
    }
  }
}

void GateHamiltonian::evaluate_effective(double t, Operator& out) const {
  const EffectiveDrives d = effective_drives_at(t, gate_);
  const std::array<cplx, 3> e = drive_values(d);
  out.setZero(dim(), dim());
  for (size_t j = 0; j < 3; ++j) {
    const cplx v = amplitude_scale_ * e[j];
    if (v == cplx(0.0)) continue;
    out.noalias() += v * effective_ops_[j];
    out.noalias() += std::conj(v) * effective_ops_[j].adjoint();
  }
}

double GateHamiltonian::max_frequency() const {
  const auto& d = params_.detunings;
  const double delta_max = std::max({d.d1, d.d2, d.d3});
  switch (params_.level) {
    case ModelLevel::full_lab: {
      const int n = basis_.n_atoms();
      return params_.V * n * (n - 1) / 2.0 + delta_max;
    }
    case ModelLevel::blockade_frame: return delta_max;
    default: return std::max(gate_.omega3_tilde, 25.0) * std::max(1.0, amplitude_scale_);
  }
}

double GateHamiltonian::drive_frequency() const {
  const auto& d = params_.detunings;
  if (params_.level == ModelLevel::full_lab || params_.level == ModelLevel::blockade_frame) {
    return std::max({d.d1, d.d2, d.d3});
  }
  return max_frequency();
}

}  // namespace rydnhqc
