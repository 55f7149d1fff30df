#include "rydnhqc/holonomy.hpp"

#include <cmath>
#include <random>

namespace rydnhqc {

InvariantFrame invariant_frame(double beta1, double beta2) {
  InvariantFrame f;
  f.beta1 = beta1;
  f.beta2 = beta2;
  const double s1 = std::sin(beta1);
  f.lambda = {s1 * std::sin(beta2), s1 * std::cos(beta2), std::cos(beta1)};
  const double c = std::cos(beta1 / 2.0);
  const double s = std::sin(beta1 / 2.0);
  f.phi_plus = Vector(2);
  f.phi_plus << c, kI * std::polar(1.0, -beta2) * s;
  f.phi_minus = Vector(2);
  f.phi_minus << kI * std::polar(1.0, beta2) * s, c;
  return f;
}

Matrix invariant_operator(double beta1, double beta2) {
  const auto p = block_paulis();
  const auto f = invariant_frame(beta1, beta2);
  return f.lambda[0] * p[0] + f.lambda[1] * p[1] + f.lambda[2] * p[2];
}

std::array<Matrix, 3> block_paulis() {
  Matrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, -kI, kI, 0;
  sz << 1, 0, 0, -1;
  return {sx, sy, sz};
}

BlockKets block_kets(const Basis& basis, const Dressing& dressing, Block block) {
  using level::aux_ground;
  using level::aux_rydberg;
  using level::rydberg;
  using dressed::minus;
  using dressed::plus;
  if (block == Block::single) {
    if (basis.n_atoms() != 2) throw LayoutError("single block needs the single-qubit layout");
    return {dressed_ket(basis, dressing, {aux_ground, rydberg}),
            dressed_ket(basis, dressing, {aux_rydberg, plus})};
  }
  if (basis.n_atoms() != 3) throw LayoutError("two-qubit blocks need the two-qubit layout");
  if (block == Block::two_qubit_s1) {
    return {dressed_ket(basis, dressing, {aux_ground, rydberg, minus}),
            dressed_ket(basis, dressing, {aux_rydberg, plus, minus})};
  }
  return {dressed_ket(basis, dressing, {aux_ground, minus, rydberg}),
          dressed_ket(basis, dressing, {aux_rydberg, minus, plus})};
}

std::pair<StateVector, StateVector> invariant_eigenvectors(double beta1, double beta2,
                                                           const BlockKets& kets) {
  const auto f = invariant_frame(beta1, beta2);
  return {f.phi_plus(0) * kets.lower + f.phi_plus(1) * kets.upper,
          f.phi_minus(0) * kets.lower + f.phi_minus(1) * kets.upper};
}

PhaseRates phase_rates(double beta1, double beta2_dot) {
  const double c = std::cos(beta1);
  if (beta2_dot != 0.0 && std::abs(c) < 1e-12) {
    throw ScheduleError("phase_rates: tan(beta1) singular; supply the product form");
  }
  const double product = beta2_dot == 0.0 ? 0.0 : beta2_dot * std::sin(beta1) / c;
  return phase_rates_product(beta1, beta2_dot, product);
}

PhaseRates phase_rates_product(double beta1, double beta2_dot, double beta2_dot_tan) {
  PhaseRates r;
  r.vartheta_minus = 0.5 * beta2_dot_tan * std::sin(beta1);
  r.vartheta_plus = -r.vartheta_minus;
  const double s = std::sin(beta1 / 2.0);
  r.theta_minus = -beta2_dot * s * s;
  r.theta_plus = -r.theta_minus;
  return r;
}

PhaseRecord accumulate_phases(const LoopSchedule& s, int n_steps) {
  if (n_steps < 1) throw ScheduleError("accumulate_phases needs at least one step");
  const int n = 4 * ((n_steps + 3) / 4);
  const double h = s.T / n;
  PhaseRecord rec;
  rec.tau_index = static_cast<size_t>(n / 2);
  rec.jump = s.theta_s;
  rec.t.resize(static_cast<size_t>(n) + 1);
  rec.beta1.resize(rec.t.size());
  rec.beta2.resize(rec.t.size());
  rec.vartheta_minus.assign(rec.t.size(), 0.0);
  rec.theta_minus.assign(rec.t.size(), 0.0);

  auto rates = [&](double t) {
    const auto p = sample_schedule(t, s);
    return phase_rates_product(p.beta1, p.beta2_dot, p.beta2_dot_tan);
  };

  PhaseRates left = rates(0.0);
  for (size_t i = 0; i < rec.t.size(); ++i) {
    const double t = (i == rec.t.size() - 1) ? s.T : static_cast<double>(i) * h;
    rec.t[i] = t;
    rec.beta1[i] = beta1(t, s);
    rec.beta2[i] = beta2(t, s);
    if (i == 0) continue;
    const PhaseRates mid = rates(t - 0.5 * h);
    const PhaseRates right = rates(t);
    rec.vartheta_minus[i] = rec.vartheta_minus[i - 1] +
                            h / 6.0 * (left.vartheta_minus + 4.0 * mid.vartheta_minus + right.vartheta_minus);
    rec.theta_minus[i] =
        rec.theta_minus[i - 1] + h / 6.0 * (left.theta_minus + 4.0 * mid.theta_minus + right.theta_minus);
    if (i == rec.tau_index) rec.theta_minus[i] += rec.jump;
    left = right;
  }
  return rec;
}

namespace {

Vector qubit_dressed(Sign sign, double theta, double phi) {
  return dressed_state(1, sign, theta, phi).head(2);
}

}  // namespace

Matrix target_single_gate(double theta_s, double theta1, double phi1) {
  const Vector p = qubit_dressed(Sign::plus, theta1, phi1);
  const Vector m = qubit_dressed(Sign::minus, theta1, phi1);
  return std::polar(1.0, theta_s) * p * p.adjoint() + m * m.adjoint();
}

Matrix target_two_qubit_gate(double theta_bar_1, double theta_bar_2, const Dressing& d) {
  const Vector p1 = qubit_dressed(Sign::plus, d.theta1, d.phi1);
  const Vector m1 = qubit_dressed(Sign::minus, d.theta1, d.phi1);
  const Vector p2 = qubit_dressed(Sign::plus, d.theta2, d.phi2);
  const Vector m2 = qubit_dressed(Sign::minus, d.theta2, d.phi2);
  auto proj = [](const Vector& a, const Vector& b) {
    const Vector v = kron(std::vector<Vector>{a, b});
    return Matrix(v * v.adjoint());
  };
  return proj(p1, p2) + std::polar(1.0, theta_bar_1) * proj(p1, m2) +
         std::polar(1.0, theta_bar_2) * proj(m1, p2) + proj(m1, m2);
}

Matrix target_gate(const GateSchedule& g) {
  if (g.kind == GateKind::single_qubit) {
    return target_single_gate(g.theta_s, g.dressing.theta1, g.dressing.phi1);
  }
  return target_two_qubit_gate(g.theta_bar_1, g.theta_bar_2, g.dressing);
}

Operator comparator(const Basis& basis, const Matrix& gate) {
  const int n_comp = basis.n_atoms() - 1;
  const int n_qubit = 1 << n_comp;
  if (gate.rows() != n_qubit || gate.cols() != n_qubit) {
    throw LayoutError("gate dimension does not match the layout");
  }
  int reg_dim = 1;
  for (int a = 1; a < basis.n_atoms(); ++a) reg_dim *= basis.levels(a);
  // Register index of each computational code, atom 1 major.
  std::vector<int> reg_index(static_cast<size_t>(n_qubit));
  for (int code = 0; code < n_qubit; ++code) {
    int idx = 0;
    for (int a = 0; a < n_comp; ++a) idx = idx * 3 + ((code >> (n_comp - 1 - a)) & 1);
    reg_index[static_cast<size_t>(code)] = idx;
  }
  Matrix reg = Matrix::Identity(reg_dim, reg_dim);
  for (int i = 0; i < n_qubit; ++i) {
    for (int j = 0; j < n_qubit; ++j) reg(reg_index[static_cast<size_t>(i)], reg_index[static_cast<size_t>(j)]) = gate(i, j);
  }
  Matrix pg = Matrix::Zero(2, 2);
  pg(level::aux_ground, level::aux_ground) = 1.0;
  Matrix pr = Matrix::Zero(2, 2);
  pr(level::aux_rydberg, level::aux_rydberg) = 1.0;
  return kron(std::vector<Matrix>{pr, reg}) +
         kron(std::vector<Matrix>{pg, Matrix::Identity(reg_dim, reg_dim)});
}

double average_fidelity(const Matrix& m, int n_dim) {
  if (m.rows() != n_dim || m.cols() != n_dim) throw LayoutError("average_fidelity: size mismatch");
  const double n = n_dim;
  return ((m * m.adjoint()).trace().real() + std::norm(m.trace())) / (n * (n + 1.0));
}

Matrix fidelity_matrix(const Operator& target, const std::vector<StateVector>& comp,
                       const Matrix& evolved_columns) {
  Matrix c(target.rows(), static_cast<Eigen::Index>(comp.size()));
  for (size_t j = 0; j < comp.size(); ++j) c.col(static_cast<Eigen::Index>(j)) = comp[j];
  return c.adjoint() * target.adjoint() * evolved_columns;
}

HaarEstimate haar_average_oracle(const Matrix& m, int64_t n_samples, uint64_t seed) {
  if (n_samples < 2) throw std::invalid_argument("haar_average_oracle needs >= 2 samples");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Eigen::Index n = m.rows();
  Vector psi(n);
  double sum = 0.0, sum_sq = 0.0;
  for (int64_t k = 0; k < n_samples; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) psi(i) = cplx(normal(rng), normal(rng));
    psi.normalize();
    const double v = std::norm(psi.dot(m * psi));
    sum += v;
    sum_sq += v * v;
  }
  const double ns = static_cast<double>(n_samples);
  const double mean = sum / ns;
  const double var = std::max(0.0, (sum_sq / ns - mean * mean) * ns / (ns - 1.0));
  return {mean, std::sqrt(var / ns)};
}

HeraldedMetrics heralded_metrics(const Matrix& rho_final, const Operator& target,
                                 const Matrix& rho0, const Basis& basis) {
  const Operator pr = projector_rydberg_aux(basis);
  const Matrix kept = pr * rho_final * pr;
  const double p = kept.trace().real();
  if (!(p >= 1e-12)) throw HeraldError("herald success probability below 1e-12");
  const Matrix ideal = target * rho0 * target.adjoint();
  HeraldedMetrics out;
  out.p_success = p;
  out.fidelity_post = (kept * ideal).trace().real() / p;
  out.purity_post = (kept * kept).trace().real() / (p * p);
  return out;
}

}  // namespace rydnhqc
