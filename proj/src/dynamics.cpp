#include "rydnhqc/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>

namespace rydnhqc {

HamiltonianSource as_source(const GateHamiltonian& h) {
  return {h.dim(), [&h](double t, Operator& out) { h.evaluate(t, out); }};
}

HamiltonianSource constant_source(const Operator& h) {
  return {static_cast<int>(h.rows()), [h](double, Operator& out) { out = h; }};
}

double TimeGrid::time(int i) const {
  if (i == n_steps) return t_end;
  return t_start + step() * i;
}

TimeGrid TimeGrid::uniform(double t_start, double t_end, int n_steps, int max_snapshots) {
  if (n_steps < 1) throw std::invalid_argument("time grid needs at least one step");
  if (max_snapshots < 1) throw std::invalid_argument("time grid needs at least one snapshot");
  TimeGrid g{t_start, t_end, n_steps, 1};
  g.stride = (n_steps + max_snapshots - 1) / max_snapshots;
  return g;
}

double step_advisory(const TimeGrid& grid, double f_max) { return std::abs(grid.step()) * f_max; }

namespace {

constexpr double kTaylorLimit = 2.0;

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void check_grid(const TimeGrid& grid) {
  if (grid.n_steps < 1 || grid.stride < 1) throw std::invalid_argument("invalid time grid");
}

// Nonzero entries (row, col, value) of each jump operator.
using SparseOp = std::vector<std::tuple<int, int, cplx>>;

std::vector<SparseOp> sparse_jumps(const LindbladSet& set) {
  std::vector<SparseOp> out;
  for (const auto& op : set.operators) {
    SparseOp s;
    for (Eigen::Index j = 0; j < op.cols(); ++j) {
      for (Eigen::Index i = 0; i < op.rows(); ++i) {
        if (op(i, j) != cplx(0.0)) s.emplace_back(static_cast<int>(i), static_cast<int>(j), op(i, j));
      }
    }
    if (!s.empty()) out.push_back(std::move(s));
  }
  return out;
}

void add_jumps(const std::vector<SparseOp>& jumps, const Matrix& rho, Matrix& out) {
  for (const auto& s : jumps) {
    for (const auto& [ra, ca, va] : s) {
      for (const auto& [rb, cb, vb] : s) out(ra, rb) += va * std::conj(vb) * rho(ca, cb);
    }
  }
}

}  // namespace

void apply_exponential(const Operator& generator, Matrix& x, Matrix& term, Matrix& next) {
  const double norm = generator.cwiseAbs().colwise().sum().maxCoeff();
  const int splits = std::max(1, static_cast<int>(std::ceil(norm / 0.5)));
  for (int s = 0; s < splits; ++s) {
    term = x;
    for (int k = 1; k < 40; ++k) {
      next.noalias() = generator * term;
      term = next / (static_cast<double>(k) * splits);
      x += term;
      if (max_abs(term) <= 1e-17 * max_abs(x)) break;
    }
  }
}

Matrix propagate_columns(const HamiltonianSource& h, const TimeGrid& grid, Matrix x0,
                         const BlockObserver& observe) {
  check_grid(grid);
  if (x0.rows() != h.dim) throw std::invalid_argument("state block does not match operator dimension");
  const double dt = grid.step();
  Operator hm(h.dim, h.dim);
  Operator gen(h.dim, h.dim);
  Matrix term(x0.rows(), x0.cols()), next(x0.rows(), x0.cols());
  if (observe) observe(0, grid.t_start, x0);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h.dim);
  for (int i = 0; i < grid.n_steps; ++i) {
    h.fill(grid.t_start + (i + 0.5) * dt, hm);
    if (std::abs(dt) * hm.cwiseAbs().colwise().sum().maxCoeff() > kTaylorLimit) {
      // Stiff step: diagonalize instead of splitting the Taylor series.
      eig.compute(hm);
      const Matrix& vecs = eig.eigenvectors();
      next.noalias() = vecs.adjoint() * x0;
      for (Eigen::Index k = 0; k < next.rows(); ++k) {
        next.row(k) *= std::polar(1.0, -dt * eig.eigenvalues()(k));
      }
      x0.noalias() = vecs * next;
    } else {
      gen = (-kI * dt) * hm;
      apply_exponential(gen, x0, term, next);
    }
    if (observe && grid.samples(i + 1)) observe(i + 1, grid.time(i + 1), x0);
  }
  return x0;
}

Matrix propagate_unitary(const HamiltonianSource& h, const TimeGrid& grid,
                         const BlockObserver& observe) {
  return propagate_columns(h, grid, Matrix::Identity(h.dim, h.dim), observe);
}

Trajectory evolve_master(const HamiltonianSource& h, const LindbladSet& lindblad,
                         const DensityMatrix& rho0, const TimeGrid& grid,
                         const DensityObserver& observe, bool keep_states) {
  check_grid(grid);
  const int n = h.dim;
  if (rho0.rows() != n || rho0.cols() != n) throw std::invalid_argument("rho0 dimension mismatch");
  const auto jumps = sparse_jumps(lindblad);
  Operator loss = Operator::Zero(n, n);
  for (const auto& l : lindblad.operators) loss += l.adjoint() * l;
  const Operator damping = (-0.5 * kI) * loss;

  auto heff = [&](double t, Operator& out) {
    h.fill(t, out);
    out += damping;
  };
  Matrix a(n, n);
  auto rhs = [&](const Operator& he, const Matrix& rho, Matrix& out) {
    a.noalias() = he * rho;
    out = -kI * a;
    out += kI * a.adjoint();
    add_jumps(jumps, rho, out);
  };

  Trajectory traj;
  auto record = [&](int step, double t, const DensityMatrix& rho) {
    traj.times.push_back(t);
    traj.observables["trace"].push_back(rho.trace().real());
    if (keep_states) traj.states.push_back(rho);
    if (observe) observe(step, t, rho);
  };

  const double dt = grid.step();
  DensityMatrix rho = rho0;
  Operator h0(n, n), hmid(n, n), h1(n, n);
  Matrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), tmp(n, n);
  heff(grid.t_start, h0);
  record(0, grid.t_start, rho);
  for (int i = 0; i < grid.n_steps; ++i) {
    const double t = grid.t_start + i * dt;
    heff(t + 0.5 * dt, hmid);
    heff(t + dt, h1);
    rhs(h0, rho, k1);
    tmp = rho + (0.5 * dt) * k1;
    rhs(hmid, tmp, k2);
    tmp = rho + (0.5 * dt) * k2;
    rhs(hmid, tmp, k3);
    tmp = rho + dt * k3;
    rhs(h1, tmp, k4);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    std::swap(h0, h1);
    if (grid.samples(i + 1)) record(i + 1, grid.time(i + 1), rho);
  }
  return traj;
}

Operator herald_subspace_projector(const Basis& basis) {
  Operator p = Operator::Zero(basis.dim(), basis.dim());
  for (int i = 0; i < basis.dim(); ++i) {
    if (basis.rydberg_count(i) == 1) p(i, i) = 1.0;
  }
  return p;
}

Trajectory factorized_evolution(const DensityMatrix& rho0, const HamiltonianSource& h_eff,
                                const LindbladSet& lindblad, const Basis& basis,
                                const TimeGrid& grid) {
  check_grid(grid);
  if (grid.n_steps % 2 != 0 || grid.stride % 2 != 0) {
    throw std::invalid_argument("factorized_evolution needs an even step count and stride");
  }
  const Operator pb = herald_subspace_projector(basis);
  if (max_abs(pb * rho0 * pb - rho0) > 1e-10) {
    throw std::invalid_argument("rho0 has support outside the effective subspace");
  }
  const auto jumps = sparse_jumps(lindblad);
  const Operator pr = projector_rydberg_aux(basis);
  const int n = basis.dim();
  const double dt = grid.step();

  Trajectory traj;
  Matrix weighted = Matrix::Zero(n, n);  // sum of Simpson-weighted integrand values
  Matrix f(n, n);
  auto observe = [&](int step, double t, const Matrix& u) {
    const Matrix rho_b = std::exp(-lindblad.gamma * (t - grid.t_start)) * (u * rho0 * u.adjoint());
    f.setZero();
    add_jumps(jumps, rho_b, f);
    if (step % 2 == 0) {
      const Matrix leak = step == 0 ? Matrix(Matrix::Zero(n, n)) : Matrix((dt / 3.0) * (weighted + f));
      if (grid.samples(step)) {
        traj.times.push_back(t);
        traj.states.push_back(rho_b + leak);
        traj.observables["leak_trace"].push_back(leak.trace().real());
        traj.observables["leak_rydberg_aux"].push_back((pr * leak).trace().real());
      }
      weighted += (step == 0 ? 1.0 : 2.0) * f;
    } else {
      weighted += 4.0 * f;
    }
  };
  TimeGrid every = grid;
  every.stride = 1;
  propagate_columns(h_eff, every, Matrix::Identity(n, n), observe);
  return traj;
}

double success_probability(double T, double gamma) {
  if (T < 0.0 || gamma < 0.0) throw std::domain_error("success_probability needs T, gamma >= 0");
  return std::exp(-gamma * T);
}

DensityDiagnostics diagnose(const DensityMatrix& rho) {
  DensityDiagnostics d;
  d.hermiticity = hermiticity_error(rho);
  d.trace_error = std::abs(rho.trace() - 1.0);
  const Matrix herm = 0.5 * (rho + rho.adjoint());
  d.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Matrix>(herm, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return d;
}

}  // namespace rydnhqc
