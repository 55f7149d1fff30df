#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "rydnhqc/dynamics.hpp"
#include "rydnhqc/holonomy.hpp"

using namespace rydnhqc;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Operator random_hermitian(int n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

// exp(-i t H) from an eigendecomposition.
Matrix exact_propagator(const Operator& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases(h.rows());
  for (Eigen::Index k = 0; k < h.rows(); ++k) phases(k) = std::polar(1.0, -t * es.eigenvalues()(k));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Random density matrix supported on the given basis indices.
Matrix random_density(int dim, const std::vector<int>& support, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const int k = static_cast<int>(support.size());
  Matrix a(dim, k);
  a.setZero();
  for (int j = 0; j < k; ++j)
    for (int i : support) a(i, j) = cplx(g(rng), g(rng));
  Matrix rho = a * a.adjoint();
  return rho / rho.trace();
}

PhysicalParams effective_params() {
  PhysicalParams p = PhysicalParams::single_qubit_paper();
  p.level = ModelLevel::effective;
  return p;
}

}  // namespace

TEST_CASE("time grid") {
  const TimeGrid g = TimeGrid::uniform(0.0, 2.0, 1000, 100);
  CHECK(g.stride == 10);
  CHECK(g.step() == doctest::Approx(0.002));
  CHECK(g.time(1000) == 2.0);
  CHECK(g.samples(990));
  CHECK_FALSE(g.samples(995));
  CHECK(g.samples(1000));
  CHECK(TimeGrid::uniform(0.0, 1.0, 7, 3).samples(7));
  CHECK_THROWS_AS(TimeGrid::uniform(0.0, 1.0, 0), std::invalid_argument);
  CHECK(step_advisory(g, 50.0) == doctest::Approx(0.1));
}

TEST_CASE("constant Hamiltonians match the exact exponential") {
  std::mt19937_64 rng(21);
  const Operator zero = Operator::Zero(6, 6);
  CHECK(max_abs(propagate_unitary(constant_source(zero), TimeGrid::uniform(0, 1, 10)) - Matrix::Identity(6, 6)) == 0.0);
  // small norm exercises the Taylor path, large norm the eigen path
  for (double scale : {0.3, 400.0}) {
    const Operator h = random_hermitian(6, rng, scale);
    const Matrix u = propagate_unitary(constant_source(h), TimeGrid::uniform(0.0, 0.7, 50));
    CHECK(max_abs(u - exact_propagator(h, 0.7)) < 1e-11);
  }
  Operator sx = Operator::Zero(2, 2);
  sx(0, 1) = sx(1, 0) = 1.0;
  const double omega = 3.0, t = kPi / (2.0 * omega);
  const Matrix swap = propagate_unitary(constant_source(omega * sx), TimeGrid::uniform(0.0, t, 100));
  CHECK(std::abs(swap(1, 0) - cplx(0.0, -1.0)) < 1e-12);
  CHECK(std::abs(swap(0, 0)) < 1e-12);
}

TEST_CASE("observer sees the sampled steps") {
  std::vector<int> seen;
  propagate_unitary(constant_source(Operator::Identity(2, 2)), TimeGrid::uniform(0.0, 1.0, 10, 4),
                    [&](int step, double, const Matrix&) { seen.push_back(step); });
  CHECK(seen == std::vector<int>{0, 3, 6, 9, 10});
}

TEST_CASE("lab-frame gate propagators stay unitary") {
  const GateHamiltonian h(GateSchedule::not_gate(), PhysicalParams::single_qubit_paper());
  const Matrix u = propagate_unitary(as_source(h), TimeGrid::uniform(0.0, 1.0, 20000, 1));
  CHECK(max_abs(u.adjoint() * u - Matrix::Identity(6, 6)) < 1e-10);
}

TEST_CASE("master equation without decay equals unitary evolution") {
  const GateHamiltonian h(GateSchedule::not_gate(), effective_params());
  const Basis& b = h.basis();
  const StateVector psi = (b.ket({1, 0}) + kI * b.ket({1, 1})) / std::sqrt(2.0);
  const Matrix rho0 = psi * psi.adjoint();
  const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 20000, 4);
  const Trajectory tr = evolve_master(as_source(h), lindblad_ops(0.0, b), rho0, grid, {}, true);
  const Matrix u = propagate_unitary(as_source(h), TimeGrid::uniform(0.0, 1.0, 200000, 1));
  CHECK(tr.states.size() == 5);
  CHECK(max_abs(tr.states.back() - u * rho0 * u.adjoint()) < 1e-8);
  for (double tr_value : tr.observables.at("trace")) CHECK(std::abs(tr_value - 1.0) < 1e-12);
}

TEST_CASE("decay preserves trace, Hermiticity and positivity") {
  const GateHamiltonian h(GateSchedule::not_gate(), effective_params());
  const Basis& b = h.basis();
  const StateVector psi = b.ket({1, 0});
  DensityDiagnostics worst;
  worst.min_eigenvalue = 1.0;
  evolve_master(as_source(h), lindblad_ops(2.0, b), psi * psi.adjoint(), TimeGrid::uniform(0.0, 1.0, 20000, 50),
                [&](int, double, const DensityMatrix& rho) {
                  const auto d = diagnose(rho);
                  worst.hermiticity = std::max(worst.hermiticity, d.hermiticity);
                  worst.trace_error = std::max(worst.trace_error, d.trace_error);
                  worst.min_eigenvalue = std::min(worst.min_eigenvalue, d.min_eigenvalue);
                });
  CHECK(worst.trace_error < 1e-10);
  CHECK(worst.hermiticity < 1e-12);
  CHECK(worst.min_eigenvalue > -1e-10);
}

TEST_CASE("heralded factorization on the effective model") {
  const GateHamiltonian h(GateSchedule::not_gate(), effective_params());
  const Basis& b = h.basis();
  const double gamma = 1.5;
  const LindbladSet ls = lindblad_ops(gamma, b);
  std::vector<int> support;
  for (int i = 0; i < b.dim(); ++i) {
    if (b.rydberg_count(i) == 1) support.push_back(i);
  }
  std::mt19937_64 rng(99);
  const TimeGrid grid = TimeGrid::uniform(0.0, 1.0, 20000, 10);
  for (int k = 0; k < 5; ++k) {
    const Matrix rho0 = random_density(b.dim(), support, rng);
    const Trajectory fact = factorized_evolution(rho0, as_source(h), ls, b, grid);
    const Trajectory master = evolve_master(as_source(h), ls, rho0, grid, {}, true);
    REQUIRE(fact.states.size() == master.states.size());
    for (size_t i = 0; i < fact.states.size(); ++i) {
      CHECK(max_abs(fact.states[i] - master.states[i]) < 1e-6);
      CHECK(fact.observables.at("leak_trace")[i] == doctest::Approx(1.0 - std::exp(-gamma * fact.times[i])));
      CHECK(std::abs(fact.observables.at("leak_rydberg_aux")[i]) < 1e-12);
    }
  }
  Matrix outside = Matrix::Zero(b.dim(), b.dim());
  outside(0, 0) = 1.0;
  CHECK_THROWS_AS(factorized_evolution(outside, as_source(h), ls, b, grid), std::invalid_argument);
  CHECK_THROWS_AS(factorized_evolution(random_density(b.dim(), support, rng), as_source(h), ls, b,
                                       TimeGrid::uniform(0.0, 1.0, 21, 21)),
                  std::invalid_argument);
}

TEST_CASE("RK4 converges at fourth order") {
  const GateHamiltonian h(GateSchedule::not_gate(), effective_params());
  const Basis& b = h.basis();
  const StateVector psi = b.ket({1, 0});
  const Matrix rho0 = psi * psi.adjoint();
  const LindbladSet ls = lindblad_ops(1.0, b);
  auto final_state = [&](int n) {
    Matrix last;
    evolve_master(as_source(h), ls, rho0, TimeGrid::uniform(0.0, 1.0, n, 1),
                  [&](int, double, const DensityMatrix& rho) { last = rho; });
    return last;
  };
  const Matrix ref = final_state(16000);
  const double e1 = max_abs(final_state(500) - ref);
  const double e2 = max_abs(final_state(1000) - ref);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("success probability and diagnostics") {
  CHECK(success_probability(1.0, 0.0) == 1.0);
  CHECK(success_probability(2.0, 0.5) == doctest::Approx(std::exp(-1.0)));
  CHECK_THROWS_AS(success_probability(-1.0, 0.1), std::domain_error);
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 0.6;
  rho(1, 1) = 0.5;
  rho(0, 1) = 0.1;
  const auto d = diagnose(rho);
  CHECK(d.trace_error == doctest::Approx(0.1));
  CHECK(d.hermiticity == doctest::Approx(0.1));
  CHECK(d.min_eigenvalue == doctest::Approx(0.55 - std::sqrt(0.0025 + 0.0025)));
}
