#include <doctest.h>

#include <random>

#include "rydnhqc/hilbert.hpp"

using namespace rydnhqc;

namespace {

Matrix random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

// Kronecker product by explicit index arithmetic.
Matrix nested_kron(const Matrix& a, const Matrix& b, const Matrix& c) {
  const auto na = a.rows(), nb = b.rows(), nc = c.rows();
  Matrix out(na * nb * nc, na * nb * nc);
  for (Eigen::Index i1 = 0; i1 < na; ++i1)
    for (Eigen::Index i2 = 0; i2 < nb; ++i2)
      for (Eigen::Index i3 = 0; i3 < nc; ++i3)
        for (Eigen::Index j1 = 0; j1 < na; ++j1)
          for (Eigen::Index j2 = 0; j2 < nb; ++j2)
            for (Eigen::Index j3 = 0; j3 < nc; ++j3)
              out((i1 * nb + i2) * nc + i3, (j1 * nb + j2) * nc + j3) = a(i1, j1) * b(i2, j2) * c(i3, j3);
  return out;
}

}  // namespace

TEST_CASE("layout dimensions") {
  CHECK(Basis(SystemLayout::single_qubit()).dim() == 6);
  CHECK(Basis(SystemLayout::two_qubit()).dim() == 18);
  CHECK(SystemLayout::two_qubit().total_dim() == 18);
  CHECK_THROWS_AS(Basis(SystemLayout{{2}}), LayoutError);
  CHECK_THROWS_AS(Basis(SystemLayout{{3, 3}}), LayoutError);
  CHECK_THROWS_AS(Basis(SystemLayout{{2, 3, 3, 3}}), LayoutError);
}

TEST_CASE("basis round trip and ordering") {
  const Basis b(SystemLayout::two_qubit());
  for (int i = 0; i < b.dim(); ++i) {
    const auto t = b.tuple_of(i);
    CHECK(b.index_of(std::span<const int>(t)) == i);
  }
  // atom 0 slowest
  CHECK(b.index_of({0, 0, 0}) == 0);
  CHECK(b.index_of({0, 0, 1}) == 1);
  CHECK(b.index_of({1, 0, 0}) == 9);
  CHECK(b.rydberg_count(b.index_of({1, 2, 2})) == 3);
  CHECK(b.rydberg_count(b.index_of({0, 1, 2})) == 1);
  CHECK_THROWS_AS(b.index_of({0, 3, 0}), LayoutError);
  CHECK_THROWS_AS(b.tuple_of(18), LayoutError);
}

TEST_CASE("dressed |r++> sits at the first index of the |r>_0 sector") {
  const Basis b(SystemLayout::two_qubit());
  const Dressing d{0.3, 1.1, 0.7, -0.4};
  const Operator u = dressing_transform(b, d);
  const int col = b.index_of({level::aux_rydberg, dressed::plus, dressed::plus});
  CHECK(col == 9);
  CHECK((u.col(col) - dressed_ket(b, d, {level::aux_rydberg, dressed::plus, dressed::plus})).norm() < 1e-14);
}

TEST_CASE("dressed states") {
  const double s = 1.0 / std::sqrt(2.0);
  CHECK((dressed_state(1, Sign::plus, 0.0, 0.0) - Vector::Unit(3, 0)).norm() < 1e-15);
  CHECK((dressed_state(1, Sign::plus, std::acos(-1.0), 0.0) - Vector::Unit(3, 1)).norm() < 1e-15);
  Vector expect(3);
  expect << s, -s, 0.0;
  CHECK((dressed_state(2, Sign::plus, std::acos(-1.0) / 2, std::acos(-1.0)) - expect).norm() < 1e-15);
  CHECK_THROWS_AS(dressed_state(0, Sign::plus, 0.0, 0.0), LayoutError);

  // orthonormal and unitary on a 10 x 10 grid
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double th = std::acos(-1.0) * i / 9.0, ph = 2.0 * std::acos(-1.0) * j / 9.0;
      const Vector p = dressed_state(1, Sign::plus, th, ph), m = dressed_state(1, Sign::minus, th, ph);
      CHECK(std::abs(p.dot(m)) < 1e-14);
      CHECK(std::abs(p.norm() - 1.0) < 1e-14);
      const Matrix u = dressing_unitary(th, ph);
      CHECK((u.adjoint() * u - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("kron agrees with the nested-loop construction") {
  std::mt19937_64 rng(7);
  const Matrix a = random_matrix(2, rng), b = random_matrix(3, rng), c = random_matrix(3, rng);
  CHECK((kron(std::vector<Matrix>{a, b, c}) - nested_kron(a, b, c)).cwiseAbs().maxCoeff() <= 1e-14);
  const Basis basis(SystemLayout::two_qubit());
  const Matrix i2 = Matrix::Identity(2, 2), i3 = Matrix::Identity(3, 3);
  CHECK((embed(basis, 1, b) - nested_kron(i2, b, i3)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK_THROWS_AS(embed(basis, 1, a), LayoutError);
}

TEST_CASE("projectors") {
  for (const auto& layout : {SystemLayout::single_qubit(), SystemLayout::two_qubit()}) {
    const Basis b(layout);
    const Operator pc = projector_computational(b);
    const Operator pr = projector_rydberg_aux(b);
    const int n_comp = b.n_atoms() == 2 ? 2 : 4;
    CHECK(std::abs(pc.trace().real() - n_comp) < 1e-14);
    CHECK(std::abs(pr.trace().real() - b.dim() / 2) < 1e-14);
    CHECK((pc * pc - pc).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((pr * pr - pr).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(hermiticity_error(pr) == 0.0);
    CHECK(static_cast<int>(computational_states(b).size()) == n_comp);
  }
  const Basis b(SystemLayout::two_qubit());
  const Vector v = dressed_ket(b, Dressing{0.4, 0.2, 1.0, 2.0}, {level::aux_ground, level::rydberg, dressed::plus});
  CHECK((projector_rydberg_aux(b) * v).norm() < 1e-15);
}
