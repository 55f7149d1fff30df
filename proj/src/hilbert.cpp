#include "rydnhqc/hilbert.hpp"

#include <cmath>
#include <string>

namespace rydnhqc {

int SystemLayout::total_dim() const {
  int dim = 1;
  for (int l : levels) dim *= l;
  return dim;
}

Basis::Basis(SystemLayout layout) : layout_(std::move(layout)) {
  const auto& lv = layout_.levels;
  if (lv.size() != 2 && lv.size() != 3) {
    throw LayoutError("layout must have 2 or 3 atoms, got " + std::to_string(lv.size()));
  }
  if (lv[0] != 2) throw LayoutError("auxiliary atom must have 2 levels");
  for (size_t a = 1; a < lv.size(); ++a) {
    if (lv[a] != 3) throw LayoutError("computational atoms must have 3 levels");
  }
  dim_ = layout_.total_dim();
  strides_.assign(lv.size(), 1);
  for (int a = static_cast<int>(lv.size()) - 2; a >= 0; --a) {
    strides_[static_cast<size_t>(a)] = strides_[static_cast<size_t>(a) + 1] * lv[static_cast<size_t>(a) + 1];
  }
}

Basis build_basis(const SystemLayout& layout) { return Basis(layout); }

int Basis::index_of(std::span<const int> tuple) const {
  if (static_cast<int>(tuple.size()) != n_atoms()) {
    throw LayoutError("tuple arity does not match layout");
  }
  int idx = 0;
  for (size_t a = 0; a < tuple.size(); ++a) {
    if (tuple[a] < 0 || tuple[a] >= layout_.levels[a]) throw LayoutError("level out of range");
    idx += tuple[a] * strides_[a];
  }
  return idx;
}

std::vector<int> Basis::tuple_of(int index) const {
  if (index < 0 || index >= dim_) throw LayoutError("basis index out of range");
  std::vector<int> t(layout_.levels.size());
  for (size_t a = 0; a < t.size(); ++a) {
    t[a] = index / strides_[a];
    index %= strides_[a];
  }
  return t;
}

int Basis::rydberg_count(int index) const {
  const auto t = tuple_of(index);
  int n = 0;
  for (int a = 0; a < n_atoms(); ++a) n += (t[static_cast<size_t>(a)] == rydberg_level(a)) ? 1 : 0;
  return n;
}

StateVector Basis::ket(std::initializer_list<int> tuple) const {
  StateVector v = StateVector::Zero(dim_);
  v(index_of(tuple)) = 1.0;
  return v;
}

Matrix kron(const std::vector<Matrix>& factors) {
  Matrix out = Matrix::Identity(1, 1);
  for (const auto& f : factors) {
    Matrix next(out.rows() * f.rows(), out.cols() * f.cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index j = 0; j < out.cols(); ++j) {
        next.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = out(i, j) * f;
      }
    }
    out = std::move(next);
  }
  return out;
}

Vector kron(const std::vector<Vector>& factors) {
  Vector out = Vector::Ones(1);
  for (const auto& f : factors) {
    Vector next(out.size() * f.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) next.segment(i * f.size(), f.size()) = out(i) * f;
    out = std::move(next);
  }
  return out;
}

Operator embed(const Basis& basis, int atom, const Matrix& local) {
  if (atom < 0 || atom >= basis.n_atoms()) throw LayoutError("atom index out of range");
  if (local.rows() != basis.levels(atom) || local.cols() != basis.levels(atom)) {
    throw LayoutError("local operator dimension mismatch");
  }
  std::vector<Matrix> factors;
  for (int a = 0; a < basis.n_atoms(); ++a) {
    factors.push_back(a == atom ? local : Matrix::Identity(basis.levels(a), basis.levels(a)));
  }
  return kron(factors);
}

StateVector dressed_state(int atom, Sign sign, double theta, double phi) {
  if (atom != 1 && atom != 2) throw LayoutError("dressed states exist only for atoms 1 and 2");
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const cplx e = std::polar(1.0, phi);
  StateVector v = StateVector::Zero(3);
  if (sign == Sign::plus) {
    v(level::zero) = c;
    v(level::one) = s * e;
  } else {
    v(level::zero) = s;
    v(level::one) = -c * e;
  }
  return v;
}

Matrix dressing_unitary(double theta, double phi) {
  Matrix d = Matrix::Zero(3, 3);
  d.col(dressed::plus) = dressed_state(1, Sign::plus, theta, phi);
  d.col(dressed::minus) = dressed_state(1, Sign::minus, theta, phi);
  d(level::rydberg, level::rydberg) = 1.0;
  return d;
}

Operator dressing_transform(const Basis& basis, const Dressing& dressing) {
  std::vector<Matrix> factors{Matrix::Identity(2, 2)};
  for (int a = 1; a < basis.n_atoms(); ++a) {
    factors.push_back(dressing_unitary(dressing.theta(a), dressing.phi(a)));
  }
  return kron(factors);
}

StateVector dressed_ket(const Basis& basis, const Dressing& dressing,
                        std::initializer_list<int> labels) {
  return dressing_transform(basis, dressing).col(basis.index_of(labels));
}

std::vector<StateVector> computational_states(const Basis& basis) {
  std::vector<StateVector> out;
  const int n_comp = basis.n_atoms() - 1;
  for (int code = 0; code < (1 << n_comp); ++code) {
    StateVector v = StateVector::Zero(basis.dim());
    std::vector<int> t{level::aux_rydberg};
    for (int a = n_comp - 1; a >= 0; --a) t.push_back((code >> a) & 1);
    v(basis.index_of(t)) = 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

Operator projector_computational(const Basis& basis) {
  Operator p = Operator::Zero(basis.dim(), basis.dim());
  for (const auto& v : computational_states(basis)) p += v * v.adjoint();
  return p;
}

Operator projector_rydberg_aux(const Basis& basis) {
  Matrix local = Matrix::Zero(2, 2);
  local(level::aux_rydberg, level::aux_rydberg) = 1.0;
  return embed(basis, 0, local);
}

double hermiticity_error(const Matrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace rydnhqc
