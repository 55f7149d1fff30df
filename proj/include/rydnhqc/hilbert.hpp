#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace rydnhqc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Dense operator on the composite space (dim <= 18).
using Operator = Matrix;
using StateVector = Vector;

inline constexpr cplx kI{0.0, 1.0};

/// Level indices. Atom 0 is {g, r}; atoms 1 and 2 are {0, 1, r}.
namespace level {
inline constexpr int aux_ground = 0;
inline constexpr int aux_rydberg = 1;
inline constexpr int zero = 0;
inline constexpr int one = 1;
inline constexpr int rydberg = 2;
}  // namespace level

/// Dressed-basis labels for computational atoms, sharing indices with the bare
/// levels: |+> takes the slot of |0>, |-> of |1>, |r> stays put.
namespace dressed {
inline constexpr int plus = 0;
inline constexpr int minus = 1;
}  // namespace dressed

class LayoutError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Atom 0 (auxiliary) plus one or two computational atoms.
struct SystemLayout {
  std::vector<int> levels;

  static SystemLayout single_qubit() { return {{2, 3}}; }
  static SystemLayout two_qubit() { return {{2, 3, 3}}; }

  int n_atoms() const { return static_cast<int>(levels.size()); }
  int total_dim() const;
  bool operator==(const SystemLayout&) const = default;
};

/// Multi-index <-> flat index map, atom 0 slowest.
class Basis {
 public:
  explicit Basis(SystemLayout layout);

  const SystemLayout& layout() const { return layout_; }
  int dim() const { return dim_; }
  int n_atoms() const { return layout_.n_atoms(); }
  int levels(int atom) const { return layout_.levels[static_cast<size_t>(atom)]; }
  int rydberg_level(int atom) const { return levels(atom) - 1; }

  int index_of(std::span<const int> tuple) const;
  int index_of(std::initializer_list<int> tuple) const {
    return index_of(std::span<const int>(tuple.begin(), tuple.size()));
  }
  std::vector<int> tuple_of(int index) const;

  /// Number of atoms in their Rydberg level for the given basis index.
  int rydberg_count(int index) const;

  StateVector ket(std::initializer_list<int> tuple) const;

 private:
  SystemLayout layout_;
  int dim_ = 0;
  std::vector<int> strides_;
};

Basis build_basis(const SystemLayout& layout);

/// Kronecker product of a list of factors, first factor slowest.
Matrix kron(const std::vector<Matrix>& factors);
Vector kron(const std::vector<Vector>& factors);

/// Embeds a single-atom operator into the composite space.
Operator embed(const Basis& basis, int atom, const Matrix& local);

/// Dressing angles (theta_k, phi_k) of the computational atoms.
struct Dressing {
  double theta1 = 0.0;
  double phi1 = 0.0;
  double theta2 = 0.0;
  double phi2 = 0.0;

  double theta(int atom) const { return atom == 1 ? theta1 : theta2; }
  double phi(int atom) const { return atom == 1 ? phi1 : phi2; }
};

enum class Sign { plus, minus };

/// |+>_k = cos(t/2)|0> + sin(t/2)e^{i p}|1>, |->_k = sin(t/2)|0> - cos(t/2)e^{i p}|1>,
/// as a 3-component vector over {|0>, |1>, |r>}.
StateVector dressed_state(int atom, Sign sign, double theta, double phi);

/// Local unitary with columns |+>, |->, |r> for a computational atom.
Matrix dressing_unitary(double theta, double phi);

/// Maps bare multi-index kets to dressed ones: column j is the dressed ket
/// whose labels equal tuple_of(j) under the {+,-,r} relabelling.
Operator dressing_transform(const Basis& basis, const Dressing& dressing);

/// Dressed product ket, e.g. {aux_rydberg, plus, minus} -> |r+->_{012}.
StateVector dressed_ket(const Basis& basis, const Dressing& dressing,
                        std::initializer_list<int> labels);

/// Bare kets |r>_0 (x) |a b ...> with computational atoms in {0,1}, in
/// lexicographic order.
std::vector<StateVector> computational_states(const Basis& basis);

/// Projector onto span{|r>_0 (x) computational kets}; rank 2 or 4. The span is
/// independent of the dressing angles.
Operator projector_computational(const Basis& basis);

/// |r>_0<r| (x) identity on the computational atoms.
Operator projector_rydberg_aux(const Basis& basis);

/// Max element of |A - A^dagger|.
double hermiticity_error(const Matrix& a);

}  // namespace rydnhqc
