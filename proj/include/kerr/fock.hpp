#ifndef KERR_FOCK_HPP
#define KERR_FOCK_HPP

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kerr {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Thrown when a physical or mathematical precondition is violated.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when operators and states from different spaces are combined.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class IonLevel { ground = 0, excited = 1 };
enum class Mode { phonon, photon };

struct BasisLabel {
  IonLevel ion;
  int phonon;
  int photon;
  bool operator==(const BasisLabel&) const = default;
};

std::string to_string(const BasisLabel& label);

/// Truncated ion (x) phonon (x) photon space in that fixed factor order.
///
/// The basis index of |s, m, n> is s*(Na*Nb) + m*Nb + n with s = 0 for the
/// ground level and s = 1 for the excited level.
class CompositeSpace {
 public:
  static constexpr int ion_dim = 2;

  CompositeSpace(int phonon_cutoff, int photon_cutoff);

  int phonon_cutoff() const { return phonon_cutoff_; }
  int photon_cutoff() const { return photon_cutoff_; }
  Eigen::Index dim() const {
    return Eigen::Index(ion_dim) * phonon_cutoff_ * photon_cutoff_;
  }

  Eigen::Index index(IonLevel ion, int phonon, int photon) const;
  Eigen::Index index(const BasisLabel& l) const {
    return index(l.ion, l.phonon, l.photon);
  }
  BasisLabel label(Eigen::Index index) const;

  bool operator==(const CompositeSpace&) const = default;

 private:
  int phonon_cutoff_;
  int photon_cutoff_;
};

/// Dense complex matrix on a CompositeSpace.
struct Operator {
  CompositeSpace space;
  Matrix matrix;

  Operator(CompositeSpace s, Matrix m);

  Complex operator()(Eigen::Index row, Eigen::Index col) const {
    return matrix(row, col);
  }
  Complex element(const BasisLabel& bra, const BasisLabel& ket) const {
    return matrix(space.index(bra), space.index(ket));
  }
};

struct PureState {
  CompositeSpace space;
  Vector amplitudes;

  PureState(CompositeSpace s, Vector amps);

  double norm() const { return amplitudes.norm(); }
  PureState& normalize();
  Complex amplitude(const BasisLabel& l) const {
    return amplitudes(space.index(l));
  }
};

struct MixedState {
  CompositeSpace space;
  Matrix matrix;

  MixedState(CompositeSpace s, Matrix rho);
  explicit MixedState(const PureState& psi);

  Complex trace() const { return matrix.trace(); }
  double purity() const;
  /// Throws DomainError unless hermitian (1e-10), unit trace (1e-8) and
  /// positive semidefinite (eigenvalues >= -1e-8).
  void validate() const;
};

// Construction.
Operator identity_op(const CompositeSpace& space);
Operator zero_op(const CompositeSpace& space);
Operator annihilation_op(const CompositeSpace& space, Mode mode);
Operator creation_op(const CompositeSpace& space, Mode mode);
Operator number_op(const CompositeSpace& space, Mode mode);

struct AtomicOps {
  Operator sigma_z;
  Operator sigma_plus;
  Operator sigma_minus;
};
AtomicOps atomic_ops(const CompositeSpace& space);

/// Projector |e><e| tensored with identities.
Operator excited_projector(const CompositeSpace& space);

/// Single-mode matrix sqrt(m) on the first superdiagonal.
Matrix ladder_matrix(int cutoff);

/// Kronecker product of three factor matrices in (ion, phonon, photon) order.
Matrix embed(const Matrix& ion, const Matrix& phonon, const Matrix& photon);

/// Phonon guard levels used for matrix functions of a + a^dagger.
int guard_levels(double eta);

/// cos[eta (a + a^dagger)] on the phonon factor, evaluated by
/// eigendecomposition on an enlarged phonon space and truncated back.
Matrix cos_position_matrix(int phonon_cutoff, double eta);
Operator cos_position_op(const CompositeSpace& space, double eta);

PureState basis_state(const CompositeSpace& space, const BasisLabel& label);
PureState basis_state(const CompositeSpace& space, IonLevel ion, int phonon,
                      int photon);

// Algebra.
Operator dagger(const Operator& op);
Operator operator+(const Operator& a, const Operator& b);
Operator operator-(const Operator& a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(Complex s, const Operator& a);
Operator operator*(double s, const Operator& a);
Operator commutator(const Operator& a, const Operator& b);

PureState apply(const Operator& op, const PureState& psi);
Complex expectation(const Operator& op, const PureState& psi);
Complex expectation(const Operator& op, const MixedState& rho);
double state_fidelity(const PureState& psi, const PureState& phi);

/// max |M - M^dagger| / max |M| (0 for the zero matrix).
double hermiticity_residual(const Matrix& m);
bool is_hermitian(const Operator& op, double rel_tol = 1e-12);

void require_same_space(const CompositeSpace& a, const CompositeSpace& b,
                        const char* what);

}  // namespace kerr

#endif  // KERR_FOCK_HPP
