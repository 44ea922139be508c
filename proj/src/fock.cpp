#include "kerr/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kerr {

std::string to_string(const BasisLabel& l) {
  std::ostringstream os;
  os << '|' << (l.ion == IonLevel::ground ? 'g' : 'e') << ',' << l.phonon
     << ',' << l.photon << '>';
  return os.str();
}

CompositeSpace::CompositeSpace(int phonon_cutoff, int photon_cutoff)
    : phonon_cutoff_(phonon_cutoff), photon_cutoff_(photon_cutoff) {
  if (phonon_cutoff < 1 || photon_cutoff < 1)
    throw DomainError("CompositeSpace: cutoffs must be >= 1");
}

Eigen::Index CompositeSpace::index(IonLevel ion, int phonon, int photon) const {
  if (phonon < 0 || phonon >= phonon_cutoff_ || photon < 0 ||
      photon >= photon_cutoff_)
    throw DimensionError("CompositeSpace: basis label outside truncation");
  const Eigen::Index s = ion == IonLevel::ground ? 0 : 1;
  return s * phonon_cutoff_ * photon_cutoff_ +
         Eigen::Index(phonon) * photon_cutoff_ + photon;
}

BasisLabel CompositeSpace::label(Eigen::Index index) const {
  if (index < 0 || index >= dim())
    throw DimensionError("CompositeSpace: index out of range");
  const Eigen::Index block = Eigen::Index(phonon_cutoff_) * photon_cutoff_;
  const auto s = index / block;
  const auto rest = index % block;
  return {s == 0 ? IonLevel::ground : IonLevel::excited,
          static_cast<int>(rest / photon_cutoff_),
          static_cast<int>(rest % photon_cutoff_)};
}

void require_same_space(const CompositeSpace& a, const CompositeSpace& b,
                        const char* what) {
  if (!(a == b))
    throw DimensionError(std::string(what) + ": space mismatch");
}

Operator::Operator(CompositeSpace s, Matrix m)
    : space(s), matrix(std::move(m)) {
  if (matrix.rows() != space.dim() || matrix.cols() != space.dim())
    throw DimensionError("Operator: matrix size does not match space");
}

PureState::PureState(CompositeSpace s, Vector amps)
    : space(s), amplitudes(std::move(amps)) {
  if (amplitudes.size() != space.dim())
    throw DimensionError("PureState: vector size does not match space");
}

PureState& PureState::normalize() {
  const double n = amplitudes.norm();
  if (n == 0.0) throw DomainError("PureState: cannot normalize zero vector");
  amplitudes /= n;
  return *this;
}

MixedState::MixedState(CompositeSpace s, Matrix rho)
    : space(s), matrix(std::move(rho)) {
  if (matrix.rows() != space.dim() || matrix.cols() != space.dim())
    throw DimensionError("MixedState: matrix size does not match space");
}

MixedState::MixedState(const PureState& psi)
    : space(psi.space),
      matrix(psi.amplitudes * psi.amplitudes.adjoint()) {}

double MixedState::purity() const {
  // tr(rho^2) for hermitian rho is the squared Frobenius norm.
  return matrix.squaredNorm();
}

void MixedState::validate() const {
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw DomainError("MixedState: not hermitian");
  if (std::abs(matrix.trace() - Complex(1.0)) > 1e-8)
    throw DomainError("MixedState: trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8)
    throw DomainError("MixedState: negative eigenvalue");
}

Matrix ladder_matrix(int cutoff) {
  Matrix a = Matrix::Zero(cutoff, cutoff);
  for (int m = 1; m < cutoff; ++m) a(m - 1, m) = std::sqrt(double(m));
  return a;
}

Matrix embed(const Matrix& ion, const Matrix& phonon, const Matrix& photon) {
  const auto kron = [](const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
            a(i, j) * b;
    return out;
  };
  return kron(kron(ion, phonon), photon);
}

namespace {

Matrix eye(Eigen::Index n) { return Matrix::Identity(n, n); }

Operator embed_phonon(const CompositeSpace& s, const Matrix& m) {
  return {s, embed(eye(2), m, eye(s.photon_cutoff()))};
}

Operator embed_photon(const CompositeSpace& s, const Matrix& m) {
  return {s, embed(eye(2), eye(s.phonon_cutoff()), m)};
}

Operator embed_ion(const CompositeSpace& s, const Matrix& m) {
  return {s, embed(m, eye(s.phonon_cutoff()), eye(s.photon_cutoff()))};
}

}  // namespace

Operator identity_op(const CompositeSpace& space) {
  return {space, eye(space.dim())};
}

Operator zero_op(const CompositeSpace& space) {
  return {space, Matrix::Zero(space.dim(), space.dim())};
}

Operator annihilation_op(const CompositeSpace& space, Mode mode) {
  return mode == Mode::phonon
             ? embed_phonon(space, ladder_matrix(space.phonon_cutoff()))
             : embed_photon(space, ladder_matrix(space.photon_cutoff()));
}

Operator creation_op(const CompositeSpace& space, Mode mode) {
  return dagger(annihilation_op(space, mode));
}

Operator number_op(const CompositeSpace& space, Mode mode) {
  const int n = mode == Mode::phonon ? space.phonon_cutoff()
                                     : space.photon_cutoff();
  Matrix d = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) d(k, k) = double(k);
  return mode == Mode::phonon ? embed_phonon(space, d)
                              : embed_photon(space, d);
}

AtomicOps atomic_ops(const CompositeSpace& space) {
  // Ion factor basis order: |g> = 0, |e> = 1.
  Matrix sz = Matrix::Zero(2, 2);
  sz(0, 0) = -1.0;
  sz(1, 1) = 1.0;
  Matrix sp = Matrix::Zero(2, 2);
  sp(1, 0) = 1.0;
  return {embed_ion(space, sz), embed_ion(space, sp),
          embed_ion(space, sp.adjoint())};
}

Operator excited_projector(const CompositeSpace& space) {
  Matrix p = Matrix::Zero(2, 2);
  p(1, 1) = 1.0;
  return embed_ion(space, p);
}

int guard_levels(double eta) {
  return std::max(20, static_cast<int>(std::ceil(10.0 * eta * eta)));
}

Matrix cos_position_matrix(int phonon_cutoff, double eta) {
  if (eta < 0.0) throw DomainError("cos_position_op: eta must be >= 0");
  if (eta == 0.0) return Matrix::Identity(phonon_cutoff, phonon_cutoff);
  const int big = phonon_cutoff + guard_levels(eta);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(big, big);
  for (int m = 1; m < big; ++m) {
    x(m - 1, m) = std::sqrt(double(m));
    x(m, m - 1) = x(m - 1, m);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
  const Eigen::VectorXd c = (eta * es.eigenvalues().array()).cos().matrix();
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::MatrixXd full = v * c.asDiagonal() * v.transpose();
  Eigen::MatrixXd top = full.topLeftCorner(phonon_cutoff, phonon_cutoff);
  // Exact symmetry, odd-parity elements vanish exactly.
  for (int i = 0; i < phonon_cutoff; ++i)
    for (int j = 0; j <= i; ++j) {
      const double s = ((i + j) % 2 == 1) ? 0.0 : 0.5 * (top(i, j) + top(j, i));
      top(i, j) = s;
      top(j, i) = s;
    }
  return top.cast<Complex>();
}

Operator cos_position_op(const CompositeSpace& space, double eta) {
  return embed_phonon(space, cos_position_matrix(space.phonon_cutoff(), eta));
}

PureState basis_state(const CompositeSpace& space, const BasisLabel& label) {
  Vector v = Vector::Zero(space.dim());
  v(space.index(label)) = 1.0;
  return {space, std::move(v)};
}

PureState basis_state(const CompositeSpace& space, IonLevel ion, int phonon,
                      int photon) {
  return basis_state(space, BasisLabel{ion, phonon, photon});
}

Operator dagger(const Operator& op) { return {op.space, op.matrix.adjoint()}; }

Operator operator+(const Operator& a, const Operator& b) {
  require_same_space(a.space, b.space, "operator+");
  return {a.space, a.matrix + b.matrix};
}

Operator operator-(const Operator& a, const Operator& b) {
  require_same_space(a.space, b.space, "operator-");
  return {a.space, a.matrix - b.matrix};
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_space(a.space, b.space, "operator*");
  return {a.space, a.matrix * b.matrix};
}

Operator operator*(Complex s, const Operator& a) {
  return {a.space, s * a.matrix};
}

Operator operator*(double s, const Operator& a) {
  return {a.space, s * a.matrix};
}

Operator commutator(const Operator& a, const Operator& b) {
  require_same_space(a.space, b.space, "commutator");
  return {a.space, a.matrix * b.matrix - b.matrix * a.matrix};
}

PureState apply(const Operator& op, const PureState& psi) {
  require_same_space(op.space, psi.space, "apply");
  return {psi.space, op.matrix * psi.amplitudes};
}

Complex expectation(const Operator& op, const PureState& psi) {
  require_same_space(op.space, psi.space, "expectation");
  return psi.amplitudes.dot(op.matrix * psi.amplitudes);
}

Complex expectation(const Operator& op, const MixedState& rho) {
  require_same_space(op.space, rho.space, "expectation");
  // tr(O rho) without forming the product.
  return (op.matrix.transpose().cwiseProduct(rho.matrix)).sum();
}

double state_fidelity(const PureState& psi, const PureState& phi) {
  require_same_space(psi.space, phi.space, "state_fidelity");
  return std::min(1.0, std::norm(psi.amplitudes.dot(phi.amplitudes)));
}

double hermiticity_residual(const Matrix& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

bool is_hermitian(const Operator& op, double rel_tol) {
  return hermiticity_residual(op.matrix) < rel_tol;
}

}  // namespace kerr
