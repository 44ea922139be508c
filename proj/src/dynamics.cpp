#include "kerr/dynamics.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

namespace kerr {

void EvolutionSpec::validate() const {
  if (!(t_final > 0.0)) throw DomainError("EvolutionSpec: t_final must be > 0");
  if (sample_count < 2) throw DomainError("EvolutionSpec: sample_count must be >= 2");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw DomainError("EvolutionSpec: tolerances must be > 0");
  if (!(max_step > 0.0)) throw DomainError("EvolutionSpec: max_step must be > 0");
}

std::vector<double> EvolutionSpec::times() const {
  std::vector<double> t(static_cast<std::size_t>(sample_count));
  const double n = double(sample_count - 1);
  for (int k = 0; k < sample_count; ++k) t[k] = t_final * (double(k) / n);
  t.back() = t_final;
  return t;
}

StaticPropagator::StaticPropagator(const Operator& h) : space_(h.space) {
  if (!is_hermitian(h))
    throw DomainError("evolve_static: Hamiltonian is not hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix);
  if (es.info() != Eigen::Success)
    throw DomainError("evolve_static: eigendecomposition failed");
  energies_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
}

PureState StaticPropagator::at(const PureState& psi0, double t) const {
  require_same_space(space_, psi0.space, "StaticPropagator");
  const Vector c = vectors_.adjoint() * psi0.amplitudes;
  const Vector ph = (-kI * t * energies_.cast<Complex>()).array().exp().matrix();
  return {space_, vectors_ * ph.cwiseProduct(c)};
}

PureTrajectory StaticPropagator::evolve(const PureState& psi0,
                                        const EvolutionSpec& spec) const {
  spec.validate();
  require_same_space(space_, psi0.space, "evolve_static");
  PureTrajectory traj{space_, spec.times(), {}};
  traj.states.reserve(traj.times.size());
  const Vector c = vectors_.adjoint() * psi0.amplitudes;
  for (double t : traj.times) {
    const Vector ph =
        (-kI * t * energies_.cast<Complex>()).array().exp().matrix();
    traj.states.emplace_back(space_, vectors_ * ph.cwiseProduct(c));
  }
  return traj;
}

PureTrajectory evolve_static(const Operator& h, const PureState& psi0,
                             const EvolutionSpec& spec) {
  return StaticPropagator(h).evolve(psi0, spec);
}

InteractionPictureHamiltonian::InteractionPictureHamiltonian(const Operator& h0,
                                                             Operator coupling)
    : e0_(h0.matrix.diagonal().real()), v_(std::move(coupling)) {
  require_same_space(h0.space, v_.space, "InteractionPictureHamiltonian");
  Matrix off = h0.matrix;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() != 0.0)
    throw DomainError("InteractionPictureHamiltonian: H0 must be diagonal");
}

Vector InteractionPictureHamiltonian::phases(double t) const {
  return (kI * t * e0_.cast<Complex>()).array().exp().matrix();
}

void InteractionPictureHamiltonian::apply(double t, const Vector& x,
                                          Vector& y) const {
  const Vector p = phases(t);
  const Vector rotated = p.conjugate().cwiseProduct(x);
  y.noalias() = v_.matrix * rotated;
  y = p.cwiseProduct(y);
}

void InteractionPictureHamiltonian::evaluate(double t, Matrix& m) const {
  const Vector p = phases(t);
  m = p.asDiagonal() * v_.matrix * p.conjugate().asDiagonal();
}

double InteractionPictureHamiltonian::max_frequency() const {
  double w = 0.0;
  for (Eigen::Index j = 0; j < v_.matrix.cols(); ++j)
    for (Eigen::Index i = 0; i < v_.matrix.rows(); ++i)
      if (v_.matrix(i, j) != Complex(0.0))
        w = std::max(w, std::abs(e0_(i) - e0_(j)));
  return w;
}

QuadratureRule gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be >= 1");
  QuadratureRule r{Eigen::VectorXd(order), Eigen::VectorXd(order)};
  for (int i = 0; i < order; ++i) {
    // Chebyshev initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes(i) = x;
    r.weights(i) = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

void CollapseSet::add(Operator op, double rate) {
  if (!(rate >= 0.0)) throw DomainError("CollapseSet: rates must be >= 0");
  channels.push_back({std::move(op), rate});
}

namespace {

Matrix effective_generator(const Operator& h, const CollapseSet& collapses) {
  Matrix h_eff = h.matrix;
  for (const auto& c : collapses.channels) {
    require_same_space(h.space, c.op.space, "Lindblad collapse operator");
    h_eff -= (0.5 * c.rate) * kI * (c.op.matrix.adjoint() * c.op.matrix);
  }
  return h_eff;
}

void symmetrize(Matrix& rho) {
  const Matrix adj = rho.adjoint();
  rho = 0.5 * (rho + adj);
}

}  // namespace

Matrix lindblad_rhs(const Matrix& h_eff, const CollapseSet& collapses,
                    const Matrix& rho) {
  Matrix out = -kI * (h_eff * rho - rho * h_eff.adjoint());
  for (const auto& c : collapses.channels)
    out.noalias() += c.rate * (c.op.matrix * rho * c.op.matrix.adjoint());
  return out;
}

LindbladPropagator::LindbladPropagator(const Operator& h,
                                       const CollapseSet& collapses, double dt)
    : dt_(dt) {
  const Matrix h_eff = effective_generator(h, collapses);
  const Eigen::Index d = h.space.dim();
  const Matrix id = Matrix::Identity(d, d);
  const auto kron = [d](const Matrix& a, const Matrix& b) {
    Matrix out(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        out.block(i * d, j * d, d, d) = a(i, j) * b;
    return out;
  };
  // Column stacking: vec(A X B) = (B^T (x) A) vec(X).
  Matrix gen = -kI * kron(id, h_eff) + kI * kron(h_eff.conjugate(), id);
  for (const auto& c : collapses.channels)
    gen += c.rate * kron(c.op.matrix.conjugate(), c.op.matrix);
  gen *= dt;
  map_ = gen.exp();
}

void LindbladPropagator::step(Matrix& rho) const {
  const Eigen::Index n = rho.size();
  const Vector next = map_ * Eigen::Map<const Vector>(rho.data(), n);
  Eigen::Map<Vector>(rho.data(), n) = next;
  symmetrize(rho);
}

void LindbladPropagator::step(std::vector<Matrix>& rhos) const {
  if (rhos.empty()) return;
  const Eigen::Index n = rhos.front().size();
  Matrix stacked(n, Eigen::Index(rhos.size()));
  for (std::size_t k = 0; k < rhos.size(); ++k)
    stacked.col(Eigen::Index(k)) = Eigen::Map<const Vector>(rhos[k].data(), n);
  const Matrix next = map_ * stacked;
  for (std::size_t k = 0; k < rhos.size(); ++k) {
    Eigen::Map<Vector>(rhos[k].data(), n) = next.col(Eigen::Index(k));
    symmetrize(rhos[k]);
  }
}

MixedTrajectory evolve_lindblad(const Operator& h, const CollapseSet& collapses,
                                const MixedState& rho0, const EvolutionSpec& spec,
                                LindbladMethod method) {
  spec.validate();
  require_same_space(h.space, rho0.space, "evolve_lindblad");
  if (!is_hermitian(h))
    throw DomainError("evolve_lindblad: Hamiltonian is not hermitian");
  MixedTrajectory traj{rho0.space, spec.times(), {}};
  traj.states.reserve(traj.times.size());
  traj.states.push_back(rho0);
  Matrix rho = rho0.matrix;

  if (method == LindbladMethod::propagator) {
    const LindbladPropagator step(h, collapses, traj.times[1] - traj.times[0]);
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
      step.step(rho);
      traj.states.emplace_back(rho0.space, rho);
    }
    return traj;
  }

  const Matrix h_eff = effective_generator(h, collapses);
  Dopri5Integrator<Matrix> integ(spec.step_control());
  const auto rhs = [&](double, const Matrix& y, Matrix& dydt) {
    dydt = lindblad_rhs(h_eff, collapses, y);
  };
  const auto sym = [](Matrix& y) {
    symmetrize(y);
    return true;
  };
  double t = 0.0;
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    integ.advance(rhs, sym, t, traj.times[k], rho);
    traj.states.emplace_back(rho0.space, rho);
  }
  return traj;
}

namespace {

double checked_real(Complex v, const char* what) {
  if (std::abs(v.imag()) > 1e-8 * std::max(1.0, std::abs(v.real())))
    throw DomainError(std::string(what) +
                      ": hermitian expectation has imaginary residue");
  return v.real();
}

template <class Traj>
Eigen::MatrixXd observables_impl(const Traj& traj,
                                 const std::vector<Operator>& ops) {
  for (const auto& op : ops) {
    require_same_space(traj.space, op.space, "observables");
    if (!is_hermitian(op))
      throw DomainError("observables: operator is not hermitian");
  }
  Eigen::MatrixXd table(traj.states.size(), ops.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k)
    for (std::size_t j = 0; j < ops.size(); ++j)
      table(k, j) = checked_real(expectation(ops[j], traj.states[k]), "observables");
  return table;
}

}  // namespace

Eigen::MatrixXd observables(const PureTrajectory& traj,
                            const std::vector<Operator>& ops) {
  return observables_impl(traj, ops);
}

Eigen::MatrixXd observables(const MixedTrajectory& traj,
                            const std::vector<Operator>& ops) {
  return observables_impl(traj, ops);
}

Vector rotate_to_interaction(const Eigen::VectorXd& free_energies,
                             const Vector& psi, double t) {
  const Vector p = (kI * t * free_energies.cast<Complex>()).array().exp().matrix();
  return p.cwiseProduct(psi);
}

Matrix rotate_to_interaction(const Eigen::VectorXd& free_energies,
                             const Matrix& rho, double t) {
  const Vector p = (kI * t * free_energies.cast<Complex>()).array().exp().matrix();
  return p.asDiagonal() * rho * p.conjugate().asDiagonal();
}

}  // namespace kerr
