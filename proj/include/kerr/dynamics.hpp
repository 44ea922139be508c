#ifndef KERR_DYNAMICS_HPP
#define KERR_DYNAMICS_HPP

#include <concepts>
#include <functional>
#include <limits>
#include <vector>

#include "kerr/fock.hpp"
#include "kerr/integrator.hpp"

namespace kerr {

struct EvolutionSpec {
  double t_final = 0.0;
  int sample_count = 2;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 50'000'000;

  void validate() const;
  /// Uniform sample grid t_k = t_final k / (sample_count - 1).
  std::vector<double> times() const;
  StepControl step_control() const {
    return {rel_tol, abs_tol, max_step, max_steps};
  }
};

template <class State>
struct Trajectory {
  CompositeSpace space;
  std::vector<double> times;
  std::vector<State> states;
};

using PureTrajectory = Trajectory<PureState>;
using MixedTrajectory = Trajectory<MixedState>;

/// e^{-iHt} for a fixed hermitian H via one eigendecomposition.
class StaticPropagator {
 public:
  /// Throws DomainError if H is not hermitian.
  explicit StaticPropagator(const Operator& h);

  const CompositeSpace& space() const { return space_; }
  const Eigen::VectorXd& energies() const { return energies_; }

  PureState at(const PureState& psi0, double t) const;
  PureTrajectory evolve(const PureState& psi0, const EvolutionSpec& spec) const;

 private:
  CompositeSpace space_;
  Eigen::VectorXd energies_;
  Matrix vectors_;
};

PureTrajectory evolve_static(const Operator& h, const PureState& psi0,
                             const EvolutionSpec& spec);

/// A time-indexed Hamiltonian: `apply` computes H(t) x, `evaluate` writes the
/// full matrix H(t).
template <class S>
concept HamiltonianSource = requires(const S& s, double t, const Vector& x,
                                     Vector& y, Matrix& m) {
  { s.space() } -> std::convertible_to<CompositeSpace>;
  s.apply(t, x, y);
  s.evaluate(t, m);
};

class ConstantHamiltonian {
 public:
  explicit ConstantHamiltonian(Operator h) : h_(std::move(h)) {}
  const CompositeSpace& space() const { return h_.space; }
  void apply(double, const Vector& x, Vector& y) const { y.noalias() = h_.matrix * x; }
  void evaluate(double, Matrix& m) const { m = h_.matrix; }

 private:
  Operator h_;
};

/// V_I(t) = e^{i H0 t} V e^{-i H0 t} for diagonal H0, applied without forming
/// the rotated matrix.
class InteractionPictureHamiltonian {
 public:
  /// Throws DomainError if h0 is not diagonal.
  InteractionPictureHamiltonian(const Operator& h0, Operator coupling);

  const CompositeSpace& space() const { return v_.space; }
  const Eigen::VectorXd& free_energies() const { return e0_; }
  void apply(double t, const Vector& x, Vector& y) const;
  void evaluate(double t, Matrix& m) const;
  /// Largest |E_i - E_j| over nonzero coupling elements.
  double max_frequency() const;

 private:
  Vector phases(double t) const;
  Eigen::VectorXd e0_;
  Operator v_;
};

class FunctionHamiltonian {
 public:
  FunctionHamiltonian(CompositeSpace space, std::function<Operator(double)> f)
      : space_(space), f_(std::move(f)) {}
  const CompositeSpace& space() const { return space_; }
  void apply(double t, const Vector& x, Vector& y) const {
    y.noalias() = f_(t).matrix * x;
  }
  void evaluate(double t, Matrix& m) const { m = f_(t).matrix; }

 private:
  CompositeSpace space_;
  std::function<Operator(double)> f_;
};

/// Integrates i dpsi/dt = H(t) psi with the adaptive 5(4) pair. No
/// renormalization is applied.
template <HamiltonianSource Source>
PureTrajectory evolve_time_dependent(const Source& h, const PureState& psi0,
                                     const EvolutionSpec& spec,
                                     IntegrationStats* stats = nullptr) {
  spec.validate();
  require_same_space(h.space(), psi0.space, "evolve_time_dependent");
  PureTrajectory traj{psi0.space, spec.times(), {}};
  traj.states.reserve(traj.times.size());
  traj.states.push_back(psi0);

  Dopri5Integrator<Vector> integ(spec.step_control());
  const auto rhs = [&h](double t, const Vector& y, Vector& dydt) {
    h.apply(t, y, dydt);
    dydt *= -kI;
  };
  const auto keep = [](Vector&) { return false; };
  Vector y = psi0.amplitudes;
  double t = 0.0;
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    integ.advance(rhs, keep, t, traj.times[k], y);
    traj.states.emplace_back(psi0.space, y);
  }
  if (stats) *stats = integ.stats();
  return traj;
}

/// Gauss-Legendre nodes and weights on [-1, 1].
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
QuadratureRule gauss_legendre(int order);

/// Running first-order integral Q(t) = int_0^t H(t') dt' by composite
/// Gauss-Legendre quadrature, so U1(t) = 1 - i Q(t) can be sampled on a grid
/// without re-integrating from zero.
template <HamiltonianSource Source>
class FirstOrderAccumulator {
 public:
  explicit FirstOrderAccumulator(const Source& h)
      : h_(h), q_(Matrix::Zero(h.space().dim(), h.space().dim())),
        buf_(q_) {}

  double time() const { return t_; }
  const Matrix& integral() const { return q_; }

  /// Integrates [time(), t_next] with `quad_points` nodes split into panels of
  /// at most 8 nodes each.
  void advance_to(double t_next, int quad_points) {
    if (quad_points < 2) throw DomainError("first-order quadrature needs >= 2 points");
    if (t_next < t_) throw DomainError("first-order accumulator cannot go backwards");
    const int order = std::min(8, quad_points);
    const int panels = (quad_points + order - 1) / order;
    if (rule_.nodes.size() != order) rule_ = gauss_legendre(order);
    const double width = (t_next - t_) / panels;
    for (int p = 0; p < panels; ++p) {
      const double a = t_ + width * p;
      for (int k = 0; k < order; ++k) {
        h_.evaluate(a + 0.5 * width * (rule_.nodes(k) + 1.0), buf_);
        q_ += (0.5 * width * rule_.weights(k)) * buf_;
      }
    }
    t_ = t_next;
  }

  Operator propagator() const {
    const auto n = q_.rows();
    return {h_.space(), Matrix::Identity(n, n) - kI * q_};
  }

 private:
  const Source& h_;
  Matrix q_;
  Matrix buf_;
  QuadratureRule rule_;
  double t_ = 0.0;
};

/// U1(t) = 1 - i int_0^t H(t') dt'. Not unitary.
template <HamiltonianSource Source>
Operator first_order_propagator(const Source& h, double t, int quad_points) {
  if (t < 0.0) throw DomainError("first_order_propagator: t must be >= 0");
  FirstOrderAccumulator<Source> acc(h);
  if (t > 0.0) acc.advance_to(t, quad_points);
  return acc.propagator();
}

struct CollapseChannel {
  Operator op;
  double rate;
};

/// Collapse channels sqrt(rate) C.
struct CollapseSet {
  std::vector<CollapseChannel> channels;
  void add(Operator op, double rate);
  bool empty() const { return channels.empty(); }
};

enum class LindbladMethod {
  adaptive,    // Dormand-Prince on the density matrix
  propagator,  // exact superoperator exponential per sample interval
};

/// Exact Lindblad map over a fixed interval dt, exp(L dt), acting on
/// column-stacked density matrices.
class LindbladPropagator {
 public:
  LindbladPropagator(const Operator& h, const CollapseSet& collapses, double dt);
  double dt() const { return dt_; }
  /// rho <- exp(L dt) rho, followed by hermitian symmetrization.
  void step(Matrix& rho) const;
  /// Batched form of step() over several density matrices.
  void step(std::vector<Matrix>& rhos) const;

 private:
  double dt_;
  Matrix map_;
};

/// Lindblad generator L rho = -i[H, rho] + sum_j r_j (C rho C^dag - {C^dag C, rho}/2).
Matrix lindblad_rhs(const Matrix& h_eff, const CollapseSet& collapses,
                    const Matrix& rho);

MixedTrajectory evolve_lindblad(const Operator& h, const CollapseSet& collapses,
                                const MixedState& rho0, const EvolutionSpec& spec,
                                LindbladMethod method = LindbladMethod::adaptive);

/// Expectation values: row k = sample k, column j = operator j. Throws
/// DomainError if a hermitian operator yields an imaginary residue > 1e-8.
Eigen::MatrixXd observables(const PureTrajectory& traj,
                            const std::vector<Operator>& ops);
Eigen::MatrixXd observables(const MixedTrajectory& traj,
                            const std::vector<Operator>& ops);

/// e^{+i H0 t} psi for diagonal H0 given by its diagonal.
Vector rotate_to_interaction(const Eigen::VectorXd& free_energies,
                             const Vector& psi, double t);
Matrix rotate_to_interaction(const Eigen::VectorXd& free_energies,
                             const Matrix& rho, double t);

}  // namespace kerr

#endif  // KERR_DYNAMICS_HPP
