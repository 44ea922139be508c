#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kerr/dynamics.hpp"
#include "kerr/gate.hpp"
#include "kerr/hamiltonians.hpp"

using namespace kerr;

namespace {

EvolutionSpec grid(double t_final, int samples, double rel_tol = 1e-9) {
  EvolutionSpec s;
  s.t_final = t_final;
  s.sample_count = samples;
  s.rel_tol = rel_tol;
  return s;
}

/// Resonant Jaynes-Cummings: eta = 0, delta = 0.
PhysicalParams rabi_params() {
  PhysicalParams p = reference_parameters(0.0);
  p.delta = 0.0;
  p.nu = 2.0 * p.g;
  p.omega_c = 5.0 * p.g;
  return p;
}

double max_norm_drift(const PureTrajectory& traj) {
  double d = 0.0;
  for (const auto& s : traj.states) d = std::max(d, std::abs(s.norm() - 1.0));
  return d;
}

}  // namespace

TEST_CASE("evolution spec validation and grid") {
  EvolutionSpec s = grid(1.0, 5);
  CHECK(s.times() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  s.sample_count = 1;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = grid(0.0, 5);
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = grid(1.0, 5);
  s.rel_tol = 0.0;
  CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("static evolution") {
  SUBCASE("diagonal Kerr term gives a global phase of -1") {
    const CompositeSpace s(2, 2);
    const double lambda = 4.7438e3;
    Matrix h = Matrix::Zero(s.dim(), s.dim());
    const auto k = s.index(IonLevel::ground, 1, 1);
    h(k, k) = lambda;
    const PureState psi0 = basis_state(s, IonLevel::ground, 1, 1);
    const PureState out = StaticPropagator(Operator(s, h)).at(psi0, std::numbers::pi / lambda);
    CHECK(std::abs(out.amplitudes(k) + 1.0) < 1e-12);
  }
  SUBCASE("unitarity and energy conservation across 1000 samples") {
    const CompositeSpace s(6, 3);
    const PhysicalParams p = reference_parameters(0.5412);
    const Operator h = full_hamiltonian(p, s);
    Vector v = Vector::Zero(s.dim());
    v(s.index(IonLevel::ground, 1, 1)) = 1.0;
    v(s.index(IonLevel::excited, 0, 0)) = Complex(0.3, 0.4);
    PureState psi0(s, v);
    psi0.normalize();
    const PureTrajectory traj = evolve_static(h, psi0, grid(gate_time(p), 1000));
    CHECK(max_norm_drift(traj) < 1e-9);
    const double e0 = expectation(h, psi0).real();
    for (const auto& st : traj.states) {
      CHECK(std::abs(expectation(h, st).real() - e0) < 1e-8 * std::abs(e0));
      CHECK(state_fidelity(st, st) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("resonant Rabi oscillation") {
    const CompositeSpace s(2, 3);
    const PhysicalParams p = rabi_params();
    const PureState psi0 = basis_state(s, IonLevel::excited, 0, 0);
    const PureTrajectory traj = evolve_static(full_hamiltonian(p, s), psi0, grid(3.0 / p.g, 100));
    const Eigen::MatrixXd pe = observables(traj, {excited_projector(s)});
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      const double c = std::cos(p.g * traj.times[k]);
      CHECK(std::abs(pe(k, 0) - c * c) < 1e-8);
    }
  }
  SUBCASE("non-hermitian input is rejected") {
    const CompositeSpace s(2, 1);
    Matrix h = Matrix::Zero(4, 4);
    h(0, 1) = 1.0;
    CHECK_THROWS_AS(StaticPropagator(Operator(s, h)), DomainError);
  }
}

TEST_CASE("adaptive evolution of a constant Hamiltonian matches static") {
  const CompositeSpace s(3, 2);
  PhysicalParams p = reference_parameters(0.3);
  p.nu = 3.0 * p.g;
  p.omega_c = 2.0 * p.g;
  p.delta = 1.5 * p.g;
  const Operator h = full_hamiltonian(p, s);
  const PureState psi0 = basis_state(s, IonLevel::ground, 1, 1);
  const EvolutionSpec spec = grid(20.0 / p.g, 50);
  const PureTrajectory a = evolve_time_dependent(ConstantHamiltonian(h), psi0, spec);
  const PureTrajectory b = evolve_static(h, psi0, spec);
  for (std::size_t k = 0; k < a.times.size(); ++k)
    CHECK((a.states[k].amplitudes - b.states[k].amplitudes).cwiseAbs().maxCoeff() <
          10 * spec.rel_tol);
}

TEST_CASE("lab and interaction pictures agree") {
  const CompositeSpace s(4, 2);
  const PhysicalParams p = reference_parameters(0.05);
  const Operator h = full_hamiltonian(p, s);
  const Operator h0 = free_hamiltonian(p, s);
  const InteractionPictureHamiltonian hi(h0, coupling_term(p, s));
  Vector v = Vector::Zero(s.dim());
  v(s.index(IonLevel::ground, 0, 1)) = 1.0;
  v(s.index(IonLevel::ground, 1, 1)) = 1.0;
  PureState psi0(s, v);
  psi0.normalize();
  const EvolutionSpec spec = grid(20.0 / p.delta, 41);
  const PureTrajectory lab = evolve_static(h, psi0, spec);

  const auto picture_error = [&](double rel_tol) {
    EvolutionSpec sp = spec;
    sp.rel_tol = rel_tol;
    const PureTrajectory ip = evolve_time_dependent(hi, psi0, sp);
    double err = 0.0;
    for (std::size_t k = 0; k < ip.times.size(); ++k) {
      const Vector back = rotate_to_interaction(hi.free_energies(),
                                                ip.states[k].amplitudes, -ip.times[k]);
      err = std::max(err, (back - lab.states[k].amplitudes).cwiseAbs().maxCoeff());
    }
    return err;
  };
  const double e9 = picture_error(1e-9);
  const double e6 = picture_error(1e-6);
  CHECK(e9 < 1e-6);
  CHECK(e9 < e6);
}

TEST_CASE("norm drift over the full gate window") {
  const CompositeSpace s(4, 2);
  const PhysicalParams p = reference_parameters(solve_pi_gate_eta());
  const InteractionPictureHamiltonian hi(free_hamiltonian(p, s), coupling_term(p, s));
  Vector v = Vector::Constant(s.dim() / 2, 1.0);
  v.conservativeResize(s.dim());
  v.tail(s.dim() / 2).setZero();
  PureState psi0(s, v);
  psi0.normalize();
  IntegrationStats stats;
  const PureTrajectory traj = evolve_time_dependent(hi, psi0, grid(gate_time(p), 201), &stats);
  CHECK(max_norm_drift(traj) < 1e-7);
  CHECK(stats.accepted > 0);
}

TEST_CASE("integrator order on the Rabi problem is at least 4") {
  const CompositeSpace s(2, 2);
  const PhysicalParams p = rabi_params();
  const Operator h = full_hamiltonian(p, s) - free_hamiltonian(p, s);
  const double t1 = 2.0 / p.g;
  const PureState psi0 = basis_state(s, IonLevel::excited, 0, 0);
  const Vector exact = StaticPropagator(h).at(psi0, t1).amplitudes;
  const auto rhs = [&](double, const Vector& y, Vector& dy) { dy = -kI * (h.matrix * y); };
  const auto err = [&](long steps) {
    return (integrate_fixed_step(rhs, 0.0, t1, Vector(psi0.amplitudes), steps) - exact).norm();
  };
  const double e1 = err(20), e2 = err(40);
  CHECK(std::log2(e1 / e2) >= 4.0);
}

TEST_CASE("step budget exhaustion reports the last good time") {
  const CompositeSpace s(2, 2);
  const PhysicalParams p = reference_parameters(0.05);
  const InteractionPictureHamiltonian hi(free_hamiltonian(p, s), coupling_term(p, s));
  EvolutionSpec spec = grid(1e-5, 3);
  spec.max_steps = 10;
  try {
    evolve_time_dependent(hi, basis_state(s, IonLevel::ground, 0, 1), spec);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.last_good_time() > 0.0);
    CHECK(e.last_good_time() < 1e-5);
  }
}

TEST_CASE("first-order propagator") {
  const CompositeSpace s(2, 2);
  const PhysicalParams p = reference_parameters(0.05);
  const InteractionPictureHamiltonian hi(free_hamiltonian(p, s), coupling_term(p, s));
  const Operator u0 = first_order_propagator(hi, 0.0, 16);
  CHECK((u0.matrix - Matrix::Identity(s.dim(), s.dim())).cwiseAbs().maxCoeff() == 0.0);

  const Operator hc = coupling_term(p, s);
  const Operator uc = first_order_propagator(ConstantHamiltonian(hc), 3e-7, 8);
  CHECK((uc.matrix - (Matrix::Identity(s.dim(), s.dim()) - kI * 3e-7 * hc.matrix))
            .cwiseAbs().maxCoeff() < 1e-15 * p.g * 3e-7 * 10);

  const int periods = 5;
  const double t = periods * 2.0 * std::numbers::pi / p.delta + 0.37 / p.delta;
  const Operator u = first_order_propagator(hi, t, 64 * (periods + 1));
  const double amp = p.g * std::exp(-0.5 * p.eta * p.eta);
  const Complex expected = -kI * amp * (std::exp(kI * (p.delta * t)) - 1.0) / (kI * p.delta);
  const Complex got = u.element({IonLevel::excited, 0, 0}, {IonLevel::ground, 0, 1});
  CHECK(std::abs(got - expected) < 1e-10);
  CHECK_THROWS_AS(first_order_propagator(hi, -1.0, 16), DomainError);
  CHECK_THROWS_AS(first_order_propagator(hi, 1e-8, 1), DomainError);
}

TEST_CASE("quadrature rule integrates polynomials") {
  for (int order = 1; order <= 8; ++order) {
    const QuadratureRule r = gauss_legendre(order);
    CHECK(r.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
    double x2 = 0.0;
    for (int k = 0; k < order; ++k) x2 += r.weights(k) * std::pow(r.nodes(k), 2 * order - 2);
    CHECK(x2 == doctest::Approx(2.0 / (2 * order - 1)).epsilon(1e-13));
  }
}

TEST_CASE("Lindblad evolution") {
  const double kappa = reference_dissipation().kappa;
  SUBCASE("cavity decay from one photon") {
    const CompositeSpace s(2, 2);
    const Operator h = zero_op(s);
    CollapseSet c;
    c.add(annihilation_op(s, Mode::photon), kappa);
    const MixedState rho0(basis_state(s, IonLevel::ground, 0, 1));
    for (LindbladMethod m : {LindbladMethod::adaptive, LindbladMethod::propagator}) {
      const MixedTrajectory traj = evolve_lindblad(h, c, rho0, grid(1.0 / kappa, 51), m);
      const Eigen::MatrixXd n = observables(traj, {number_op(s, Mode::photon)});
      for (std::size_t k = 0; k < traj.times.size(); ++k) {
        CHECK(std::abs(n(k, 0) - std::exp(-kappa * traj.times[k])) < 1e-6);
        CHECK(std::abs(traj.states[k].trace().real() - 1.0) < 1e-6);
      }
      CHECK(n(50, 0) == doctest::Approx(0.367879).epsilon(1e-6));
    }
  }
  SUBCASE("no channels reduces to unitary evolution") {
    const CompositeSpace s(3, 2);
    PhysicalParams p = reference_parameters(0.3);
    p.nu = 3.0 * p.g;
    p.omega_c = 2.0 * p.g;
    p.delta = 1.5 * p.g;
    const Operator h = full_hamiltonian(p, s);
    const PureState psi0 = basis_state(s, IonLevel::excited, 1, 0);
    const EvolutionSpec spec = grid(10.0 / p.g, 21);
    const PureTrajectory pure = evolve_static(h, psi0, spec);
    for (LindbladMethod m : {LindbladMethod::adaptive, LindbladMethod::propagator}) {
      const MixedTrajectory mixed = evolve_lindblad(h, {}, MixedState(psi0), spec, m);
      for (std::size_t k = 0; k < spec.times().size(); ++k) {
        const Vector& v = pure.states[k].amplitudes;
        CHECK((mixed.states[k].matrix - v * v.adjoint()).cwiseAbs().maxCoeff() < 1e-6);
      }
    }
  }
  SUBCASE("trace and positivity across the gate window at reference rates") {
    const CompositeSpace s(4, 2);
    const PhysicalParams p = reference_parameters(solve_pi_gate_eta());
    const CollapseSet c = dissipation_channels(s, reference_dissipation());
    Vector v = Vector::Zero(s.dim());
    v(s.index(IonLevel::ground, 0, 1)) = 1.0;
    v(s.index(IonLevel::ground, 1, 1)) = 1.0;
    PureState psi0(s, v);
    psi0.normalize();
    const MixedTrajectory traj = evolve_lindblad(full_hamiltonian(p, s), c, MixedState(psi0),
                                                 grid(gate_time(p), 101),
                                                 LindbladMethod::propagator);
    for (const auto& rho : traj.states) {
      CHECK(std::abs(rho.trace().real() - 1.0) < 1e-6);
      CHECK(hermiticity_residual(rho.matrix) < 1e-12);
      CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(rho.matrix).eigenvalues().minCoeff() >= -1e-6);
    }
  }
  SUBCASE("negative rates are rejected") {
    CollapseSet c;
    CHECK_THROWS_AS(c.add(zero_op(CompositeSpace(2, 2)), -1.0), DomainError);
  }
}

TEST_CASE("observables") {
  const CompositeSpace s(6, 3);
  SUBCASE("constant phonon number") {
    const PhysicalParams p = reference_parameters(0.05);
    const PureTrajectory traj = evolve_static(effective_hamiltonian(p, s),
                                              basis_state(s, IonLevel::ground, 2, 0),
                                              grid(1e-6, 11));
    const Eigen::MatrixXd n = observables(traj, {number_op(s, Mode::phonon)});
    for (Eigen::Index k = 0; k < n.rows(); ++k) CHECK(n(k, 0) == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("effective dynamics never excites the ion") {
    const PhysicalParams p = reference_parameters(0.5412);
    Vector v = Vector::Zero(s.dim());
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n) v(s.index(IonLevel::ground, m, n)) = 0.5;
    const PureTrajectory traj =
        evolve_static(effective_hamiltonian(p, s), PureState(s, v), grid(gate_time(p), 51));
    const Eigen::MatrixXd pe = observables(traj, {excited_projector(s)});
    CHECK(pe.cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("rwa conservation laws") {
    const PhysicalParams p = reference_parameters(0.5412);
    Vector v = Vector::Zero(s.dim());
    v(s.index(IonLevel::ground, 1, 2)) = 1.0;
    v(s.index(IonLevel::excited, 3, 0)) = 1.0;
    PureState psi0(s, v);
    psi0.normalize();
    const PureTrajectory traj = evolve_static(rwa_hamiltonian(p, s), psi0, grid(2e-6, 101));
    const Eigen::MatrixXd o = observables(traj, {number_op(s, Mode::phonon),
                                                number_op(s, Mode::photon),
                                                excited_projector(s)});
    const double total0 = o(0, 0) + o(0, 1) + o(0, 2);
    for (Eigen::Index k = 0; k < o.rows(); ++k) {
      CHECK(std::abs(o(k, 0) + o(k, 1) + o(k, 2) - total0) < 1e-8);
      CHECK(std::abs(o(k, 0) - o(0, 0)) < 1e-8);
    }
  }
  SUBCASE("non-hermitian operators are rejected") {
    const PureTrajectory traj{s, {0.0}, {basis_state(s, IonLevel::ground, 0, 0)}};
    CHECK_THROWS_AS(observables(traj, {annihilation_op(s, Mode::photon)}), DomainError);
    CHECK_THROWS_AS(observables(traj, {identity_op(CompositeSpace(2, 2))}), DimensionError);
  }
}
