// Acceptance checks 1-11. One PASS/FAIL line per criterion; exit status is the
// number of failures.
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "kerr/dynamics.hpp"
#include "kerr/fock.hpp"
#include "kerr/gate.hpp"
#include "kerr/hamiltonians.hpp"
#include "kerr/scenario.hpp"
#include "kerr/specfun.hpp"

using namespace kerr;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

EvolutionSpec grid(double t_final, int samples) {
  EvolutionSpec s;
  s.t_final = t_final;
  s.sample_count = samples;
  return s;
}

bool within(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

Outcome pi_gate_eta() {
  const double eta = solve_pi_gate_eta();
  const double l1 = laguerre(1, eta * eta);
  const double residual = std::abs(l1 * l1 - 0.5);
  const bool ok = std::abs(eta - 0.541196) < 5e-7 && residual < 1e-12 &&
                  std::round(eta * 100.0) == 54.0;
  return {ok, fmt("eta = %.9f, |L1(eta^2)^2 - 1/2| = %.2e", eta, residual)};
}

Outcome kerr_coupling_value() {
  const double lambda = kerr_coupling(reference_parameters(0.05));
  const bool ok = std::abs(lambda - 4.74e3) < 5e-3 * 4.74e3 && within(lambda, 5e3, 0.10);
  return {ok, fmt("lambda = %.2f rad/s (%.2f Hz), target 5e3 +-10%%", lambda, lambda / kTwoPi)};
}

Outcome gate_time_value() {
  const double t = gate_time(reference_parameters(solve_pi_gate_eta()));
  const bool ok = std::abs(t - 8.88e-6) < 5e-3 * 8.88e-6 && within(t, 9e-6, 0.05);
  return {ok, fmt("t_gate = %.4f us, target 9 us +-5%%", t * 1e6)};
}

Outcome ld_gate_time_value() {
  const double t = ld_gate_time(reference_parameters(0.05));
  const double kappa = reference_dissipation().kappa;
  const double ratio_rad = t * kappa;
  const double ratio_hz = t * kappa / kTwoPi;
  const bool ok = std::abs(t - 662e-6) < 5e-3 * 662e-6 && within(t, 620e-6, 0.10) &&
                  within(ratio_rad, 160.0, 0.10);
  return {ok, fmt("t_ld = %.2f us (target 620 +-10%%), t*kappa = %.1f (kappa in rad/s, "
                  "target 160 +-10%%), %.1f (kappa in Hz)",
                  t * 1e6, ratio_rad, ratio_hz)};
}

double window_max_infidelity(double delta_over_g) {
  PhysicalParams p = reference_parameters(0.05);
  p.delta = delta_over_g * p.g;
  p.nu = 20.0 * p.delta;
  p.omega_c = 10.0 * p.delta;
  const CompositeSpace s(6, 2);
  const EvolutionSpec spec = grid(40.0 / p.delta, 2001);
  double worst = 0.0;
  for (int n = 0; n <= 1; ++n)
    for (int m = 0; m <= 1; ++m)
      worst = std::max(worst, effective_vs_full_fidelity(
                                  p, s, spec, basis_state(s, IonLevel::ground, m, n))
                                  .max());
  // Equal superposition of the register.
  Vector v = Vector::Zero(s.dim());
  for (int n = 0; n <= 1; ++n)
    for (int m = 0; m <= 1; ++m) v(s.index(IonLevel::ground, m, n)) = 0.5;
  worst = std::max(worst, effective_vs_full_fidelity(p, s, spec, PureState(s, v)).max());
  return worst;
}

Outcome dispersive_validity() {
  const double i10 = window_max_infidelity(10.0);
  const double i20 = window_max_infidelity(20.0);
  const double ratio = i20 / i10;
  const bool ok = std::isfinite(i10) && i10 > 0.0 && ratio <= 0.35;
  return {ok, fmt("max infidelity %.3e (delta=10g), %.3e (delta=20g), ratio %.3f <= 0.35",
                  i10, i20, ratio)};
}

Outcome spontaneous_emission() {
  const CompositeSpace s(6, 2);
  const PhysicalParams p = reference_parameters(solve_pi_gate_eta());
  const double t = gate_time(p);
  const GateReport closed = simulate_gate(HamiltonianLevel::full, p, s, t);
  DissipationParams d;
  d.gamma = reference_dissipation().gamma;
  const GateReport open = simulate_gate(HamiltonianLevel::full, p, s, t, d);
  const double bound = 2.0 * std::pow(p.g / p.delta, 2);
  const double shift = angular_distance(open.conditional_phase, closed.conditional_phase);
  const bool ok = closed.max_excited_population <= bound && shift < 0.1;
  return {ok, fmt("max P_e %.4f <= %.2f (worst single input %.4f), phase shift with gamma "
                  "%.4f rad < 0.1",
                  closed.max_excited_population, bound,
                  closed.worst_basis_excited_population, shift)};
}

Outcome conditional_phase() {
  const CompositeSpace s(6, 2);
  const PhysicalParams p = reference_parameters(solve_pi_gate_eta());
  const double t = gate_time(p);
  const double eff = simulate_gate(HamiltonianLevel::effective, p, s, t).conditional_phase;
  const double full = simulate_gate(HamiltonianLevel::full, p, s, t).conditional_phase;
  const double e_eff = angular_distance(eff, kPi), e_full = angular_distance(full, kPi);
  return {e_eff < 1e-8 && e_full < 0.05,
          fmt("effective |phi - pi| = %.2e < 1e-8, full |phi - pi| = %.4f < 0.05", e_eff,
              e_full)};
}

Outcome cosine_decomposition() {
  const double eta = 0.5412;
  const int n = 6;
  const int k = n + guard_levels(eta);
  const Matrix a = ladder_matrix(k);
  const Matrix ad = a.adjoint();
  Matrix sum = Matrix::Zero(k, k);
  Matrix ad_pow = Matrix::Identity(k, k);
  for (int alpha = 0; alpha <= k; ++alpha) {
    Matrix a_pow = Matrix::Identity(k, k);
    for (int beta = 0; beta <= k && alpha + beta <= 170; ++beta) {
      const double c = expansion_coefficient(alpha, beta, eta);
      if (c != 0.0) sum += c * ad_pow * a_pow;
      a_pow = a_pow * a;
    }
    ad_pow = ad_pow * ad;
  }
  const double err =
      (cos_position_matrix(n, eta) - sum.topLeftCorner(n, n)).cwiseAbs().maxCoeff();
  return {err < 1e-8, fmt("max entry error %.2e < 1e-8 (cutoff %d, %d guards)", err, n,
                          k - n)};
}

Outcome transition_bound() {
  const PhysicalParams p = reference_parameters(0.05);
  const CompositeSpace s(6, 2);
  const double t_end = 40.0 / p.delta;
  std::vector<double> times(1000);
  for (int i = 0; i < 1000; ++i) times[i] = t_end * (i + 1) / 1000.0;
  int violations = 0;
  double worst = 0.0;
  const int triples[3][3] = {{0, 0, 1}, {0, 2, 1}, {1, 1, 1}};
  for (const auto& tr : triples) {
    const TransitionSeries ts =
        transition_probability_series(p, s, tr[2], tr[0], tr[1], times);
    for (double prob : ts.probability) {
      if (prob > ts.envelope) ++violations;
      worst = std::max(worst, prob / ts.envelope);
    }
  }
  PhysicalParams res = p;
  res.nu = res.delta;
  bool rejected = false;
  try {
    transition_probability(res, s, 1, 0, 1, t_end, 64);
  } catch (const ResonanceError&) {
    rejected = true;
  }
  return {violations == 0 && rejected,
          fmt("%d violations over 3000 samples (max P/envelope %.3f), delta = nu %s",
              violations, worst, rejected ? "rejected" : "NOT rejected")};
}

Outcome numerical_quality() {
  std::vector<std::string> parts;
  bool ok = true;
  const auto note = [&](bool pass, std::string what) {
    ok = ok && pass;
    parts.push_back(std::move(what) + (pass ? "" : " [FAIL]"));
  };

  const PhysicalParams p = reference_parameters(solve_pi_gate_eta());
  {
    const CompositeSpace s(6, 3);
    Vector v = Vector::Zero(s.dim());
    v(s.index(IonLevel::ground, 1, 1)) = 1.0;
    v(s.index(IonLevel::excited, 0, 0)) = Complex(0.3, 0.4);
    PureState psi0(s, v);
    psi0.normalize();
    const PureTrajectory traj = evolve_static(full_hamiltonian(p, s), psi0, grid(gate_time(p), 1000));
    double drift = 0.0;
    for (const auto& st : traj.states) drift = std::max(drift, std::abs(st.norm() - 1.0));
    note(drift < 1e-9, fmt("norm drift %.1e", drift));
  }
  {
    const CompositeSpace s(4, 2);
    const MixedTrajectory traj =
        evolve_lindblad(full_hamiltonian(p, s), dissipation_channels(s, reference_dissipation()),
                        MixedState(basis_state(s, IonLevel::ground, 1, 1)),
                        grid(gate_time(p), 401), LindbladMethod::propagator);
    double drift = 0.0;
    for (const auto& rho : traj.states)
      drift = std::max(drift, std::abs(rho.trace().real() - 1.0));
    note(drift < 1e-6, fmt("trace drift %.1e", drift));
  }
  {
    const CompositeSpace s(4, 2);
    const PhysicalParams q = reference_parameters(0.05);
    const InteractionPictureHamiltonian hi(free_hamiltonian(q, s), coupling_term(q, s));
    Vector v = Vector::Zero(s.dim());
    v(s.index(IonLevel::ground, 0, 1)) = 1.0;
    v(s.index(IonLevel::ground, 1, 1)) = 1.0;
    PureState psi0(s, v);
    psi0.normalize();
    const EvolutionSpec spec = grid(20.0 / q.delta, 41);
    const PureTrajectory lab = evolve_static(full_hamiltonian(q, s), psi0, spec);
    const PureTrajectory ip = evolve_time_dependent(hi, psi0, spec);
    double err = 0.0;
    for (std::size_t k = 0; k < ip.times.size(); ++k) {
      const Vector back =
          rotate_to_interaction(hi.free_energies(), ip.states[k].amplitudes, -ip.times[k]);
      err = std::max(err, (back - lab.states[k].amplitudes).cwiseAbs().maxCoeff());
    }
    note(err < 1e-6, fmt("picture error %.1e", err));
  }
  {
    const CompositeSpace s(2, 2);
    const double kappa = reference_dissipation().kappa;
    CollapseSet c;
    c.add(annihilation_op(s, Mode::photon), kappa);
    double err = 0.0;
    for (LindbladMethod m : {LindbladMethod::adaptive, LindbladMethod::propagator}) {
      const MixedTrajectory traj =
          evolve_lindblad(zero_op(s), c, MixedState(basis_state(s, IonLevel::ground, 0, 1)),
                          grid(3.0 / kappa, 101), m);
      const Eigen::MatrixXd n = observables(traj, {number_op(s, Mode::photon)});
      for (std::size_t k = 0; k < traj.times.size(); ++k)
        err = std::max(err, std::abs(n(k, 0) - std::exp(-kappa * traj.times[k])));
    }
    note(err < 1e-6, fmt("kappa decay error %.1e", err));
  }
  {
    const CompositeSpace s(2, 3);
    PhysicalParams q = reference_parameters(0.0);
    q.delta = 0.0;
    q.nu = 2.0 * q.g;
    q.omega_c = 5.0 * q.g;
    const PureTrajectory traj = evolve_static(
        full_hamiltonian(q, s), basis_state(s, IonLevel::excited, 0, 0), grid(3.0 / q.g, 100));
    const Eigen::MatrixXd pe = observables(traj, {excited_projector(s)});
    double err = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k)
      err = std::max(err, std::abs(pe(k, 0) - std::pow(std::cos(q.g * traj.times[k]), 2)));
    note(err < 1e-8, fmt("Rabi error %.1e", err));
  }
  std::string detail;
  for (const auto& s : parts) detail += (detail.empty() ? "" : ", ") + s;
  return {ok, detail};
}

Outcome cli_determinism() {
  const std::string sweep =
      "label = acceptance\ng_hz = 1.51e6\neta = 0.5\nphonon_cutoff = 4\n"
      "reduction = conditional_phase_rad, process_fidelity, max_excited_population\n"
      "[sweep.eta]\nvalues = 0.3, 0.45, 0.5412, 0.6\n"
      "[sweep.delta_over_g]\nvalues = 10, 15\n";
  const std::string sim =
      "label = acceptance\ng_hz = 1.51e6\neta = 0.541196\nphonon_cutoff = 4\n"
      "samples = 201\namplitude_columns = true\n";
  int compared = 0;
  bool same = true;
  const auto compare = [&](Command cmd, const std::string& cfg) {
    RunOptions one, four;
    four.threads = 4;
    const RunResult a = run_config(cmd, cfg, one);
    const RunResult b = run_config(cmd, cfg, one);
    const RunResult c = run_config(cmd, cfg, four);
    if (a.exit_code != 0 || a.files.empty()) {
      same = false;
      return;
    }
    for (std::size_t i = 0; i < a.files.size(); ++i) {
      ++compared;
      same = same && b.files.size() == a.files.size() && c.files.size() == a.files.size() &&
             a.files[i].content == b.files[i].content && a.files[i].content == c.files[i].content;
    }
  };
  compare(Command::sweep, sweep);
  compare(Command::simulate, sim);
  compare(Command::gate, sim);
  return {same && compared > 0,
          fmt("%d output files byte-identical across reruns and 1 vs 4 workers", compared)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"pi-gate Lamb-Dicke parameter", pi_gate_eta},
      {"Kerr coupling", kerr_coupling_value},
      {"gate time", gate_time_value},
      {"Lamb-Dicke gate time", ld_gate_time_value},
      {"dispersive validity", dispersive_validity},
      {"adiabatic elimination and spontaneous emission", spontaneous_emission},
      {"conditional phase", conditional_phase},
      {"cosine decomposition", cosine_decomposition},
      {"first-order transition bound", transition_bound},
      {"numerical quality gates", numerical_quality},
      {"CLI determinism", cli_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, checks[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(checks.size()) - failures, checks.size());
  return failures;
}
