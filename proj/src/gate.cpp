#include "kerr/gate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kerr/specfun.hpp"

namespace kerr {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

std::string to_string(HamiltonianLevel level) {
  switch (level) {
    case HamiltonianLevel::full: return "full";
    case HamiltonianLevel::rwa: return "rwa";
    case HamiltonianLevel::effective: return "effective";
    case HamiltonianLevel::ld: return "ld";
  }
  return "unknown";
}

HamiltonianLevel parse_level(const std::string& name) {
  if (name == "full") return HamiltonianLevel::full;
  if (name == "rwa") return HamiltonianLevel::rwa;
  if (name == "effective") return HamiltonianLevel::effective;
  if (name == "ld") return HamiltonianLevel::ld;
  throw std::invalid_argument("unknown hamiltonian level '" + name +
                              "' (expected full, rwa, effective or ld)");
}

Operator build_hamiltonian(HamiltonianLevel level, const PhysicalParams& p,
                           const CompositeSpace& s) {
  switch (level) {
    case HamiltonianLevel::full: return full_hamiltonian(p, s);
    case HamiltonianLevel::rwa: return rwa_hamiltonian(p, s);
    case HamiltonianLevel::effective: return effective_hamiltonian(p, s);
    case HamiltonianLevel::ld: return ld_hamiltonian(p, s);
  }
  throw std::invalid_argument("build_hamiltonian: bad level");
}

Operator reference_free_hamiltonian(HamiltonianLevel level,
                                    const PhysicalParams& p,
                                    const CompositeSpace& s) {
  if (level == HamiltonianLevel::ld)
    return p.nu * number_op(s, Mode::phonon) +
           p.omega_c * number_op(s, Mode::photon);
  return free_hamiltonian(p, s);
}

double wrap_pi(double angle) {
  double r = std::remainder(angle, kTwoPi);  // [-pi, pi]
  if (r <= -kPi) r += kTwoPi;
  return r;
}

double wrap_two_pi(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

double angular_distance(double a, double b) {
  return std::abs(std::remainder(a - b, kTwoPi));
}

double GatePhases::conditional_raw() const {
  return raw_phase(0, 0) - raw_phase(0, 1) - raw_phase(1, 0) + raw_phase(1, 1);
}

GatePhases analytic_phases(const PhysicalParams& p, double t) {
  p.validate();
  require_dispersive(p, "analytic_phases");
  const double x = p.eta * p.eta;
  const double rate = p.g * p.g / p.delta * std::exp(-x);
  GatePhases out;
  for (int n = 0; n < 2; ++n)
    for (int m = 0; m < 2; ++m) {
      const double l = laguerre(m, x);
      out.raw[GatePhases::slot(m, n)] = rate * l * l * double(n) * t;
    }
  return out;
}

double solve_pi_gate_eta() {
  const auto residual = [](double eta) {
    const double l = laguerre(1, eta * eta);
    return l * l - 0.5;
  };
  double lo = 0.0, hi = 1.0;  // residual(lo) > 0 > residual(hi)
  for (int i = 0; i < 30; ++i) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0 ? lo : hi) = mid;
  }
  double eta = 0.5 * (lo + hi);
  for (int i = 0; i < 20; ++i) {
    // d/d eta (1 - eta^2)^2 = -4 eta (1 - eta^2)
    const double step = residual(eta) / (-4.0 * eta * (1.0 - eta * eta));
    eta -= step;
    if (std::abs(step) < 1e-16) break;
  }
  return eta;
}

double gate_time(const PhysicalParams& p) {
  require_dispersive(p, "gate_time");
  if (!(p.g > 0.0)) throw DomainError("gate_time: g must be > 0");
  return kTwoPi * std::abs(p.delta) * std::exp(p.eta * p.eta) / (p.g * p.g);
}

double ld_gate_time(const PhysicalParams& p) {
  const double lambda = kerr_coupling(p);
  if (lambda == 0.0) throw DomainError("ld_gate_time: Kerr coupling vanishes");
  return kPi / std::abs(lambda);
}

GatePhases phases_from_overlaps(const std::array<Complex, 4>& overlaps) {
  GatePhases out;
  for (std::size_t k = 0; k < 4; ++k) out.raw[k] = std::arg(overlaps[k]);
  return out;
}

double gate_fidelity(double conditional_phase,
                     const std::array<double, 4>& populations) {
  const double c = std::cos(0.5 * (conditional_phase - kPi));
  double mean = 0.0;
  for (double p : populations) mean += p;
  return c * c * (mean / 4.0);
}

CollapseSet dissipation_channels(const CompositeSpace& s,
                                 const DissipationParams& d) {
  d.validate();
  CollapseSet set;
  if (d.kappa > 0.0) set.add(annihilation_op(s, Mode::photon), d.kappa);
  if (d.gamma > 0.0) set.add(atomic_ops(s).sigma_minus, d.gamma);
  return set;
}

namespace {

struct RegisterState {
  int m;
  int n;
  Eigen::Index index;
};

std::array<RegisterState, 4> register_states(const CompositeSpace& s) {
  std::array<RegisterState, 4> out{};
  for (int n = 0; n < 2; ++n)
    for (int m = 0; m < 2; ++m)
      out[GatePhases::slot(m, n)] = {m, n, s.index(IonLevel::ground, m, n)};
  return out;
}

// Continuous phase tracking: returns `next` shifted by the multiple of 2 pi
// closest to `previous`.
double unwrap_step(double previous, double next) {
  return previous + std::remainder(next - previous, kTwoPi);
}

double excited_population(const Vector& psi, Eigen::Index half) {
  return psi.tail(half).squaredNorm();
}

double excited_population(const Matrix& rho, Eigen::Index half) {
  return rho.diagonal().tail(half).real().sum();
}

void finish_report(GateReport& r) {
  r.conditional_phase = wrap_two_pi(r.phases.conditional_raw());
  r.process_fidelity = gate_fidelity(r.conditional_phase, r.populations);
}

GateReport simulate_closed(GateReport r, const Operator& h,
                           const Eigen::VectorXd& e0, const CompositeSpace& s,
                           double t, const GateOptions& opt) {
  const StaticPropagator prop(h);
  const auto reg = register_states(s);
  const Eigen::Index half = s.dim() / 2;
  EvolutionSpec spec;
  spec.t_final = t;
  spec.sample_count = opt.sample_count;
  const auto times = spec.times();

  std::vector<double> mean_pe(times.size(), 0.0);
  for (std::size_t k = 0; k < 4; ++k) {
    const PureTrajectory traj = prop.evolve(basis_state(s, s.label(reg[k].index)), spec);
    double phase = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const Vector& psi = traj.states[i].amplitudes;
      const double pe = excited_population(psi, half);
      mean_pe[i] += 0.25 * pe;
      r.worst_basis_excited_population =
          std::max(r.worst_basis_excited_population, pe);
      const Complex overlap =
          std::exp(kI * (times[i] * e0(reg[k].index))) * psi(reg[k].index);
      phase = i == 0 ? std::arg(overlap) : unwrap_step(phase, std::arg(overlap));
      if (i + 1 == times.size()) {
        if (std::abs(overlap) < opt.min_overlap)
          throw PhaseExtractionError(
              "simulate_gate: overlap of " + to_string(s.label(reg[k].index)) +
              " with its initial ket fell to " + std::to_string(std::abs(overlap)) +
              " (< " + std::to_string(opt.min_overlap) + ")");
        r.populations[k] = std::norm(overlap);
      }
    }
    r.phases.raw[k] = phase;
  }
  for (double pe : mean_pe)
    r.max_excited_population = std::max(r.max_excited_population, pe);
  r.min_purity = 1.0;
  return r;
}

Vector dominant_eigenvector(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  const Eigen::Index top = rho.rows() - 1;  // eigenvalues ascending
  return es.eigenvectors().col(top);
}

// Basis inputs give populations and excited-state populations; the
// superpositions (|00> + |mn>)/sqrt2 give phases relative to |00>.
GateReport simulate_open(GateReport r, const Operator& h, const Eigen::VectorXd& e0,
                         const CompositeSpace& s, double t,
                         const DissipationParams& d, const GateOptions& opt) {
  EvolutionSpec spec;
  spec.t_final = t;
  spec.sample_count = opt.sample_count;
  const auto times = spec.times();
  const LindbladPropagator prop(h, dissipation_channels(s, d), times[1] - times[0]);
  const auto reg = register_states(s);
  const Eigen::Index half = s.dim() / 2;
  const Eigen::Index ref = reg[0].index;

  std::vector<Matrix> rhos;
  for (std::size_t k = 0; k < 4; ++k)
    rhos.push_back(MixedState(basis_state(s, s.label(reg[k].index))).matrix);
  for (std::size_t k = 1; k < 4; ++k) {
    Vector v = Vector::Zero(s.dim());
    v(ref) = 1.0 / std::sqrt(2.0);
    v(reg[k].index) = 1.0 / std::sqrt(2.0);
    rhos.push_back(v * v.adjoint());
  }

  std::array<double, 4> tracked{};
  double max_mean = 0.0;
  for (std::size_t i = 0;; ++i) {
    double mean = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const double pe = excited_population(rhos[k], half);
      mean += 0.25 * pe;
      r.worst_basis_excited_population =
          std::max(r.worst_basis_excited_population, pe);
    }
    max_mean = std::max(max_mean, mean);
    // Coherence <mn| rho_I |00> tracks the relative phase between samples.
    for (std::size_t k = 1; k < 4; ++k) {
      const Complex c = std::exp(kI * (times[i] * (e0(reg[k].index) - e0(ref)))) *
                        rhos[3 + k](reg[k].index, ref);
      tracked[k] = i == 0 ? std::arg(c) : unwrap_step(tracked[k], std::arg(c));
    }
    if (i + 1 == times.size()) break;
    prop.step(rhos);
  }
  r.max_excited_population = max_mean;

  r.min_purity = 1.0;
  for (std::size_t k = 0; k < 4; ++k) {
    r.populations[k] = rhos[k](reg[k].index, reg[k].index).real();
    r.min_purity = std::min(r.min_purity, MixedState(s, rhos[k]).purity());
  }
  r.phases.raw[0] = 0.0;  // gauge reference
  for (std::size_t k = 1; k < 4; ++k) {
    const Matrix rho_i = rotate_to_interaction(e0, rhos[3 + k], t);
    const Vector v = dominant_eigenvector(rho_i);
    const Complex rel = v(reg[k].index) * std::conj(v(ref));
    if (std::abs(rel) < 1e-8)
      throw PhaseExtractionError(
          "simulate_gate: dominant eigenvector has no weight on " +
          to_string(s.label(reg[k].index)));
    r.phases.raw[k] = unwrap_step(tracked[k], std::arg(rel));
  }
  return r;
}

}  // namespace

GateReport simulate_gate(HamiltonianLevel level, const PhysicalParams& p,
                         const CompositeSpace& s, double t,
                         const std::optional<DissipationParams>& dissipation,
                         const GateOptions& options) {
  if (s.phonon_cutoff() < 2 || s.photon_cutoff() < 2)
    throw DomainError("simulate_gate: both bosonic cutoffs must be >= 2");
  if (!(t > 0.0)) throw DomainError("simulate_gate: gate time must be > 0");
  GateReport r;
  r.level = level;
  r.t_gate = t;
  r.regime = regime_check(p);
  r.dissipative = dissipation.has_value();
  const Operator h = build_hamiltonian(level, p, s);
  const Eigen::VectorXd e0 =
      reference_free_hamiltonian(level, p, s).matrix.diagonal().real();
  r = dissipation ? simulate_open(std::move(r), h, e0, s, t, *dissipation, options)
                  : simulate_closed(std::move(r), h, e0, s, t, options);
  finish_report(r);
  return r;
}

double InfidelitySeries::max() const {
  double m = 0.0;
  for (double v : infidelity) m = std::max(m, v);
  return m;
}

InfidelitySeries effective_vs_full_fidelity(const PhysicalParams& p,
                                            const CompositeSpace& s,
                                            const EvolutionSpec& spec,
                                            const PureState& initial,
                                            const RegimeThresholds& thresholds) {
  const RegimeReport regime = regime_check(p, thresholds);
  if (regime.overall() == Verdict::fail)
    throw DomainError("effective_vs_full_fidelity: regime check failed for " +
                      regime.conditions_with(Verdict::fail));
  const Eigen::VectorXd e0 = free_hamiltonian(p, s).matrix.diagonal().real();
  const PureTrajectory full = evolve_static(full_hamiltonian(p, s), initial, spec);
  const PureTrajectory eff =
      evolve_static(effective_hamiltonian(p, s), initial, spec);
  InfidelitySeries out{full.times, {}};
  out.infidelity.reserve(out.times.size());
  for (std::size_t i = 0; i < out.times.size(); ++i) {
    const Vector a = rotate_to_interaction(e0, full.states[i].amplitudes, out.times[i]);
    const Vector b = rotate_to_interaction(e0, eff.states[i].amplitudes, out.times[i]);
    out.infidelity.push_back(std::max(0.0, 1.0 - std::norm(b.dot(a))));
  }
  return out;
}

double transition_envelope(const PhysicalParams& p, int n, int m, int m_prime) {
  const double shift = p.nu * double(m - m_prime);
  const double plus = p.delta + shift;
  const double minus = p.delta - shift;
  if (std::abs(plus) < 1e-6 * p.nu || std::abs(minus) < 1e-6 * p.nu)
    throw ResonanceError("transition_probability: resonance delta = k nu with k = " +
                         std::to_string(std::lround(
                             (std::abs(plus) < std::abs(minus) ? -shift : shift) /
                             p.nu)) +
                         " (excluded by the validity conditions)");
  const double amp = p.g * std::exp(-0.5 * p.eta * p.eta);
  constexpr double kSlackFactor = 4.0;
  return double(n) * amp * amp * (1.0 / (plus * plus) + 1.0 / (minus * minus)) *
         kSlackFactor;
}

namespace {

struct TransitionSetup {
  InteractionPictureHamiltonian source;
  Eigen::Index from;
  Eigen::Index to;
  double envelope;
};

TransitionSetup make_transition(const PhysicalParams& p, const CompositeSpace& s,
                                int n, int m, int m_prime) {
  if (n < 1) throw DomainError("transition_probability: n must be >= 1");
  if (n >= s.photon_cutoff() || m < 0 || m_prime < 0 ||
      m >= s.phonon_cutoff() || m_prime >= s.phonon_cutoff())
    throw DomainError("transition_probability: quantum numbers outside truncation");
  const double env = transition_envelope(p, n, m, m_prime);
  return {InteractionPictureHamiltonian(free_hamiltonian(p, s), coupling_term(p, s)),
          s.index(IonLevel::ground, m, n), s.index(IonLevel::excited, m_prime, n - 1),
          env};
}

}  // namespace

TransitionResult transition_probability(const PhysicalParams& p,
                                        const CompositeSpace& s, int n, int m,
                                        int m_prime, double t, int quad_points) {
  const TransitionSetup setup = make_transition(p, s, n, m, m_prime);
  const Operator u1 = first_order_propagator(setup.source, t, quad_points);
  return {std::norm(u1.matrix(setup.to, setup.from)), setup.envelope};
}

TransitionSeries transition_probability_series(const PhysicalParams& p,
                                               const CompositeSpace& s, int n,
                                               int m, int m_prime,
                                               const std::vector<double>& times,
                                               int points_per_period) {
  const TransitionSetup setup = make_transition(p, s, n, m, m_prime);
  const double omega = std::abs(p.delta + p.nu * double(m_prime - m));
  FirstOrderAccumulator acc(setup.source);
  TransitionSeries out{times, {}, setup.envelope};
  out.probability.reserve(times.size());
  for (double t : times) {
    if (t > acc.time()) {
      const double periods = omega * (t - acc.time()) / kTwoPi;
      const int nodes = std::max(
          8, static_cast<int>(std::ceil(points_per_period * periods / 8.0)) * 8);
      acc.advance_to(t, nodes);
    }
    out.probability.push_back(std::norm(acc.propagator().matrix(setup.to, setup.from)));
  }
  return out;
}

}  // namespace kerr
