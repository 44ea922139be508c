#ifndef KERR_GATE_HPP
#define KERR_GATE_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "kerr/dynamics.hpp"
#include "kerr/hamiltonians.hpp"

namespace kerr {

/// Exact resonance delta = k nu in a perturbative expression.
class ResonanceError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A basis-state phase could not be read off the evolved state.
class PhaseExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class HamiltonianLevel { full, rwa, effective, ld };
std::string to_string(HamiltonianLevel level);
/// Throws std::invalid_argument for unknown names.
HamiltonianLevel parse_level(const std::string& name);

Operator build_hamiltonian(HamiltonianLevel level, const PhysicalParams& p,
                           const CompositeSpace& s);
/// Free Hamiltonian removed before reading phases. For the Lamb-Dicke level
/// the ion term is dropped because that Hamiltonian carries no ion energy.
Operator reference_free_hamiltonian(HamiltonianLevel level,
                                    const PhysicalParams& p,
                                    const CompositeSpace& s);

/// Wraps into (-pi, pi].
double wrap_pi(double angle);
/// Wraps into [0, 2 pi).
double wrap_two_pi(double angle);
/// Smallest |a - b| modulo 2 pi.
double angular_distance(double a, double b);

/// Phases of the register states |m, n> (phonon m, photon n), stored in the
/// order 00, 10, 01, 11.
struct GatePhases {
  std::array<double, 4> raw{};  // accumulated, unwrapped

  static constexpr std::size_t slot(int m, int n) { return std::size_t(2 * n + m); }
  double raw_phase(int m, int n) const { return raw[slot(m, n)]; }
  double wrapped(int m, int n) const { return wrap_pi(raw_phase(m, n)); }

  /// phi00 - phi01 - phi10 + phi11, unwrapped.
  double conditional_raw() const;
  /// Conditional phase wrapped into [0, 2 pi).
  double conditional() const { return wrap_two_pi(conditional_raw()); }
};

GatePhases analytic_phases(const PhysicalParams& p, double t);

/// Root of L1(eta^2)^2 = 1/2 in (0, 1).
double solve_pi_gate_eta();

/// 2 pi / |Omega| with Omega = -g^2 e^{-eta^2} / delta.
double gate_time(const PhysicalParams& p);
/// pi / lambda.
double ld_gate_time(const PhysicalParams& p);

struct GateOptions {
  int sample_count = 2001;
  double min_overlap = 0.9;
};

struct GateReport {
  std::string label;
  HamiltonianLevel level = HamiltonianLevel::full;
  bool dissipative = false;
  GatePhases phases;
  double conditional_phase = 0.0;  // [0, 2 pi)
  double t_gate = 0.0;
  double process_fidelity = 0.0;
  /// Max over the window of the excited population averaged over the four
  /// register inputs (the population seen by |+>|+>).
  double max_excited_population = 0.0;
  /// Max over the window and over the four register inputs individually.
  double worst_basis_excited_population = 0.0;
  std::array<double, 4> populations{};  // |<mn| psi_I(t)>|^2 per input
  double min_purity = 1.0;
  RegimeReport regime;
};

/// Extracts the four phases from interaction-picture overlaps (one amplitude
/// per register state, same slot order as GatePhases).
GatePhases phases_from_overlaps(const std::array<Complex, 4>& overlaps);

/// Gate fidelity judged on the gauge-invariant conditional phase and the
/// register populations: cos^2((phi_c - pi)/2) * mean(populations).
double gate_fidelity(double conditional_phase,
                     const std::array<double, 4>& populations);

GateReport simulate_gate(HamiltonianLevel level, const PhysicalParams& p,
                         const CompositeSpace& s, double t,
                         const std::optional<DissipationParams>& dissipation = {},
                         const GateOptions& options = {});

CollapseSet dissipation_channels(const CompositeSpace& s,
                                 const DissipationParams& d);

struct InfidelitySeries {
  std::vector<double> times;
  std::vector<double> infidelity;
  double max() const;
};

/// 1 - |<psi_eff(t)|psi_full(t)>|^2 with both states in the interaction
/// picture of the free Hamiltonian.
InfidelitySeries effective_vs_full_fidelity(
    const PhysicalParams& p, const CompositeSpace& s, const EvolutionSpec& spec,
    const PureState& initial, const RegimeThresholds& thresholds = {});

struct TransitionResult {
  double probability = 0.0;
  double envelope = 0.0;
};

/// n (g e^{-eta^2/2})^2 [(delta + nu(m - m'))^-2 + (delta - nu(m - m'))^-2] * 4.
/// Throws ResonanceError when either denominator is below 1e-6 nu.
double transition_envelope(const PhysicalParams& p, int n, int m, int m_prime);

/// First-order probability |<e, m', n-1| U1(t) |g, m, n>|^2.
TransitionResult transition_probability(const PhysicalParams& p,
                                        const CompositeSpace& s, int n, int m,
                                        int m_prime, double t, int quad_points);

struct TransitionSeries {
  std::vector<double> times;
  std::vector<double> probability;
  double envelope = 0.0;
};

/// Same quantity on a time grid, accumulating the quadrature between
/// consecutive samples with `points_per_period` nodes per period of the
/// transition frequency.
TransitionSeries transition_probability_series(const PhysicalParams& p,
                                               const CompositeSpace& s, int n,
                                               int m, int m_prime,
                                               const std::vector<double>& times,
                                               int points_per_period = 64);

}  // namespace kerr

#endif  // KERR_GATE_HPP
