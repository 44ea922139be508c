#ifndef KERR_HAMILTONIANS_HPP
#define KERR_HAMILTONIANS_HPP

#include <string>

#include "kerr/fock.hpp"

namespace kerr {

/// Model frequencies, all angular (rad/s). omega_a is derived as
/// omega_c + delta and never stored.
struct PhysicalParams {
  double nu = 0.0;       // trap
  double omega_c = 0.0;  // cavity
  double delta = 0.0;    // omega_a - omega_c
  double g = 0.0;        // ion-field coupling
  double eta = 0.0;      // Lamb-Dicke parameter

  double omega_a() const { return omega_c + delta; }
  /// Throws DomainError on nu <= 0, omega_c <= 0, g < 0 or eta < 0.
  void validate() const;
};

struct DissipationParams {
  double kappa = 0.0;  // cavity field decay, rad/s
  double gamma = 0.0;  // spontaneous emission, rad/s
  void validate() const;
};

/// g = 2pi x 1.51 MHz, delta = 10 g, nu = 20 delta, omega_c = 10 delta.
PhysicalParams reference_parameters(double eta);
/// kappa = 2pi x 41.7 kHz, gamma = 2pi x 1.58 MHz.
DissipationParams reference_dissipation();

enum class Verdict { pass, warn, fail };
std::string to_string(Verdict v);

struct RegimeThresholds {
  double g_over_delta_max = 0.1;
  double delta_over_nu_max = 0.1;
  double resonance_margin_min = 0.1;
};

struct RegimeReport {
  double ratio_g_delta = 0.0;
  double ratio_delta_nu = 0.0;
  long nearest_resonance_k = 0;
  double resonance_margin = 0.0;
  Verdict dispersive = Verdict::pass;      // g << delta
  Verdict rwa = Verdict::pass;             // delta << nu
  Verdict off_resonance = Verdict::pass;   // delta != k nu
  RegimeThresholds thresholds;

  Verdict overall() const;
  /// Names of the conditions with the given verdict, comma separated.
  std::string conditions_with(Verdict v) const;
};

RegimeReport regime_check(const PhysicalParams& params,
                          const RegimeThresholds& thresholds = {});

// Hamiltonian levels. All builders return hermitian operators.

/// nu a^dag a + omega_c b^dag b + (omega_a/2) sigma_z.
Operator free_hamiltonian(const PhysicalParams& p, const CompositeSpace& s);

/// g (sigma_+ b + b^dag sigma_-) cos[eta (a^dag + a)].
Operator coupling_term(const PhysicalParams& p, const CompositeSpace& s);

Operator full_hamiltonian(const PhysicalParams& p, const CompositeSpace& s);

/// e^{i H0 t} (H - H0) e^{-i H0 t}.
Operator interaction_hamiltonian(const PhysicalParams& p,
                                 const CompositeSpace& s, double t);

Operator rwa_hamiltonian(const PhysicalParams& p, const CompositeSpace& s);

/// H0 + (g^2/delta) f^2 (sigma_+ sigma_- b b^dag - sigma_- sigma_+ b^dag b).
Operator effective_hamiltonian(const PhysicalParams& p,
                               const CompositeSpace& s);

/// nu a^dag a + shifted_omega_c b^dag b + lambda a^dag a b^dag b with the ion
/// factor acting as identity.
Operator ld_hamiltonian(const PhysicalParams& p, const CompositeSpace& s);

/// lambda = 2 eta^2 g^2 / delta.
double kerr_coupling(const PhysicalParams& p);
/// omega_c + eta^2 g^2/delta - g^2/delta.
double shifted_frequency(const PhysicalParams& p);

void require_dispersive(const PhysicalParams& p, const char* what);

}  // namespace kerr

#endif  // KERR_HAMILTONIANS_HPP
