#include "kerr/hamiltonians.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "kerr/specfun.hpp"

namespace kerr {

void PhysicalParams::validate() const {
  if (!(nu > 0.0)) throw DomainError("PhysicalParams: nu must be > 0");
  if (!(omega_c > 0.0)) throw DomainError("PhysicalParams: omega_c must be > 0");
  if (!(g >= 0.0)) throw DomainError("PhysicalParams: g must be >= 0");
  if (!(eta >= 0.0)) throw DomainError("PhysicalParams: eta must be >= 0");
  if (!std::isfinite(delta)) throw DomainError("PhysicalParams: delta must be finite");
}

void DissipationParams::validate() const {
  if (!(kappa >= 0.0) || !(gamma >= 0.0))
    throw DomainError("DissipationParams: rates must be >= 0");
}

PhysicalParams reference_parameters(double eta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  PhysicalParams p;
  p.g = two_pi * 1.51e6;
  p.delta = 10.0 * p.g;
  p.nu = 20.0 * p.delta;
  p.omega_c = 10.0 * p.delta;
  p.eta = eta;
  return p;
}

DissipationParams reference_dissipation() {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return {two_pi * 41.7e3, two_pi * 1.58e6};
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::warn: return "warn";
    case Verdict::fail: return "fail";
  }
  return "unknown";
}

Verdict RegimeReport::overall() const {
  const auto worst = [](Verdict a, Verdict b) { return a > b ? a : b; };
  return worst(dispersive, worst(rwa, off_resonance));
}

std::string RegimeReport::conditions_with(Verdict v) const {
  std::string out;
  const auto add = [&](Verdict x, const char* name) {
    if (x != v) return;
    if (!out.empty()) out += ", ";
    out += name;
  };
  add(dispersive, "dispersive (g << delta)");
  add(rwa, "rwa (delta << nu)");
  add(off_resonance, "resonance (delta != k nu)");
  return out;
}

namespace {

// Thresholds compare with a relative slack so ratios that are exactly at the
// threshold in real arithmetic do not flip on rounding.
constexpr double kSlack = 1e-12;

Verdict upper_bound_verdict(double value, double threshold) {
  if (value <= threshold * (1.0 + kSlack)) return Verdict::pass;
  if (value <= 2.0 * threshold * (1.0 + kSlack)) return Verdict::warn;
  return Verdict::fail;
}

Verdict lower_bound_verdict(double value, double threshold) {
  if (value >= threshold * (1.0 - kSlack)) return Verdict::pass;
  if (value >= 0.5 * threshold * (1.0 - kSlack)) return Verdict::warn;
  return Verdict::fail;
}

}  // namespace

RegimeReport regime_check(const PhysicalParams& p,
                          const RegimeThresholds& thresholds) {
  RegimeReport r;
  r.thresholds = thresholds;
  const double abs_delta = std::abs(p.delta);
  r.ratio_g_delta = p.g == 0.0 ? 0.0
                    : abs_delta == 0.0
                        ? std::numeric_limits<double>::infinity()
                        : p.g / abs_delta;
  r.ratio_delta_nu = abs_delta / p.nu;
  r.nearest_resonance_k = std::lround(p.delta / p.nu);
  r.resonance_margin =
      std::abs(p.delta - double(r.nearest_resonance_k) * p.nu) / p.nu;
  r.dispersive = upper_bound_verdict(r.ratio_g_delta, thresholds.g_over_delta_max);
  r.rwa = upper_bound_verdict(r.ratio_delta_nu, thresholds.delta_over_nu_max);
  r.off_resonance =
      lower_bound_verdict(r.resonance_margin, thresholds.resonance_margin_min);
  return r;
}

void require_dispersive(const PhysicalParams& p, const char* what) {
  if (p.delta == 0.0)
    throw DomainError(std::string(what) +
                      ": delta = 0 violates the dispersive condition "
                      "(g << |delta| requires delta != 0)");
}

Operator free_hamiltonian(const PhysicalParams& p, const CompositeSpace& s) {
  p.validate();
  const auto at = atomic_ops(s);
  return p.nu * number_op(s, Mode::phonon) +
         p.omega_c * number_op(s, Mode::photon) +
         (0.5 * p.omega_a()) * at.sigma_z;
}

namespace {

// sigma_+ b + b^dag sigma_-
Operator exchange_term(const CompositeSpace& s) {
  const auto at = atomic_ops(s);
  const Operator b = annihilation_op(s, Mode::photon);
  return at.sigma_plus * b + dagger(b) * at.sigma_minus;
}

}  // namespace

Operator coupling_term(const PhysicalParams& p, const CompositeSpace& s) {
  p.validate();
  return p.g * (exchange_term(s) * cos_position_op(s, p.eta));
}

Operator full_hamiltonian(const PhysicalParams& p, const CompositeSpace& s) {
  return free_hamiltonian(p, s) + coupling_term(p, s);
}

Operator interaction_hamiltonian(const PhysicalParams& p,
                                 const CompositeSpace& s, double t) {
  const Operator h0 = free_hamiltonian(p, s);
  Matrix v = coupling_term(p, s).matrix;
  const Vector phase = (kI * t * h0.matrix.diagonal()).array().exp().matrix();
  for (Eigen::Index j = 0; j < v.cols(); ++j)
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      if (v(i, j) != Complex(0.0)) v(i, j) *= phase(i) * std::conj(phase(j));
  return {s, std::move(v)};
}

Operator rwa_hamiltonian(const PhysicalParams& p, const CompositeSpace& s) {
  return free_hamiltonian(p, s) +
         p.g * (exchange_term(s) * f_operator(s, p.eta));
}

Operator effective_hamiltonian(const PhysicalParams& p,
                               const CompositeSpace& s) {
  require_dispersive(p, "effective_hamiltonian");
  const auto at = atomic_ops(s);
  const Operator b = annihilation_op(s, Mode::photon);
  const Operator bd = dagger(b);
  const Operator f = f_operator(s, p.eta);
  // b b^dag on the truncated photon space would lose the top level, so the
  // vacuum-shifted number n + 1 is used directly.
  const Operator bbd = number_op(s, Mode::photon) + identity_op(s);
  const Operator shift = at.sigma_plus * at.sigma_minus * bbd -
                         at.sigma_minus * at.sigma_plus * (bd * b);
  return free_hamiltonian(p, s) + (p.g * p.g / p.delta) * (f * f * shift);
}

double kerr_coupling(const PhysicalParams& p) {
  require_dispersive(p, "kerr_coupling");
  return 2.0 * p.eta * p.eta * p.g * p.g / p.delta;
}

double shifted_frequency(const PhysicalParams& p) {
  require_dispersive(p, "shifted_frequency");
  const double g2d = p.g * p.g / p.delta;
  return p.omega_c + p.eta * p.eta * g2d - g2d;
}

Operator ld_hamiltonian(const PhysicalParams& p, const CompositeSpace& s) {
  p.validate();
  const Operator na = number_op(s, Mode::phonon);
  const Operator nb = number_op(s, Mode::photon);
  return p.nu * na + shifted_frequency(p) * nb + kerr_coupling(p) * (na * nb);
}

}  // namespace kerr
