#include "kerr/specfun.hpp"

namespace kerr {

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

}  // namespace

double expansion_coefficient(int alpha, int beta, double eta) {
  if (alpha < 0 || beta < 0)
    throw DomainError("expansion_coefficient: indices must be non-negative");
  const int order = alpha + beta;
  if (order > 170)
    throw DomainError("expansion_coefficient: factorial overflow (alpha+beta > 170)");
  if (order % 2 != 0) return 0.0;
  // (i eta)^k + (-i eta)^k = 2 (-1)^{k/2} eta^k for even k.
  const double sign = (order / 2) % 2 == 0 ? 1.0 : -1.0;
  return std::exp(-0.5 * eta * eta) * sign * std::pow(eta, order) /
         (factorial(alpha) * factorial(beta));
}

double f_eigenvalue(int m, double eta) {
  if (m < 0) throw DomainError("f_eigenvalue: m must be non-negative");
  if (eta < 0.0) throw DomainError("f_eigenvalue: eta must be >= 0");
  return std::exp(-0.5 * eta * eta) * laguerre(m, eta * eta);
}

Operator f_operator(const CompositeSpace& space, double eta) {
  Matrix f = Matrix::Zero(space.phonon_cutoff(), space.phonon_cutoff());
  for (int m = 0; m < space.phonon_cutoff(); ++m) f(m, m) = f_eigenvalue(m, eta);
  return {space, embed(Matrix::Identity(2, 2), f,
                       Matrix::Identity(space.photon_cutoff(),
                                        space.photon_cutoff()))};
}

double ld_f_squared(int m, double eta) {
  if (m < 0) throw DomainError("ld_f_squared: m must be non-negative");
  const double e2 = eta * eta;
  return 1.0 - e2 - 2.0 * e2 * m;
}

}  // namespace kerr
