#ifndef KERR_SPECFUN_HPP
#define KERR_SPECFUN_HPP

#include <cmath>
#include <concepts>

#include "kerr/fock.hpp"

namespace kerr {

/// Laguerre polynomial L_m(x) by the three-term recurrence
/// (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}.
template <std::floating_point Real>
Real laguerre(int m, Real x) {
  if (m < 0) throw DomainError("laguerre: order must be non-negative");
  Real prev = Real(1);
  if (m == 0) return prev;
  Real curr = Real(1) - x;
  for (int k = 1; k < m; ++k) {
    const Real next = ((Real(2 * k + 1) - x) * curr - Real(k) * prev) /
                      Real(k + 1);
    prev = curr;
    curr = next;
  }
  return curr;
}

/// Scalar part of the normally ordered expansion of cos[eta (a + a^dagger)]:
///   e^{-eta^2/2} / (2 alpha! beta!) [(i eta)^{alpha+beta} + (-i eta)^{alpha+beta}].
/// Exactly zero for odd alpha + beta.
double expansion_coefficient(int alpha, int beta, double eta);

/// Eigenvalue of f(a^dagger a) = e^{-eta^2/2} :J0(2 eta sqrt(a^dagger a)): on
/// Fock state |m>, i.e. e^{-eta^2/2} L_m(eta^2).
double f_eigenvalue(int m, double eta);

/// Phonon-diagonal f(a^dagger a), identity on ion and photon.
Operator f_operator(const CompositeSpace& space, double eta);

/// Lamb-Dicke truncation of f^2: 1 - eta^2 - 2 eta^2 m.
double ld_f_squared(int m, double eta);

}  // namespace kerr

#endif  // KERR_SPECFUN_HPP
