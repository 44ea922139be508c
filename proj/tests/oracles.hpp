// Independent reference computations shared by the test suites. Nothing here
// calls into the library beyond plain data types.
#ifndef KERR_TESTS_ORACLES_HPP
#define KERR_TESTS_ORACLES_HPP

#include <cmath>
#include <Eigen/Dense>

namespace oracle {

inline Eigen::MatrixXd lowering(int n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int m = 1; m < n; ++m) a(m - 1, m) = std::sqrt(double(m));
  return a;
}

/// cos(eta (a + a^dag)) on n levels by Taylor series of the symmetric matrix.
inline Eigen::MatrixXd cos_position_taylor(int n, double eta, int terms = 200) {
  const Eigen::MatrixXd a = lowering(n);
  const Eigen::MatrixXd x2 = (eta * (a + a.transpose())) * (eta * (a + a.transpose()));
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd sum = term;
  for (int k = 1; k < terms; ++k) {
    term = -(term * x2) / double((2 * k - 1) * (2 * k));
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-30) break;
  }
  return sum;
}

/// Explicit Laguerre coefficients: L_m(x) = sum_k (-1)^k C(m,k) x^k / k!.
inline double laguerre_explicit(int m, double x) {
  double sum = 0.0;
  double binom = 1.0;
  double fact = 1.0;
  for (int k = 0; k <= m; ++k) {
    if (k > 0) {
      binom *= double(m - k + 1) / k;
      fact *= k;
    }
    sum += (k % 2 ? -1.0 : 1.0) * binom * std::pow(x, k) / fact;
  }
  return sum;
}

/// Normally ordered finite series for e^{-eta^2/2} L_m(eta^2).
inline double f_series(int m, double eta) {
  double sum = 0.0;
  for (int a = 0; a <= m; ++a) {
    double fall = 1.0;  // m!/(m-a)!
    for (int j = 0; j < a; ++j) fall *= double(m - j);
    double fa = std::tgamma(a + 1.0);
    sum += std::pow(-eta * eta, a) / (fa * fa) * fall;
  }
  return std::exp(-0.5 * eta * eta) * sum;
}

}  // namespace oracle

#endif
