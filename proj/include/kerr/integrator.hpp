#ifndef KERR_INTEGRATOR_HPP
#define KERR_INTEGRATOR_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kerr {

/// Step-size underflow or step-budget exhaustion in an adaptive integration.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double last_good_time)
      : std::runtime_error(what + " (last good t = " +
                           std::to_string(last_good_time) + " s)"),
        last_good_time_(last_good_time) {}
  double last_good_time() const { return last_good_time_; }

 private:
  double last_good_time_;
};

struct StepControl {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 50'000'000;
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b_hat (error weights), stage 7 uses the FSAL derivative.
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

template <class State>
double error_norm(const State& err, const State& y0, const State& y1,
                  const StepControl& ctl) {
  const auto scale = (ctl.abs_tol + ctl.rel_tol * y0.cwiseAbs().cwiseMax(
                                                      y1.cwiseAbs()).array());
  return std::sqrt((err.cwiseAbs().array() / scale).square().mean());
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integrator with PI step control, generic over
/// any dense Eigen state (vector or matrix).
///
/// `rhs(t, y, dydt)` evaluates the derivative. `on_accept(y)` runs after every
/// accepted step and returns true if it modified the state in place.
template <class State>
class Dopri5Integrator {
 public:
  explicit Dopri5Integrator(StepControl ctl) : ctl_(ctl) {}

  /// Advances `y` from `t` to `t_end` exactly. The step proposal survives
  /// between calls so a sequence of segments behaves like one integration.
  template <class Rhs, class OnAccept>
  void advance(Rhs&& rhs, OnAccept&& on_accept, double& t, double t_end,
               State& y) {
    using T = detail::Dopri5;
    if (!initialized_) {
      resize_like(y);
      rhs(t, y, k1_);
      if (h_ <= 0.0) h_ = initial_step(rhs, t, t_end, y);
      initialized_ = true;
    }
    while (t < t_end) {
      if (stats_.accepted + stats_.rejected >= ctl_.max_steps)
        throw IntegrationError("Dopri5: step budget exhausted", t);
      const double wanted = std::min(h_, ctl_.max_step);
      const bool last = wanted >= t_end - t;
      const double h = last ? t_end - t : wanted;
      if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::abs(t))
        throw IntegrationError("Dopri5: step size underflow", t);

      tmp_ = y + h * T::a21 * k1_;
      rhs(t + T::c2 * h, tmp_, k2_);
      tmp_ = y + h * (T::a31 * k1_ + T::a32 * k2_);
      rhs(t + T::c3 * h, tmp_, k3_);
      tmp_ = y + h * (T::a41 * k1_ + T::a42 * k2_ + T::a43 * k3_);
      rhs(t + T::c4 * h, tmp_, k4_);
      tmp_ = y + h * (T::a51 * k1_ + T::a52 * k2_ + T::a53 * k3_ + T::a54 * k4_);
      rhs(t + T::c5 * h, tmp_, k5_);
      tmp_ = y + h * (T::a61 * k1_ + T::a62 * k2_ + T::a63 * k3_ +
                      T::a64 * k4_ + T::a65 * k5_);
      rhs(t + h, tmp_, k6_);
      ynew_ = y + h * (T::b1 * k1_ + T::b3 * k3_ + T::b4 * k4_ + T::b5 * k5_ +
                       T::b6 * k6_);
      const double t_new = last ? t_end : t + h;
      rhs(t_new, ynew_, k7_);
      err_ = h * (T::e1 * k1_ + T::e3 * k3_ + T::e4 * k4_ + T::e5 * k5_ +
                  T::e6 * k6_ + T::e7 * k7_);
      double err = detail::error_norm(err_, y, ynew_, ctl_);
      if (!std::isfinite(err)) err = 1e10;

      if (err <= 1.0) {
        // PI controller (Gustafsson), exponents 0.7/5 and 0.4/5.
        const double fac = std::clamp(
            0.9 * std::pow(std::max(err, 1e-10), -0.14) *
                std::pow(err_prev_, 0.08),
            0.2, 5.0);
        err_prev_ = std::max(err, 1e-4);
        y.swap(ynew_);
        if (on_accept(y))
          rhs(t_new, y, k1_);
        else
          k1_.swap(k7_);
        t = t_new;
        ++stats_.accepted;
        // A step shortened to land on t_end keeps the longer proposal.
        const double proposal = h * fac;
        h_ = (last && h < wanted) ? std::max(h_, proposal) : proposal;
      } else {
        ++stats_.rejected;
        h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
      }
    }
  }

  const IntegrationStats& stats() const { return stats_; }

 private:
  void resize_like(const State& y) {
    k1_ = k2_ = k3_ = k4_ = k5_ = k6_ = k7_ = State::Zero(y.rows(), y.cols());
    tmp_ = ynew_ = err_ = k1_;
  }

  template <class Rhs>
  double initial_step(Rhs& rhs, double t, double t_end, const State& y) {
    // Hairer-Norsett-Wanner starting step heuristic.
    const auto scale =
        (ctl_.abs_tol + ctl_.rel_tol * y.cwiseAbs().array()).eval();
    const double d0 = std::sqrt((y.cwiseAbs().array() / scale).square().mean());
    const double d1 = std::sqrt((k1_.cwiseAbs().array() / scale).square().mean());
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * (t_end - t) : 0.01 * d0 / d1;
    h0 = std::min(h0, t_end - t);
    tmp_ = y + h0 * k1_;
    rhs(t + h0, tmp_, k2_);
    const double d2 =
        std::sqrt(((k2_ - k1_).cwiseAbs().array() / scale).square().mean()) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6 * h0, 1e-3 * h0)
                                  : std::pow(0.01 / dm, 0.2);
    return std::min(100.0 * h0, h1);
  }

  StepControl ctl_;
  IntegrationStats stats_;
  double h_ = 0.0;
  double err_prev_ = 1e-4;
  bool initialized_ = false;
  State k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_, err_;
};

/// Fixed-step Dormand-Prince 5th-order propagation (no error control), used
/// for convergence-order measurements.
template <class State, class Rhs>
State integrate_fixed_step(Rhs&& rhs, double t0, double t1, State y,
                           long steps) {
  using T = detail::Dopri5;
  const double h = (t1 - t0) / double(steps);
  State k1, k2, k3, k4, k5, k6;
  k1 = k2 = k3 = k4 = k5 = k6 = State::Zero(y.rows(), y.cols());
  for (long s = 0; s < steps; ++s) {
    const double t = t0 + h * double(s);
    rhs(t, y, k1);
    rhs(t + T::c2 * h, State(y + h * T::a21 * k1), k2);
    rhs(t + T::c3 * h, State(y + h * (T::a31 * k1 + T::a32 * k2)), k3);
    rhs(t + T::c4 * h, State(y + h * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3)),
        k4);
    rhs(t + T::c5 * h,
        State(y + h * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4)),
        k5);
    rhs(t + h,
        State(y + h * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 +
                       T::a65 * k5)),
        k6);
    y += h * (T::b1 * k1 + T::b3 * k3 + T::b4 * k4 + T::b5 * k5 + T::b6 * k6);
  }
  return y;
}

}  // namespace kerr

#endif  // KERR_INTEGRATOR_HPP
