#ifndef SPINCAV_ODE_HPP
#define SPINCAV_ODE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace spincav {

// Embedded Dormand-Prince 5(4) pair with FSAL and a PI step controller.
// State is any fixed- or dynamic-size Eigen column vector of real scalars;
// complex systems integrate their re/im parts side by side.

struct OdeOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = 0.0;      // 0 = horizon/10
  double initial_step = 0.0;  // 0 = auto
  long max_steps = 2'000'000;
};

template <typename State>
struct OdeSolution {
  std::vector<double> times;        // accepted step endpoints, t0 first
  std::vector<State> states;
  std::vector<State> derivatives;   // f(t_i, y_i), for Hermite sampling
  long accepted = 0;
  long rejected = 0;

  // Cubic Hermite interpolation between accepted steps.
  State sample(double t) const {
    if (times.empty()) throw std::runtime_error("ode: empty solution");
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    const double h = times[i + 1] - times[i];
    const double s = (t - times[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * states[i] + (s3 - 2 * s2 + s) * h * derivatives[i] +
           (-2 * s3 + 3 * s2) * states[i + 1] + (s3 - s2) * h * derivatives[i + 1];
  }
};

namespace ode_detail {
// Dormand-Prince coefficients.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - bhat, error estimator weights (k7 = f at the new point).
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace ode_detail

template <typename Rhs, typename Derived>
OdeSolution<typename Derived::PlainObject> integrate_dopri5(
    Rhs&& f, const Eigen::MatrixBase<Derived>& y0_expr, double t0, double t1,
    const OdeOptions& opt = {}) {
  using namespace ode_detail;
  using State = typename Derived::PlainObject;
  const State y0 = y0_expr;
  if (!(t1 > t0)) throw std::invalid_argument("ode: require t1 > t0");
  if (!(opt.rel_tol > 0.0) || !(opt.abs_tol >= 0.0)) {
    throw std::invalid_argument("ode: bad tolerances");
  }

  const double horizon = t1 - t0;
  const double hmax = opt.max_step > 0.0 ? opt.max_step : horizon / 10.0;

  OdeSolution<State> sol;
  State y = y0;
  State k1 = f(t0, y);
  double t = t0;

  const auto err_norm = [&](const State& err, const State& ya,
                            const State& yb) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const double scale =
          opt.abs_tol +
          opt.rel_tol * std::max(std::abs(ya[i]), std::abs(yb[i]));
      const double q = err[i] / scale;
      acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
  };

  double h;
  if (opt.initial_step > 0.0) {
    h = std::min(opt.initial_step, hmax);
  } else {
    // Crude first guess from the initial derivative; the controller fixes
    // anything unreasonable within a couple of steps.
    double d0 = 0.0, d1 = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      d0 = std::max(d0, std::abs(y[i]));
      d1 = std::max(d1, std::abs(k1[i]));
    }
    h = (d1 > 0.0) ? 0.01 * (opt.abs_tol + opt.rel_tol * d0 +
                             opt.rel_tol) / (opt.rel_tol * d1 + 1e-300)
                   : horizon / 100.0;
    h = std::clamp(h, 1e-12 * horizon, hmax);
  }

  sol.times.push_back(t);
  sol.states.push_back(y);
  sol.derivatives.push_back(k1);

  double prev_err = 1.0;  // PI memory
  long steps = 0;
  while (t < t1) {
    if (++steps > opt.max_steps) {
      throw std::runtime_error("ode: step budget exhausted");
    }
    h = std::min(h, t1 - t);

    const State k2 = f(t + c2 * h, y + h * (a21 * k1));
    const State k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const State k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 = f(t + c5 * h,
                       y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 =
        f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const State ynew =
        y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = f(t + h, ynew);
    const State err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double en = err_norm(err, y, ynew);
    if (!std::isfinite(en)) {
      throw std::runtime_error("ode: non-finite state encountered");
    }

    if (en <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      sol.times.push_back(t);
      sol.states.push_back(y);
      sol.derivatives.push_back(k1);
      ++sol.accepted;
      // PI controller (Gustafsson): order-5 pair.
      const double safe = 0.9;
      double fac = safe * std::pow(en > 0 ? en : 1e-10, -0.7 / 5.0) *
                   std::pow(prev_err > 0 ? prev_err : 1e-10, 0.4 / 5.0);
      fac = std::clamp(fac, 0.2, 5.0);
      h = std::min(h * fac, hmax);
      prev_err = en;
    } else {
      ++sol.rejected;
      const double fac = std::max(0.2, 0.9 * std::pow(en, -1.0 / 5.0));
      h *= fac;
    }
  }
  return sol;
}

}  // namespace spincav

#endif  // SPINCAV_ODE_HPP
