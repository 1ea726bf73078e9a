#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "ionbath/core/errors.hpp"

namespace ionbath::trapdyn {

template <std::size_t N>
using StateVector = std::array<double, N>;

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_initial = 0.0;  // 0: derived from h_max
  double h_max = 0.0;      // 0: unbounded
  double h_min = 1e-18;    // below this the step is rejected as an underflow
  long max_steps = 50'000'000;
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
  bool stopped_by_observer = false;
};

/// Adaptive Dormand-Prince 5(4) integration of y' = f(t, y) from t0 to t1.
///
/// `rhs(t, y, dydt)` evaluates the derivative. `step_cap(t, y)` returns an extra
/// upper bound on the next step (e.g. a close-encounter limit), or +inf.
/// `observer(t, y)` runs after every accepted step and returns false to stop.
/// Steps never cross t1, and never cross multiples of `landing` after t0 when
/// landing > 0, so the observer sees every such grid time exactly.
template <std::size_t N, class Rhs, class Cap, class Observer>
IntegrationStats integrate_dopri5(Rhs&& rhs, Cap&& step_cap, Observer&& observer, StateVector<N>& y,
                                  double t0, double t1, const StepControl& ctl, double landing = 0.0) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  IntegrationStats stats;
  if (!(t1 > t0)) return stats;

  StateVector<N> k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
  double t = t0;
  double h = ctl.h_initial > 0.0 ? ctl.h_initial : (ctl.h_max > 0.0 ? ctl.h_max : (t1 - t0) / 100.0);
  rhs(t, y, k1);
  ++stats.rhs_evaluations;
  long grid_index = 1;
  double err_prev = 1e-4;

  while (t < t1) {
    if (stats.accepted + stats.rejected >= ctl.max_steps) {
      throw IntegrationError("step budget exhausted at t = " + std::to_string(t));
    }
    double target = t1;
    bool grid_target = false;
    if (landing > 0.0) {
      const double next_grid = t0 + static_cast<double>(grid_index) * landing;
      if (next_grid < t1) {
        target = next_grid;
        grid_target = true;
      }
    }
    if (ctl.h_max > 0.0) h = std::min(h, ctl.h_max);
    h = std::min(h, step_cap(t, y));
    const double h_free = h;
    const bool lands = h >= target - t;
    if (lands) h = target - t;
    if (h < ctl.h_min) {
      throw IntegrationError("step size underflow (h = " + std::to_string(h) + ") at t = " +
                             std::to_string(t));
    }

    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, tmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(t + h, ynew, k7);
    stats.rhs_evaluations += 6;

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = ctl.atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double ei =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]) / sc;
      err = std::max(err, std::abs(ei));
    }

    if (std::isfinite(err) && err <= 1.0) {
      t = lands ? target : t + h;
      if (lands && grid_target) ++grid_index;
      y = ynew;
      k1 = k7;
      ++stats.accepted;
      // PI controller (Hairer & Wanner, beta = 0.04).
      const double e = std::max(err, 1e-10);
      double fac = 0.9 * std::pow(e, -0.17) * std::pow(err_prev, 0.04);
      fac = std::clamp(fac, 0.2, 5.0);
      err_prev = std::max(err, 1e-4);
      const double h_used = h;
      h = h_used * fac;
      if (lands) h = std::max(h, h_free);
      if (!observer(t, y)) {
        stats.stopped_by_observer = true;
        return stats;
      }
    } else {
      ++stats.rejected;
      const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.1;
      h *= fac;
    }
  }
  return stats;
}

}  // namespace ionbath::trapdyn
