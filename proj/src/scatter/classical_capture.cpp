#include "ionbath/scatter/classical_capture.hpp"

#include <cmath>

#include "ionbath/core/errors.hpp"
#include "ionbath/trapdyn/integrator.hpp"

namespace ionbath::scatter {

namespace {

// Reduced units: lengths in R4, energies in E_s, time in hbar/E_s, so H = p^2 + V(x)
// with V(x) = -1/x^4 + c/x^6.
struct ReducedProblem {
  double c6 = 0.0;
  double eps = 0.0;
  double capture = 0.0;

  double potential(double x) const {
    const double x2 = x * x;
    return -1.0 / (x2 * x2) + c6 / (x2 * x2 * x2);
  }
  // dV/dx
  double slope(double x) const {
    const double x2 = x * x;
    const double x5 = x2 * x2 * x;
    return 4.0 / x5 - 6.0 * c6 / (x5 * x2);
  }
};

bool captured(const ReducedProblem& pr, double b) {
  // Start far outside the barrier, with the asymptotic angular momentum b sqrt(eps).
  const double barrier = std::pow(pr.eps, -0.25);
  const double x0 = std::max(40.0 * barrier, 4.0 * b);
  const double angular = b * std::sqrt(pr.eps);
  const double p_perp = angular / x0;
  const double p_r2 = pr.eps - pr.potential(x0) - p_perp * p_perp;
  if (p_r2 <= 0.0) return false;
  trapdyn::StateVector<4> y{x0, 0.0, -std::sqrt(p_r2), p_perp};
  auto rhs = [&](double, const trapdyn::StateVector<4>& s, trapdyn::StateVector<4>& d) {
    const double r = std::hypot(s[0], s[1]);
    const double f = -pr.slope(r) / r;
    d[0] = 2.0 * s[2];
    d[1] = 2.0 * s[3];
    d[2] = f * s[0];
    d[3] = f * s[1];
  };
  bool hit = false;
  auto observer = [&](double, const trapdyn::StateVector<4>& s) {
    const double r = std::hypot(s[0], s[1]);
    if (r < pr.capture) {
      hit = true;
      return false;
    }
    const double radial = s[0] * s[2] + s[1] * s[3];
    return !(radial > 0.0 && r > x0);
  };
  auto cap = [&](double, const trapdyn::StateVector<4>& s) {
    // Resolve the orbit: a small fraction of the current radius per step.
    const double r = std::hypot(s[0], s[1]);
    const double v = 2.0 * std::hypot(s[2], s[3]);
    return 0.02 * r / std::max(v, 1e-300);
  };
  trapdyn::StepControl ctl;
  ctl.rtol = 1e-11;
  ctl.atol = 1e-13;
  ctl.h_min = 1e-300;
  ctl.max_steps = 20'000'000;
  const double t_end = 1e6 * x0 / std::sqrt(pr.eps);
  trapdyn::integrate_dopri5<4>(rhs, cap, observer, y, 0.0, t_end, ctl);
  return hit;
}

ReducedProblem reduced(const InteractionModel& model, double energy, double capture_radius) {
  if (!(energy > 0.0)) throw DomainError("classical capture: energy must be positive");
  ReducedProblem pr;
  const double r4 = model.r4();
  pr.c6 = 2.0 * model.c6() / (r4 * r4);
  pr.eps = energy / model.s_wave_energy();
  pr.capture = (capture_radius > 0.0 ? capture_radius : default_capture_radius(model)) / r4;
  if (pr.capture >= 0.5 * std::pow(pr.eps, -0.25)) {
    throw DomainError("classical capture: capture radius is not inside the centrifugal barrier");
  }
  return pr;
}

}  // namespace

double default_capture_radius(const InteractionModel& model) { return 10.0 * model.potential_minimum(); }

bool classical_trajectory_captured(const InteractionModel& model, double energy, double b, double capture_radius) {
  if (b < 0.0) throw DomainError("impact parameter must be >= 0");
  const ReducedProblem pr = reduced(model, energy, capture_radius);
  return captured(pr, b / model.r4());
}

CaptureResult classical_capture(const InteractionModel& model, double energy, double capture_radius,
                                double relative_tolerance) {
  const ReducedProblem pr = reduced(model, energy, capture_radius);
  CaptureResult out;
  out.energy = energy;
  // Bracket the critical impact parameter, then bisect on the capture outcome.
  double lo = 0.0;
  double hi = std::pow(pr.eps, -0.25);
  while (captured(pr, hi)) {
    ++out.trajectories;
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericalError("classical capture: no escaping trajectory found");
  }
  ++out.trajectories;
  while (hi - lo > relative_tolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    ++out.trajectories;
    if (captured(pr, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double r4 = model.r4();
  out.b_critical = 0.5 * (lo + hi) * r4;
  out.cross_section = constants::pi * out.b_critical * out.b_critical;
  out.rate = out.cross_section * std::sqrt(2.0 * energy / model.reduced_mass());
  return out;
}

}  // namespace ionbath::scatter
