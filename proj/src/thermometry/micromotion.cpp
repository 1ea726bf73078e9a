#include "ionbath/thermometry/micromotion.hpp"

#include <cmath>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>

#include "ionbath/core/errors.hpp"
#include "ionbath/core/units.hpp"

namespace ionbath::thermometry {

namespace {
constexpr double kBetaBranchEnd = 1.8411837813406593;  // first maximum of J1
}

double beta_from_ratio(double omega_carrier, double omega_sideband, std::optional<double> power_carrier,
                       std::optional<double> power_sideband) {
  if (!(omega_carrier > 0.0) || !(omega_sideband >= 0.0)) {
    throw DomainError("beta_from_ratio: Rabi frequencies must be positive");
  }
  double car = omega_carrier, mm = omega_sideband;
  if (power_carrier || power_sideband) {
    if (!power_carrier || !power_sideband || !(*power_carrier > 0.0) || !(*power_sideband > 0.0)) {
      throw DomainError("beta_from_ratio: both laser powers must be positive");
    }
    car /= std::sqrt(*power_carrier);
    mm /= std::sqrt(*power_sideband);
  }
  if (mm == 0.0) return 0.0;
  const double ratio = car / mm;
  auto f = [ratio](double b) {
    return boost::math::cyl_bessel_j(0, b) - ratio * boost::math::cyl_bessel_j(1, b);
  };
  const double lo = 1e-12;
  const double hi = kBetaBranchEnd;
  const double flo = f(lo), fhi = f(hi);
  if (!(flo > 0.0 && fhi < 0.0)) {
    throw DomainError("beta_from_ratio: Rabi-frequency ratio has no root on the first branch");
  }
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52),
                                                   iters);
  return 0.5 * (r.first + r.second);
}

double emm_from_beta(double beta, double k_projection, double rf_drive, const Species& ion) {
  if (beta < 0.0) throw DomainError("emm_from_beta: beta must be >= 0");
  if (!(k_projection > 0.0)) throw DomainError("emm_from_beta: wavevector projection must be positive");
  const double v = beta * rf_drive / k_projection;
  return 0.25 * ion.mass * v * v;
}

double emm_from_dc_field(double field, double omega_rad, const Species& ion) {
  if (!(omega_rad > 0.0)) throw DomainError("emm_from_dc_field: frequency must be positive");
  const double f = field * ion.charge;
  return f * f / (2.0 * ion.mass * omega_rad * omega_rad);
}

double scale_quadrature(double energy, double omega1, double omega2) {
  if (!(omega1 > 0.0) || !(omega2 > 0.0)) throw DomainError("scale_quadrature: frequencies must be positive");
  const double r = omega2 / omega1;
  return energy * r * r;
}

Measured scale_quadrature(const Measured& energy, double omega1, double omega2) {
  return energy.scaled(scale_quadrature(1.0, omega1, omega2));
}

Measured MMBudget::total() const {
  Measured sum;
  for (const auto& e : entries) {
    const Measured c = e.contribution();
    sum = add_quadrature(sum, e.upper_bound ? Measured{c.value, 0.0} : c);
  }
  return sum;
}

MMBudget mm_budget(double omega_rad, std::vector<MMEntry> entries) {
  for (const auto& e : entries) {
    if (e.energy.value < 0.0 || e.energy.sigma < 0.0 || e.multiplicity < 0) {
      throw DomainError("mm_budget: entries must be non-negative");
    }
  }
  return MMBudget{omega_rad, std::move(entries)};
}

namespace {
Measured uk(double value, double sigma = 0.0) {
  return {units::microkelvin_to_joule(value), units::microkelvin_to_joule(sigma)};
}
}  // namespace

MMBudget paper_budget_330(HorizontalBound horizontal) {
  const double w = units::khz_to_angular(330.0);
  const double horiz = horizontal == HorizontalBound::table ? units::microkelvin_to_joule(2.1)
                                                            : emm_from_dc_field(0.05, w);
  return mm_budget(w, {{"axial", uk(33.0, 33.0), 1, false},
                       {"radial quadrature", uk(21.5, 1.5), 2, false},
                       {"radial field (vertical)", uk(3.4), 1, true},
                       {"radial field (horizontal)", {horiz, 0.0}, 1, true}});
}

MMBudget paper_budget_210() {
  const double w330 = units::khz_to_angular(330.0);
  const double w210 = units::khz_to_angular(210.0);
  const Measured axial = uk(33.0, 33.0).scaled(std::pow(w210 / w330, 2));
  const Measured quad = scale_quadrature(uk(21.5, 1.5), w330, w210);
  const double vertical = units::microkelvin_to_joule(208.0) * 0.2 * 0.2;
  return mm_budget(w210, {{"axial", axial, 1, false},
                          {"radial quadrature", quad, 2, false},
                          {"radial field (vertical)", {vertical, 0.0}, 1, true},
                          {"radial field (horizontal)", {emm_from_dc_field(0.05, w210), 0.0}, 1, true}});
}

double emm_per_volt_squared(double beta, double v_comp, double k_projection, double rf_drive, const Species& ion) {
  if (!(v_comp != 0.0)) throw DomainError("emm_per_volt_squared: compensation voltage must be non-zero");
  return emm_from_beta(beta, k_projection, rf_drive, ion) / (v_comp * v_comp);
}

}  // namespace ionbath::thermometry
