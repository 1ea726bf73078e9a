#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ionbath/core/interaction.hpp"

namespace ionbath::mdsim {

/// T(n) = (T0 - T_inf) exp(-n / N_eq) + T_inf.
struct CoolingFit {
  double T0 = 0.0;      // K
  double T_inf = 0.0;   // K
  double N_eq = 0.0;    // 1/e scale in units of the abscissa (collisions or s)
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();  // (T0, T_inf, N_eq)
  double chi2 = 0.0;
  int dof = 0;
  /// Amplitude compatible with zero: N_eq is not identifiable.
  bool degenerate = false;

  // Optional time-domain information used by the heating correction.
  double tau = 0.0;         // s, 1/e cooling time
  double gamma_heat = 0.0;  // K/s
  double N_L_eq = 0.0;      // Langevin collisions
  double rho_at = 0.0;      // m^-3

  double sigma_T0() const { return std::sqrt(covariance(0, 0)); }
  double sigma_T_inf() const { return std::sqrt(covariance(1, 1)); }
  double sigma_N_eq() const { return std::sqrt(covariance(2, 2)); }
  double operator()(double n) const;
};

/// Least-squares fit of the exponential model. `sigma` (optional, same length) weights
/// the points. Requires at least 10 points; throws FitError with residual diagnostics
/// when the minimiser does not converge.
CoolingFit fit_cooling(const std::vector<double>& x, const std::vector<double>& y,
                       const std::vector<double>& sigma = {});

/// N_L,eq = 2 pi rho_sim sqrt(C4/mu) N_eq / phi_at. Throws DomainError for phi_at <= 0.
double langevin_collisions(const CoolingFit& fit, double flux, double rho_sim, const InteractionModel& model);

/// rho_sim = 1 / (4/3 pi r0^3).
double simulation_density(double sphere_radius);

/// Density that gives N_L,eq Langevin collisions per cooling time tau: N_L,eq / (tau K_L).
double density_from_cooling(double n_l_eq, double tau, const InteractionModel& model);

/// Cooling with background heating, dT/dt = -gamma (T - T_inf) + gamma_heat, gamma = 1/tau.
struct HeatedCooling {
  double T0 = 0.0, T_inf = 0.0, tau = 0.0, gamma_heat = 0.0;
  /// gamma_heat / gamma_cool, K.
  double offset() const { return gamma_heat * tau; }
  double final_temperature() const { return T_inf + offset(); }
  /// (T0 - T_inf) exp(-t/tau) + T_inf + gamma_heat/gamma_cool.
  double operator()(double t) const;
};

/// Uses fit.tau (s) as the cooling time. Throws DomainError unless tau > 0.
HeatedCooling apply_heating(const CoolingFit& fit, double gamma_heat);

}  // namespace ionbath::mdsim
