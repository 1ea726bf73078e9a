#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "ionbath/core/interaction.hpp"

namespace ionbath::thermometry {

/// Carrier Rabi oscillation of a thermal ion on the 411 nm transition.
struct RabiConfig {
  double omega0 = 0.0;                  // ground-state Rabi frequency, rad/s
  std::array<double, 3> eta{};          // Lamb-Dicke parameter per axis
  double mode_frequency = 0.0;          // omega of the probed (radial) modes, rad/s
  double contrast = 0.83;               // excitation ceiling
};

/// Lamb-Dicke parameter k sqrt(hbar / (2 m omega)).
double lamb_dicke(double wavevector, double mass, double omega);

/// Radial-beam geometry: beam at 45 degrees to x and y, so eta_x = eta_y = eta/sqrt(2),
/// eta_z = 0, with eta = k l_ho at `omega` for the 411 nm wavevector.
RabiConfig radial_rabi_config(double omega0, double omega, double contrast = 0.83,
                              const Species& ion = Species::yb171_ion());

/// L_0(x) .. L_n(x) by the upward three-term recurrence.
std::vector<double> laguerre_table(int n, double x);

/// Thermal occupation probability nbar^n / (1 + nbar)^(n+1).
double thermal_weight(int n, double nbar);

/// Truncation N_max = max(50, 20 nbar) used by rabi_signal.
int truncation(double nbar);

/// contrast * sum_n P(n_x) P(n_y) P(n_z) sin^2(Omega_n t / 2) with
/// Omega_n = Omega0 prod_i exp(-eta_i^2/2) L_{n_i}(eta_i^2); the same nbar on every
/// axis with eta_i > 0. Throws DomainError if nbar < 0 and NumericalError if the
/// neglected thermal tail exceeds 1e-6.
double rabi_signal(double t_pulse, double nbar, const RabiConfig& cfg);
std::vector<double> rabi_signal(const std::vector<double>& t_pulse, double nbar, const RabiConfig& cfg);

struct RabiFit {
  double nbar = 0.0;
  double omega0 = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // (nbar, omega0)
  double temperature = 0.0;       // K
  double temperature_sigma = 0.0;
  double chi2 = 0.0;
  int dof = 0;
  double sigma_nbar() const { return std::sqrt(covariance(0, 0)); }
};

/// Secular temperature hbar omega (nbar + 1/2) / k_B.
double temperature_from_nbar(double nbar, double omega);
/// Inverse of temperature_from_nbar.
double nbar_from_temperature(double temperature, double omega);

/// Least-squares fit of (nbar, Omega0) with the contrast held at cfg.contrast;
/// cfg.omega0 seeds Omega0 (estimated from the data when zero). Needs >= 8 points
/// spanning at least one Rabi period; throws FitError on failure.
RabiFit fit_nbar(const std::vector<double>& t, const std::vector<double>& p, const RabiConfig& cfg,
                 const std::vector<double>& sigma = {});

}  // namespace ionbath::thermometry
