#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ionbath/core/constants.hpp"
#include "ionbath/core/interaction.hpp"

namespace ionbath::thermometry {

struct DopplerFit {
  double amplitude = 0.0;
  double center = 0.0;   // Hz
  double sigma = 0.0;    // Gaussian width, Hz
  double offset = 0.0;
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();  // (amplitude, center, sigma, offset)
  double temperature = 0.0;        // K
  double temperature_sigma = 0.0;  // K
  double sigma_sigma() const { return std::sqrt(covariance(2, 2)); }
};

/// T = m (sigma lambda)^2 / k_B for a Doppler width sigma (Hz).
double doppler_temperature(double sigma, double mass, double wavelength = constants::yb_411_wavelength);
/// sigma = sqrt(k_B T / m) / lambda.
double doppler_width(double temperature, double mass, double wavelength = constants::yb_411_wavelength);

/// Gaussian-plus-offset fit of an excitation spectrum (detuning in Hz). The resonance
/// must lie inside the scanned range; throws FitError otherwise or on non-convergence.
DopplerFit doppler_fit(const std::vector<double>& detuning, const std::vector<double>& p,
                       const Species& ion = Species::yb171_ion(),
                       double wavelength = constants::yb_411_wavelength, const std::vector<double>& sigma = {});

}  // namespace ionbath::thermometry
