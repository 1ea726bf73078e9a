#pragma once

#include <vector>

#include "ionbath/mdsim/cooling_fit.hpp"
#include "ionbath/mdsim/sequence.hpp"

namespace ionbath::mdsim {

struct EnergyHistogram {
  std::vector<double> edges;     // J, size bins + 1
  std::vector<int> counts;
  std::vector<double> expected;  // thermal expectation per bin at the fitted T
  double temperature = 0.0;      // K, maximum-likelihood thermal fit
  double temperature_sigma = 0.0;
  int modes = 3;                 // harmonic degrees of freedom of the energy
  double chi2 = 0.0;             // Pearson statistic
  int dof = 0;
  double p_value = 0.0;
  bool thermal(double alpha = 0.05) const { return p_value > alpha; }
};

/// Histograms secular energies and fits the thermal distribution of a `modes`-dimensional
/// harmonic oscillator, E ~ Gamma(modes, k_B T). The goodness of fit is a Pearson
/// chi-square over bins of equal expected probability. Requires >= 100 samples.
EnergyHistogram energy_histogram(const std::vector<double>& energies, int modes = 3, int bins = 0);

/// Plateau samples for the histogram: from each run, total secular energies after the
/// curve has settled (n >= start), every `stride` collisions.
std::vector<double> plateau_energies(const std::vector<SequenceResult>& runs, int start, int stride);

}  // namespace ionbath::mdsim
