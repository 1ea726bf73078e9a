#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ionbath/scatter/channel_model.hpp"
#include "ionbath/scatter/numerov.hpp"

namespace ionbath::scatter {

/// Riccati-Bessel matching pair at reduced radius x for one channel with local
/// energy e = eps - threshold. Open channels (e > 0) use k^-1/2 (kx j_l, kx y_l); closed
/// channels use the modified pair, returned with the exponential factor split off.
struct RiccatiPair {
  double regular = 0.0;
  double irregular = 0.0;
  /// Natural log of the common scale of the closed-channel functions (0 when open).
  double log_regular_scale = 0.0;
  double log_irregular_scale = 0.0;
};
RiccatiPair riccati_pair(int l, double e, double x);

struct ScatteringResult {
  double eps = 0.0;  // energy in units of E_s
  int l = 0;
  std::vector<int> open;   // indices of open channels
  Eigen::MatrixXd K;       // open-open reactance matrix
  Eigen::MatrixXcd S;      // open-open S matrix
  double k_asymmetry = 0.0;      // max |K - K^T|
  double unitarity_error = 0.0;  // max |S S^dagger - I|
  Propagation propagation;

  /// Single-channel phase shift (rad), in (-pi/2, pi/2].
  double phase_shift() const;
  /// |S_ij|^2 between model channels i and j (0 when either is closed).
  double transition_probability(int i, int j) const;
};

/// Matches the propagated wavefunction ratio to Riccati-Bessel pairs and builds K and S.
/// Throws NumericalError when S is non-unitary beyond `unitarity_tolerance`.
ScatteringResult extract_smatrix(const Propagation& prop, const ChannelModel& model, double eps, int l,
                                 double unitarity_tolerance = 1e-4);

/// Propagation plus extraction at energy eps (units of E_s) and partial wave l.
ScatteringResult solve_scattering(const ChannelModel& model, double eps, int l, const NumerovOptions& options = {},
                         double unitarity_tolerance = 1e-4);

}  // namespace ionbath::scatter
