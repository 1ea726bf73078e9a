#pragma once

#include <array>

#include "ionbath/scatter/channel_model.hpp"
#include "ionbath/scatter/numerov.hpp"

namespace ionbath::scatter {

struct ScatteringLength {
  double reduced = 0.0;  // a / R4
  double meters = 0.0;
  /// Bound s-wave states supported by the potential (zero-energy node count).
  int bound_states = 0;
  /// Set when the low-energy data are inconsistent with a single finite a (pole nearby).
  bool near_pole = false;
  /// Effective-range coefficients of k cot(delta) = c0 + c1 k + c2 k^2 ln k + c3 k^2 (reduced units).
  std::array<double, 4> expansion{};
};

/// s-wave scattering length from the zero-energy solution: beyond the short-range region
/// u = x [A sin(1/x) + B cos(1/x)] (or A + B x for V = 0), and a = -A/B.
ScatteringLength zero_energy_scattering_length(const ChannelModel& model, const NumerovOptions& options = {});

/// s-wave scattering length from a low-energy phase-shift extrapolation: k cot(delta) is
/// fitted over four energies with k R4 <= k_max and a = -1/c0. The phase shifts are
/// tiny there, so propagation uses at least 400 steps per local wavelength.
ScatteringLength scattering_length(const ChannelModel& model, double k_max = 0.01,
                                   const NumerovOptions& options = {});

struct TuneResult {
  double lambda = 1.0;
  double reduced = 0.0;  // achieved a / R4
  int bound_states = 0;
  /// Bound states gained (positive) or lost relative to lambda = 1.
  int bound_states_crossed = 0;
  int evaluations = 0;
};

/// Finds the potential scale lambda nearest to 1 for which the single-channel model built
/// from `interaction` has scattering length `target_reduced` (units of R4). Between
/// adjacent poles a(lambda) decreases monotonically, so the search walks away from
/// lambda = 1 in the direction that moves a toward the target and brackets the crossing.
/// Throws NumericalError if no crossing exists in [lambda_min, lambda_max].
TuneResult tune_scaling(const InteractionModel& interaction, double target_reduced, double tolerance = 1e-6,
                        double lambda_min = 0.5, double lambda_max = 2.0, const NumerovOptions& options = {});

}  // namespace ionbath::scatter
