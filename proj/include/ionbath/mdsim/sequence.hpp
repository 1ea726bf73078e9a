#pragma once

#include <cstdint>
#include <vector>

#include "ionbath/mdsim/bath.hpp"
#include "ionbath/trapdyn/secular_filter.hpp"

namespace ionbath::mdsim {

struct SequenceOptions {
  trapdyn::IntegrateOptions integrate{};
  /// Length of the ion-only probe used to measure the secular energy in full_rf mode.
  double probe_rf_periods = 12.0;
  /// Distance below which a pass counts as a close encounter (diagnostic), m.
  double close_encounter_radius = 12e-9;
};

/// One run: atoms introduced one after another.
struct SequenceResult {
  /// Secular energies after 0, 1, ..., N_at atoms, J.
  std::vector<double> radial_energy;
  std::vector<double> axial_energy;
  /// Minimum atom-ion distance of each atom, m.
  std::vector<double> min_distance;
  int capped_atoms = 0;
  double elapsed_time = 0.0;  // simulated time, s
  long steps = 0;

  /// Radial secular temperature E_rad / (2 k_B) per collision index, K.
  std::vector<double> radial_temperature() const;
  int close_encounters(double radius) const;
};

/// Propagates each atom until it leaves the sphere (or hits the time cap), recording the
/// micromotion-free ion secular energy after every atom. Deterministic given `rng`.
/// Integration failures are rethrown as IntegrationError naming the atom index.
SequenceResult run_sequence(const ParticleState& ion, const BathParams& bath, const trapdyn::TrapParams& trap,
                            const InteractionModel& model, Rng& rng, const SequenceOptions& options = {});

/// Secular energy (radial, axial) of the ion state at time t. In full_rf mode an ion-only
/// probe of `probe_rf_periods` is integrated and low-pass filtered at Omega_rf/2.
std::pair<double, double> measure_secular_energy(const ParticleState& ion, double t,
                                                 const trapdyn::Propagator& ion_only,
                                                 double probe_rf_periods = 12.0);

struct EnsembleConfig {
  BathParams bath;
  trapdyn::TrapParams trap;
  InteractionModel model = InteractionModel::li_yb();
  SequenceOptions options;
  int workers = 0;  // 0: library default
};

struct CoolingCurve {
  std::vector<double> collisions;  // 0 .. N_at
  std::vector<double> mean;        // K
  std::vector<double> sem;         // standard error of the mean, K (0 for one run)
};

struct EnsembleResult {
  std::vector<SequenceResult> runs;
  CoolingCurve curve;
  /// Atoms per simulated second over all runs, N_at / t_prop.
  double flux = 0.0;
  double simulated_time = 0.0;
  int capped_atoms = 0;
};

/// Independent runs with RNG streams from (seed, run index), executed in parallel and
/// reduced in run order, so results do not depend on the worker count.
EnsembleResult run_ensemble(const EnsembleConfig& config, int runs);

/// Mean and standard error per collision index of the radial temperature.
CoolingCurve average_curve(const std::vector<SequenceResult>& runs);

}  // namespace ionbath::mdsim
