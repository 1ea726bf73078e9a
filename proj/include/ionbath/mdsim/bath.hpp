#pragma once

#include <cstdint>
#include <random>

#include "ionbath/core/config.hpp"
#include "ionbath/core/interaction.hpp"
#include "ionbath/trapdyn/dynamics.hpp"

namespace ionbath::mdsim {

using trapdyn::ParticleState;
using trapdyn::Vec3;
using Rng = std::mt19937_64;

/// Homogeneous atomic bath seen by the ion through an injection sphere.
struct BathParams {
  double temperature = 10e-6;              // T_a, K
  double sphere_radius = 0.6e-6;           // r0, m
  int atoms_per_run = 2000;                // N_at
  int runs = 50;
  std::uint64_t seed = 1;
  double ion_initial_temperature = 609e-6;  // K, Maxwell-Boltzmann draw of the secular state
  /// An atom still inside the sphere after this many RF periods is discarded and flagged.
  double max_rf_periods = 1e4;
};

/// Langevin capture radius (2 C4 / E)^(1/4) at collision energy E.
double capture_radius(double collision_energy, const InteractionModel& model);

/// Throws ConfigError unless T_a > 0, N_at >= 1, runs >= 1 and r0 exceeds five capture
/// radii at E_col = k_B T_a.
void validate(const BathParams& bath, const InteractionModel& model);

/// Atom on the sphere of radius r0 around `center` (uniform in solid angle) with an
/// inward velocity drawn from the flux-weighted Maxwell-Boltzmann distribution
/// (speed density ~ v^3 exp(-m v^2 / 2kT), direction cosine density ~ cos theta).
ParticleState sample_atom(const BathParams& bath, const InteractionModel& model, Rng& rng,
                          const Vec3& center = Vec3::Zero());

/// Ion state with a thermal secular part at `temperature` around the pseudopotential
/// equilibrium. In full_rf mode the state lies on the exact driven orbit at t = 0.
ParticleState sample_ion(const trapdyn::TrapParams& trap, double temperature, Rng& rng);

/// Per-run generator derived from (master seed, run index); independent of scheduling.
Rng run_rng(std::uint64_t master_seed, std::uint64_t run_index);

/// Reads bath.* keys (temperatures in uK, radius in um).
BathParams bath_from_config(const KeyValueConfig& cfg);

/// Mean speed of the flux-weighted distribution, sqrt(9 pi kT / (8 m)).
double flux_mean_speed(double temperature, double mass);

/// Kinetic-theory rate of atoms entering a sphere of radius r0 per unit density:
/// pi r0^2 <v> with <v> the Maxwell-Boltzmann mean speed, m^3/s.
double sphere_entry_rate_per_density(double temperature, double mass, double radius);

}  // namespace ionbath::mdsim
