#include "ionbath/mdsim/bath.hpp"

#include <cmath>

#include "ionbath/core/errors.hpp"
#include "ionbath/core/units.hpp"

namespace ionbath::mdsim {

double capture_radius(double collision_energy, const InteractionModel& model) {
  if (!(collision_energy > 0.0)) throw DomainError("capture_radius: energy must be positive");
  return std::pow(2.0 * model.c4() / collision_energy, 0.25);
}

void validate(const BathParams& bath, const InteractionModel& model) {
  if (!(bath.temperature > 0.0)) throw ConfigError("bath temperature must be positive");
  if (bath.atoms_per_run < 1) throw ConfigError("atoms per run must be at least 1");
  if (bath.runs < 1) throw ConfigError("runs must be at least 1");
  if (!(bath.ion_initial_temperature >= 0.0)) throw ConfigError("initial ion temperature must be >= 0");
  if (!(bath.max_rf_periods > 0.0)) throw ConfigError("atom time cap must be positive");
  const double rc = capture_radius(constants::boltzmann * bath.temperature, model);
  if (!(bath.sphere_radius > 5.0 * rc)) {
    throw ConfigError("injection sphere radius must exceed five Langevin capture radii (" +
                      std::to_string(5.0 * rc) + " m)");
  }
}

ParticleState sample_atom(const BathParams& bath, const InteractionModel& model, Rng& rng, const Vec3& center) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  Vec3 n(normal(rng), normal(rng), normal(rng));
  n.normalize();
  ParticleState atom;
  atom.position = center + bath.sphere_radius * n;
  if (!(bath.temperature > 0.0)) return atom;

  // v^2 ~ Gamma(2, 2kT/m) gives the v^3 exp(-m v^2/2kT) flux-weighted speed density.
  std::gamma_distribution<double> gamma(2.0, 2.0 * constants::boltzmann * bath.temperature / model.atom().mass);
  const double speed = std::sqrt(gamma(rng));
  // Direction relative to the inward normal: cos theta = sqrt(u) has density 2 cos theta.
  const double cos_t = std::sqrt(uniform(rng));
  const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
  const double phi = constants::two_pi * uniform(rng);
  const Vec3 inward = -n;
  Vec3 e1 = inward.unitOrthogonal();
  Vec3 e2 = inward.cross(e1);
  atom.velocity = speed * (cos_t * inward + sin_t * (std::cos(phi) * e1 + std::sin(phi) * e2));
  return atom;
}

ParticleState sample_ion(const trapdyn::TrapParams& trap, double temperature, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sv = std::sqrt(constants::boltzmann * std::max(temperature, 0.0) / trap.ion.mass);
  Vec3 offset, velocity;
  for (int i = 0; i < 3; ++i) {
    offset[i] = normal(rng) * sv / trap.secular[i];
    velocity[i] = normal(rng) * sv;
  }
  const trapdyn::OrbitState s = trapdyn::orbit_state(trap, offset, velocity);
  return ParticleState{s.position, s.velocity};
}

Rng run_rng(std::uint64_t master_seed, std::uint64_t run_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(run_index), static_cast<std::uint32_t>(run_index >> 32),
                    0x6d64u};
  return Rng(seq);
}

BathParams bath_from_config(const KeyValueConfig& cfg) {
  BathParams b;
  b.temperature = cfg.get_double("bath.temperature_uk", 10.0) * 1e-6;
  b.sphere_radius = cfg.get_double("bath.sphere_radius_um", 0.6) * 1e-6;
  b.atoms_per_run = static_cast<int>(cfg.get_int("bath.atoms_per_run", 2000));
  b.runs = static_cast<int>(cfg.get_int("bath.runs", 50));
  b.seed = static_cast<std::uint64_t>(cfg.get_int("bath.seed", 1));
  b.ion_initial_temperature = cfg.get_double("bath.ion_initial_temperature_uk", 609.0) * 1e-6;
  b.max_rf_periods = cfg.get_double("bath.max_rf_periods", 1e4);
  return b;
}

double flux_mean_speed(double temperature, double mass) {
  return std::sqrt(9.0 * constants::pi * constants::boltzmann * temperature / (8.0 * mass));
}

double sphere_entry_rate_per_density(double temperature, double mass, double radius) {
  const double mean_speed = std::sqrt(8.0 * constants::boltzmann * temperature / (constants::pi * mass));
  return constants::pi * radius * radius * mean_speed;
}

}  // namespace ionbath::mdsim
