#include "ionbath/mdsim/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <tbb/global_control.h>
#include <tbb/parallel_for.h>

#include "ionbath/core/errors.hpp"

namespace ionbath::mdsim {

using trapdyn::TrapMode;

std::vector<double> SequenceResult::radial_temperature() const {
  std::vector<double> t(radial_energy.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = radial_energy[i] / (2.0 * constants::boltzmann);
  return t;
}

int SequenceResult::close_encounters(double radius) const {
  return static_cast<int>(std::count_if(min_distance.begin(), min_distance.end(),
                                        [radius](double r) { return r < radius; }));
}

std::pair<double, double> measure_secular_energy(const ParticleState& ion, double t,
                                                 const trapdyn::Propagator& ion_only, double probe_rf_periods) {
  const auto& trap = ion_only.trap();
  if (trap.mode == TrapMode::secular_approximation) {
    return trapdyn::pseudopotential_energy(ion.position, ion.velocity, trap);
  }
  const double dt = trap.rf_period() / ion_only.options().rf_steps_per_period;
  const trapdyn::LowPassFilter filter = trapdyn::secular_filter_for(trap, dt, probe_rf_periods);
  const int hw = filter.half_width();
  const int n = 2 * hw + 1;
  std::array<std::vector<double>, 6> comp;
  for (auto& c : comp) c.reserve(n);
  auto push = [&](const ParticleState& s) {
    for (int i = 0; i < 3; ++i) {
      comp[i].push_back(s.position[i]);
      comp[3 + i].push_back(s.velocity[i]);
    }
  };
  push(ion);
  ParticleState probe = ion;
  double tp = t;
  long next = 1;
  auto observer = [&](double tt, const ParticleState& s, const ParticleState*) {
    const double target = t + static_cast<double>(next) * dt;
    if (std::abs(tt - target) <= 1e-9 * dt) {
      push(s);
      ++next;
    }
    return next < n;
  };
  ion_only.propagate(probe, nullptr, tp, (n - 1) * dt * (1.0 + 1e-12), observer, dt);
  if (static_cast<int>(comp[0].size()) != n) throw IntegrationError("secular-energy probe lost samples");
  trapdyn::Vec3 x, v;
  for (int i = 0; i < 3; ++i) {
    x[i] = filter.at(comp[i], hw);
    v[i] = filter.at(comp[3 + i], hw);
  }
  return trapdyn::pseudopotential_energy(x, v, trap);
}

SequenceResult run_sequence(const ParticleState& ion, const BathParams& bath, const trapdyn::TrapParams& trap,
                            const InteractionModel& model, Rng& rng, const SequenceOptions& options) {
  validate(bath, model);
  const trapdyn::Propagator pair(trap, model, options.integrate);
  const trapdyn::Propagator& prop = pair;
  const double r0 = bath.sphere_radius;
  const double cap = bath.max_rf_periods * prop.trap().rf_period();

  SequenceResult result;
  result.radial_energy.reserve(bath.atoms_per_run + 1);
  result.axial_energy.reserve(bath.atoms_per_run + 1);
  result.min_distance.reserve(bath.atoms_per_run);

  ParticleState ion_state = ion;
  double t = 0.0;
  auto record = [&] {
    auto [rad, ax] = measure_secular_energy(ion_state, t, prop, options.probe_rf_periods);
    result.radial_energy.push_back(rad);
    result.axial_energy.push_back(ax);
  };
  record();

  const double r0_exit = r0 * (1.0 + 1e-9);
  for (int k = 0; k < bath.atoms_per_run; ++k) {
    ParticleState atom = sample_atom(bath, model, rng);
    double r_min = std::numeric_limits<double>::infinity();
    bool exited = false;
    auto observer = [&](double, const ParticleState& s, const ParticleState* a) {
      r_min = std::min(r_min, (a->position - s.position).norm());
      if (a->position.norm() > r0_exit) {
        exited = true;
        return false;
      }
      return true;
    };
    try {
      const auto stats = prop.propagate(ion_state, &atom, t, cap, observer);
      result.steps += stats.accepted + stats.rejected;
    } catch (const IntegrationError& e) {
      throw IntegrationError("atom " + std::to_string(k) + ": " + e.what());
    }
    if (!exited) ++result.capped_atoms;
    result.min_distance.push_back(r_min);
    record();
  }
  result.elapsed_time = t;
  return result;
}

CoolingCurve average_curve(const std::vector<SequenceResult>& runs) {
  CoolingCurve c;
  if (runs.empty()) return c;
  const std::size_t n = runs.front().radial_energy.size();
  c.collisions.resize(n);
  c.mean.assign(n, 0.0);
  c.sem.assign(n, 0.0);
  const double nr = static_cast<double>(runs.size());
  for (std::size_t i = 0; i < n; ++i) {
    c.collisions[i] = static_cast<double>(i);
    double sum = 0.0;
    for (const auto& r : runs) sum += r.radial_energy[i] / (2.0 * constants::boltzmann);
    const double mean = sum / nr;
    double ss = 0.0;
    for (const auto& r : runs) {
      const double d = r.radial_energy[i] / (2.0 * constants::boltzmann) - mean;
      ss += d * d;
    }
    c.mean[i] = mean;
    c.sem[i] = runs.size() > 1 ? std::sqrt(ss / (nr - 1.0) / nr) : 0.0;
  }
  return c;
}

EnsembleResult run_ensemble(const EnsembleConfig& config, int runs) {
  if (runs < 1) throw ConfigError("ensemble needs at least one run");
  validate(config.bath, config.model);
  EnsembleResult out;
  out.runs.resize(runs);
  auto body = [&](int r) {
    Rng rng = run_rng(config.bath.seed, static_cast<std::uint64_t>(r));
    const ParticleState ion = sample_ion(config.trap, config.bath.ion_initial_temperature, rng);
    try {
      out.runs[r] = run_sequence(ion, config.bath, config.trap, config.model, rng, config.options);
    } catch (const IntegrationError& e) {
      throw IntegrationError("run " + std::to_string(r) + ", " + e.what());
    }
  };
  if (config.workers == 1) {
    for (int r = 0; r < runs; ++r) body(r);
  } else {
    std::unique_ptr<tbb::global_control> limit;
    if (config.workers > 1) {
      limit = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                    static_cast<std::size_t>(config.workers));
    }
    tbb::parallel_for(0, runs, body);
  }
  // Reduction in run order.
  double atoms = 0.0;
  for (const auto& r : out.runs) {
    out.simulated_time += r.elapsed_time;
    out.capped_atoms += r.capped_atoms;
    atoms += static_cast<double>(r.min_distance.size());
  }
  out.flux = out.simulated_time > 0.0 ? atoms / out.simulated_time : 0.0;
  out.curve = average_curve(out.runs);
  return out;
}

}  // namespace ionbath::mdsim
