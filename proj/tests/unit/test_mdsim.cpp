#include <doctest.h>

#include <cmath>
#include <random>

#include "ionbath/core/errors.hpp"
#include "ionbath/core/units.hpp"
#include "ionbath/mdsim/bath.hpp"
#include "ionbath/mdsim/cooling_fit.hpp"
#include "ionbath/mdsim/histogram.hpp"
#include "ionbath/mdsim/sequence.hpp"
#include "ionbath/trapdyn/trap.hpp"

using namespace ionbath;
using namespace ionbath::mdsim;

namespace {

const InteractionModel kModel = InteractionModel::li_yb();

BathParams small_bath(int atoms) {
  BathParams b;
  b.atoms_per_run = atoms;
  b.runs = 1;
  b.seed = 7;
  return b;
}

}  // namespace

TEST_CASE("atoms start on the sphere moving inward with flux-weighted speeds") {
  BathParams b;
  Rng rng(11);
  const int n = 200000;
  double v1 = 0.0, v2 = 0.0, cos_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const ParticleState a = sample_atom(b, kModel, rng);
    CHECK(a.position.norm() == doctest::Approx(b.sphere_radius).epsilon(1e-12));
    const double v = a.velocity.norm();
    const double c = -a.velocity.dot(a.position) / (v * a.position.norm());
    REQUIRE(c >= 0.0);
    v1 += v;
    v2 += v * v;
    cos_sum += c;
  }
  const double m = kModel.atom().mass;
  const double kt = constants::boltzmann * b.temperature;
  // Flux-weighted Maxwell-Boltzmann: <v> = sqrt(9 pi kT / 8m), <v^2> = 4 kT / m.
  CHECK(v1 / n == doctest::Approx(flux_mean_speed(b.temperature, m)).epsilon(0.005));
  CHECK(v1 / n == doctest::Approx(std::sqrt(9.0 * constants::pi * kt / (8.0 * m))).epsilon(0.005));
  CHECK(v2 / n == doctest::Approx(4.0 * kt / m).epsilon(0.01));
  // Cosine-weighted direction: <cos theta> = 2/3.
  CHECK(cos_sum / n == doctest::Approx(2.0 / 3.0).epsilon(0.005));
}

TEST_CASE("bath validation") {
  BathParams b;
  CHECK_NOTHROW(validate(b, kModel));
  b.sphere_radius = 2.0 * capture_radius(constants::boltzmann * b.temperature, kModel);
  CHECK_THROWS_AS(validate(b, kModel), ConfigError);
  b = BathParams{};
  b.temperature = 0.0;
  CHECK_THROWS_AS(validate(b, kModel), ConfigError);
  b = BathParams{};
  b.atoms_per_run = 0;
  CHECK_THROWS_AS(validate(b, kModel), ConfigError);
}

TEST_CASE("per-run generators are reproducible and distinct") {
  Rng a = run_rng(5, 3), b = run_rng(5, 3), c = run_rng(5, 4);
  const auto x = a(), y = b(), z = c();
  CHECK(x == y);
  CHECK(x != z);
}

TEST_CASE("cooling fit recovers exact exponential data") {
  std::vector<double> x, y;
  for (int i = 0; i <= 100; ++i) {
    x.push_back(i * 20.0);
    y.push_back((600e-6 - 10e-6) * std::exp(-x.back() / 400.0) + 10e-6);
  }
  const CoolingFit f = fit_cooling(x, y);
  CHECK(f.T0 == doctest::Approx(600e-6).epsilon(1e-6));
  CHECK(f.T_inf == doctest::Approx(10e-6).epsilon(1e-6));
  CHECK(f.N_eq == doctest::Approx(400.0).epsilon(1e-6));
  CHECK_FALSE(f.degenerate);
  CHECK(f(400.0) == doctest::Approx(590e-6 / std::exp(1.0) + 10e-6).epsilon(1e-9));
  CHECK_THROWS_AS(fit_cooling({1, 2, 3}, {1, 2, 3}), DomainError);
}

TEST_CASE("a flat curve gives a degenerate fit") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 1e-7);
  std::vector<double> x, y, s;
  for (int i = 0; i < 60; ++i) {
    x.push_back(i);
    y.push_back(20e-6 + noise(rng));
    s.push_back(1e-7);
  }
  bool degenerate = false;
  try {
    degenerate = fit_cooling(x, y, s).degenerate;
  } catch (const FitError&) {
    degenerate = true;
  }
  CHECK(degenerate);
}

TEST_CASE("Langevin collision count") {
  const double k_l = langevin_rate_coeff(kModel);
  CoolingFit f;
  f.N_eq = 250.0;
  const double rho = simulation_density(0.6e-6);
  CHECK(rho == doctest::Approx(1.0 / (4.0 / 3.0 * constants::pi * std::pow(0.6e-6, 3))));
  // Flux equal to one Langevin collision per atom.
  const double flux = k_l * rho * f.N_eq;
  CHECK(langevin_collisions(f, flux, rho, kModel) == doctest::Approx(1.0).epsilon(1e-12));
  // At fixed flux the count scales with the density, i.e. as r0^-3.
  const double rho2 = simulation_density(1.2e-6);
  CHECK(langevin_collisions(f, flux, rho2, kModel) == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
  CHECK_THROWS_AS(langevin_collisions(f, 0.0, rho, kModel), DomainError);
  CHECK(density_from_cooling(27.0, 0.236, kModel) == doctest::Approx(27.0 / (0.236 * k_l)));
}

TEST_CASE("background heating shifts the final temperature by gamma_heat * tau") {
  CoolingFit f;
  f.T0 = 600e-6;
  f.T_inf = 10e-6;
  f.tau = 0.236;
  const HeatedCooling h = apply_heating(f, units::microkelvin_per_second(83.0));
  CHECK(units::joule_to_microkelvin(constants::boltzmann * h.offset()) == doctest::Approx(19.6).epsilon(0.01));
  CHECK(h.final_temperature() == doctest::Approx(10e-6 + 83e-6 * 0.236));
  CHECK(h(0.0) == doctest::Approx(600e-6 + h.offset()));
  CHECK(h(100.0) == doctest::Approx(h.final_temperature()));
  f.tau = 0.0;
  CHECK_THROWS_AS(apply_heating(f, 1e-6), DomainError);
}

TEST_CASE("energy histogram recovers the temperature of thermal samples") {
  std::mt19937_64 rng(20240611);
  const double kt = constants::boltzmann * 38.2e-6;
  std::gamma_distribution<double> g(3.0, kt);
  std::vector<double> e(300);
  for (double& v : e) v = g(rng);
  const EnergyHistogram h = energy_histogram(e, 3);
  CHECK(std::abs(h.temperature * 1e6 - 38.2) < 2.0);
  CHECK(h.temperature_sigma * 1e6 == doctest::Approx(38.2 / std::sqrt(900.0)).epsilon(0.1));
  CHECK(h.thermal());
  int total = 0;
  for (int c : h.counts) total += c;
  CHECK(total == 300);

  // Every sample at the same energy is far from thermal.
  const EnergyHistogram d = energy_histogram(std::vector<double>(300, 3.0 * kt), 3);
  CHECK_FALSE(d.thermal());
  CHECK_THROWS_AS(energy_histogram(std::vector<double>(50, kt), 3), DomainError);
}

TEST_CASE("a single-run ensemble reproduces run_sequence") {
  EnsembleConfig cfg;
  cfg.bath = small_bath(4);
  cfg.trap = trapdyn::paper_trap(trapdyn::TrapMode::secular_approximation);
  cfg.workers = 1;
  const EnsembleResult ens = run_ensemble(cfg, 1);

  Rng rng = run_rng(cfg.bath.seed, 0);
  const ParticleState ion = sample_ion(cfg.trap, cfg.bath.ion_initial_temperature, rng);
  const SequenceResult seq = run_sequence(ion, cfg.bath, cfg.trap, kModel, rng);
  REQUIRE(ens.runs.size() == 1);
  CHECK(ens.runs[0].radial_energy == seq.radial_energy);
  CHECK(ens.runs[0].axial_energy == seq.axial_energy);
  CHECK(ens.runs[0].min_distance == seq.min_distance);
  CHECK(seq.radial_energy.size() == 5);
  CHECK(ens.curve.sem[0] == 0.0);
  CHECK(ens.flux > 0.0);
}

TEST_CASE("ensembles do not depend on the worker count") {
  EnsembleConfig cfg;
  cfg.bath = small_bath(3);
  cfg.trap = trapdyn::paper_trap(trapdyn::TrapMode::secular_approximation);
  cfg.workers = 1;
  const EnsembleResult a = run_ensemble(cfg, 3);
  cfg.workers = 2;
  const EnsembleResult b = run_ensemble(cfg, 3);
  CHECK(a.curve.mean == b.curve.mean);
  CHECK(a.curve.sem == b.curve.sem);
  CHECK(a.simulated_time == b.simulated_time);
}
