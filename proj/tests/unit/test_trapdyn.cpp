#include <doctest.h>

#include <cmath>

#include "ionbath/core/errors.hpp"
#include "ionbath/core/units.hpp"
#include "ionbath/trapdyn/dynamics.hpp"
#include "ionbath/trapdyn/integrator.hpp"
#include "ionbath/trapdyn/secular_filter.hpp"
#include "ionbath/trapdyn/trap.hpp"

using namespace ionbath;
using namespace ionbath::trapdyn;

namespace {

const InteractionModel kModel = InteractionModel::li_yb();

TrapParams trap_at(double radial_khz, TrapMode mode) {
  TrapParams p = make_trap(units::mhz_to_angular(1.85), units::khz_to_angular(radial_khz),
                           units::khz_to_angular(radial_khz), units::khz_to_angular(130.0), mode);
  validate(p);
  return p;
}

double secular_energy_of(const Vec3& x, const Vec3& v, const TrapParams& p) {
  const auto [r, a] = pseudopotential_energy(x, v, p);
  return r + a;
}

// Frequency (Hz) maximizing the discrete Fourier power of a uniformly sampled signal.
double dominant_frequency(const std::vector<double>& s, double dt, double f_lo, double f_hi) {
  auto power = [&](double f) {
    double c = 0.0, q = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      c += s[i] * std::cos(constants::two_pi * f * dt * i);
      q += s[i] * std::sin(constants::two_pi * f * dt * i);
    }
    return c * c + q * q;
  };
  double best = f_lo, best_p = -1.0;
  for (double f = f_lo; f <= f_hi; f += 100.0) {
    const double p = power(f);
    if (p > best_p) best_p = p, best = f;
  }
  for (double step = 50.0; step > 0.1; step *= 0.5) {
    for (double f : {best - step, best + step}) {
      const double p = power(f);
      if (p > best_p) best_p = p, best = f;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("Dormand-Prince integrates a harmonic oscillator to tolerance") {
  StateVector<2> y = {1.0, 0.0};
  auto rhs = [](double, const StateVector<2>& s, StateVector<2>& d) {
    d[0] = s[1];
    d[1] = -s[0];
  };
  StepControl ctl;
  ctl.rtol = 1e-12;
  ctl.atol = 1e-14;
  integrate_dopri5<2>(rhs, [](double, const StateVector<2>&) { return HUGE_VAL; },
                      [](double, const StateVector<2>&) { return true; }, y, 0.0, 20.0 * constants::pi, ctl);
  CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(y[1]) < 1e-9);
}

TEST_CASE("ideal trap has a field node at the origin") {
  const TrapParams p = trap_at(330.0, TrapMode::full_rf);
  for (double t : {0.0, 1e-7, 3.3e-7, 1e-6}) CHECK(trap_field(Vec3::Zero(), t, p).norm() == 0.0);
}

TEST_CASE("Mathieu parameters and secular frequencies") {
  const TrapParams p = trap_at(330.0, TrapMode::full_rf);
  CHECK(p.q[0] == doctest::Approx(0.50).epsilon(0.03));
  const auto w = secular_frequencies(p);
  CHECK(w[0] == doctest::Approx(units::khz_to_angular(330.0)).epsilon(1e-6));
  CHECK(w[2] == doctest::Approx(units::khz_to_angular(130.0)).epsilon(1e-6));
  const auto w0 = lowest_order_frequencies(p);
  // At q = 0.5 the lowest-order estimate is already a few percent low.
  CHECK(w0[0] < w[0]);
  CHECK(w0[0] == doctest::Approx(w[0]).epsilon(0.07));
  // Static limit.
  CHECK(mathieu_beta(0.04, 0.0) == doctest::Approx(0.2).epsilon(1e-6));
}

TEST_CASE("invalid traps are rejected") {
  CHECK_THROWS_AS(make_trap(units::mhz_to_angular(1.0), units::khz_to_angular(600.0), units::khz_to_angular(600.0),
                            units::khz_to_angular(100.0)),
                  ConfigError);
  CHECK_THROWS_AS(make_trap(0.0, 1.0, 1.0, 1.0), ConfigError);
}

TEST_CASE("stray field displaces the ion by eE/(m w^2)") {
  TrapParams p = trap_at(210.0, TrapMode::full_rf);
  p.stray_field = Vec3(0.05, 0.0, 0.0);
  const double w = units::khz_to_angular(210.0);
  const double x = constants::elementary_charge * 0.05 / (p.ion.mass * w * w);
  CHECK(p.equilibrium()[0] == doctest::Approx(x).epsilon(1e-9));
  CHECK(p.equilibrium()[0] == doctest::Approx(16e-9).epsilon(0.05));
  // Energy scales with the square of the field.
  const double e1 = stray_field_mm_energy(p);
  p.stray_field *= 3.0;
  CHECK(stray_field_mm_energy(p) / e1 == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("energy is conserved in the static trap over 1000 periods") {
  const TrapParams p = trap_at(330.0, TrapMode::secular_approximation);
  ParticleState ion;
  ion.position = Vec3(200e-9, -120e-9, 300e-9);
  ion.velocity = Vec3(0.05, 0.08, -0.03);
  const double e0 = secular_energy_of(ion.position, ion.velocity, p);
  const double duration = 1000.0 * constants::two_pi / units::khz_to_angular(130.0);
  const IonTrajectory tr = integrate(ion, p, kModel, std::nullopt, 0.0, duration, duration / 4.0);
  const double e1 = secular_energy_of(tr.position.back(), tr.velocity.back(), p);
  CHECK(std::abs(e1 / e0 - 1.0) < 1e-6);
  for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr.t[i] > tr.t[i - 1]);
}

TEST_CASE("displaced ion: mean micromotion kinetic energy matches the stray-field formula") {
  TrapParams p = trap_at(210.0, TrapMode::full_rf);
  p.stray_field = Vec3(0.05, 0.0, 0.0);
  validate(p);
  const OrbitState o = orbit_state(p, Vec3::Zero(), Vec3::Zero());
  ParticleState ion{o.position, o.velocity};
  const double periods = 40.0;
  const double dt = p.rf_period() / 40.0;
  const IonTrajectory tr = integrate(ion, p, kModel, std::nullopt, 0.0, periods * p.rf_period(), dt);
  double mean = 0.0;
  for (std::size_t i = 0; i + 1 < tr.size(); ++i) mean += tr.kinetic[i];
  mean /= static_cast<double>(tr.size() - 1);
  CHECK(mean == doctest::Approx(stray_field_mm_energy(p)).epsilon(0.05));
}

TEST_CASE("secular oscillation frequency from the full RF motion") {
  const TrapParams p = trap_at(330.0, TrapMode::full_rf);
  const OrbitState o = orbit_state(p, Vec3(500e-9, 0.0, 0.0), Vec3::Zero());
  ParticleState ion{o.position, o.velocity};
  const double dt = p.rf_period() / 40.0;
  const double duration = 200.0 / 330e3;
  const IonTrajectory tr = integrate(ion, p, kModel, std::nullopt, 0.0, duration, dt);
  std::vector<double> x;
  for (const auto& r : tr.position) x.push_back(r[0]);
  const double f = dominant_frequency(x, dt, 250e3, 420e3);
  CHECK(f == doctest::Approx(330e3).epsilon(0.02));
}

TEST_CASE("secular low-pass filter rejects the RF drive") {
  const TrapParams p = trap_at(330.0, TrapMode::full_rf);
  const double dt = p.rf_period() / 40.0;
  const LowPassFilter filt = secular_filter_for(p, dt);
  const double f_rf = p.rf_drive / constants::two_pi;
  CHECK(std::abs(filt.response(f_rf)) <= 0.01);
  CHECK(std::abs(filt.response(2.0 * f_rf)) <= 0.01);
  CHECK(filt.response(0.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(filt.response(330e3) == doctest::Approx(1.0).epsilon(0.01));
  CHECK_THROWS_AS(LowPassFilter(dt, 0.6 / dt, 10), DomainError);
}

TEST_CASE("secular energy removes micromotion from a displaced ion") {
  TrapParams p = trap_at(330.0, TrapMode::full_rf);
  const OrbitState o = orbit_state(p, Vec3(300e-9, 200e-9, 0.0), Vec3::Zero());
  ParticleState ion{o.position, o.velocity};
  const double dt = p.rf_period() / 40.0;
  const IonTrajectory tr = integrate(ion, p, kModel, std::nullopt, 0.0, 60.0 * p.rf_period(), dt);
  const SecularEnergySeries se = secular_energy(tr, p);
  REQUIRE(!se.total.empty());
  const double expected = secular_energy_of(Vec3(300e-9, 200e-9, 0.0), Vec3::Zero(), p);
  double mean = 0.0;
  for (double e : se.total) mean += e;
  mean /= static_cast<double>(se.total.size());
  CHECK(mean == doctest::Approx(expected).epsilon(0.05));
}
