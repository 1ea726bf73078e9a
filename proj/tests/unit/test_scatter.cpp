#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/bessel.hpp>

#include "ionbath/core/errors.hpp"
#include "ionbath/core/units.hpp"
#include "ionbath/scatter/channel_model.hpp"
#include "ionbath/scatter/classical_capture.hpp"
#include "ionbath/scatter/rates.hpp"
#include "ionbath/scatter/scattering_length.hpp"
#include "ionbath/scatter/smatrix.hpp"

using namespace ionbath;
using namespace ionbath::scatter;

namespace {

const InteractionModel kModel = InteractionModel::li_yb();

NumerovOptions fine() {
  NumerovOptions o;
  o.steps_per_wavelength = 400.0;
  return o;
}

double wrap_phase(double d) {
  while (d > constants::pi / 2) d -= constants::pi;
  while (d <= -constants::pi / 2) d += constants::pi;
  return d;
}

}  // namespace

TEST_CASE("free particle has zero phase shift") {
  const ChannelModel m = ChannelModel::free(kModel);
  for (int l : {0, 1, 3}) {
    for (double eps : {0.1, 2.0, 30.0}) {
      const ScatteringResult r = solve_scattering(m, eps, l, fine());
      CHECK(std::abs(r.phase_shift()) < 1e-6);
    }
  }
}

TEST_CASE("hard sphere phase shifts match spherical Bessel functions") {
  const double radius = 0.5 * kModel.r4();
  const ChannelModel m = ChannelModel::hard_sphere(kModel, radius);
  for (int l : {0, 1, 2}) {
    for (double eps : {0.05, 1.0, 6.0}) {
      const double ka = std::sqrt(eps) * 0.5;
      const double expected = std::atan(boost::math::sph_bessel(l, ka) / boost::math::sph_neumann(l, ka));
      const ScatteringResult r = solve_scattering(m, eps, l, fine());
      CHECK(std::abs(wrap_phase(r.phase_shift() - expected)) < 1e-6);
    }
  }
  // s wave: delta = -k a exactly.
  const ScatteringResult s = solve_scattering(m, 1.0, 0, fine());
  CHECK(s.phase_shift() == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("zero-energy scattering length of -1/x^4 with a hard wall") {
  for (double wall : {0.05, 0.08, 0.13}) {
    const ChannelModel m = ChannelModel::hard_sphere(kModel, wall * kModel.r4(), true);
    const ScatteringLength a = zero_energy_scattering_length(m, fine());
    const double expected = 1.0 / std::tan(1.0 / wall);
    CHECK(std::abs(a.reduced - expected) <= 1e-5 * std::max(1.0, std::abs(expected)));
    CHECK(a.meters == doctest::Approx(a.reduced * kModel.r4()));
  }
}

TEST_CASE("two-channel S matrix is unitary and K is symmetric") {
  const ChannelModel m = ChannelModel::two_spin(kModel, 1.003, 0.998, default_splitting());
  CHECK(m.channels() == 2);
  CHECK_FALSE(m.decoupled());
  for (int l : {0, 2, 5}) {
    for (double eps : {0.3, 5.0}) {
      const ScatteringResult r = solve_scattering(m, eps, l, fine());
      CHECK(r.open.size() == 2);
      CHECK(r.unitarity_error <= 1e-8);
      CHECK(r.k_asymmetry <= 1e-8);
      CHECK(r.transition_probability(0, 1) == doctest::Approx(r.transition_probability(1, 0)).epsilon(1e-8));
    }
  }
}

TEST_CASE("decoupled channels give a block-diagonal S matrix") {
  const ChannelModel m = ChannelModel::two_spin(kModel, 1.003, 1.003, default_splitting());
  CHECK(m.decoupled());
  const ScatteringResult r = solve_scattering(m, 1.0, 0, fine());
  CHECK(std::abs(r.S(0, 1)) < 1e-9);
  CHECK(std::abs(r.S(1, 0)) < 1e-9);
  const ChannelModel unmixed = ChannelModel::two_spin(kModel, 1.003, 0.998, default_splitting(), 0.0);
  CHECK(unmixed.decoupled());
  const RateCurve k = rate_constant(unmixed, {units::microkelvin_to_joule(10.0)});
  CHECK(k.rate[0] == doctest::Approx(0.0).scale(1e-30));
}

TEST_CASE("the l = 1 centrifugal barrier equals E_s") {
  const ChannelModel m = ChannelModel::single(kModel);
  double peak = -1e300;
  for (double x = 0.5; x <= 2.0; x += 1e-4) peak = std::max(peak, m.w_matrix(x, 0.0, 1)(0, 0));
  CHECK(peak == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(units::joule_to_microkelvin(kModel.s_wave_energy()) == doctest::Approx(8.58).epsilon(0.002));
}

TEST_CASE("potential scaling reaches the requested scattering length") {
  for (double target : {1.2, -1.5}) {
    const TuneResult t = tune_scaling(kModel, target);
    CHECK(t.reduced == doctest::Approx(target).epsilon(1e-5));
    const ScatteringLength a = zero_energy_scattering_length(ChannelModel::single(kModel, t.lambda), fine());
    CHECK(a.reduced == doctest::Approx(target).epsilon(1e-4));
  }
}

TEST_CASE("scattering length decreases with the potential scale between poles") {
  double prev = 0.0;
  int prev_bound = -1;
  int checked = 0;
  for (double lambda = 0.995; lambda <= 1.005; lambda += 0.0005) {
    const ScatteringLength a = zero_energy_scattering_length(ChannelModel::single(kModel, lambda));
    if (a.bound_states == prev_bound && !a.near_pole) {
      CHECK(a.reduced < prev);
      ++checked;
    }
    prev = a.reduced;
    prev_bound = a.bound_states;
  }
  CHECK(checked > 5);
}

TEST_CASE("classical capture reproduces the Langevin rate") {
  const double k_l = langevin_rate_coeff(kModel);
  for (double t_uk : {5.0, 50.0}) {
    const CaptureResult c = classical_capture(kModel, units::microkelvin_to_joule(t_uk));
    CHECK(c.rate == doctest::Approx(k_l).epsilon(0.02));
  }
}

TEST_CASE("low-energy threshold laws") {
  const ChannelModel m = ChannelModel::two_spin(kModel, 1.003, 0.998, default_splitting());
  const double es = kModel.s_wave_energy();
  RateOptions opt;
  opt.l_max = 1;
  opt.truncate_l = false;
  opt.numerov = fine();
  const RateCurve k = rate_constant(m, {1e-5 * es, 4e-5 * es}, opt);
  // Exothermic s wave: constant rate; p wave grows linearly with E.
  CHECK(k.partial[0][1] / k.partial[0][0] == doctest::Approx(1.0).epsilon(0.02));
  CHECK(k.partial[1][1] / k.partial[1][0] == doctest::Approx(4.0).epsilon(0.05));
  CHECK(k.rate[0] > 0.0);
}

TEST_CASE("energy grid") {
  const auto g = log_energy_grid(1.0, 100.0, 3);
  REQUIRE(g.size() == 3);
  CHECK(g[1] == doctest::Approx(10.0));
  CHECK_THROWS(log_energy_grid(-1.0, 1.0, 3));
}
