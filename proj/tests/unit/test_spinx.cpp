#include <doctest.h>

#include <cmath>
#include <filesystem>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ionbath/core/errors.hpp"
#include "ionbath/core/units.hpp"
#include "ionbath/spinx/emm_distribution.hpp"
#include "ionbath/spinx/rate_table.hpp"
#include "ionbath/spinx/spin_fit.hpp"

using namespace ionbath;
using namespace ionbath::spinx;

namespace {

const InteractionModel kModel = InteractionModel::li_yb();
const double kUk = units::microkelvin_to_joule(1.0);

// Energy-dependent toy rate: a_S sets a power-law slope, a_T a log-periodic modulation.
double toy_rate(double e, double a_s, double a_t) {
  const double k_l = langevin_rate_coeff(kModel);
  const double x = std::log(e / (10.0 * kUk));
  return 0.4 * k_l * std::exp(0.1 * a_s * x) * (1.0 + 0.15 * a_t * std::cos(x));
}

}  // namespace

TEST_CASE("arcsine distribution of the micromotion energy") {
  const EmmDistribution d{50.0 * kUk, 20.0 * kUk};
  CHECK(d.lower() == doctest::Approx(20.0 * kUk));
  CHECK(d.upper() == doctest::Approx(120.0 * kUk));
  CHECK(d.label(EnergyLabel::maximum) == doctest::Approx(120.0 * kUk));
  CHECK(d.label(EnergyLabel::mean) == doctest::Approx(70.0 * kUk));

  // Normalisation and mean by an independent endpoint-singular quadrature. Integrating
  // the zero-offset law over the lower half keeps E - E0 exact near the singularity;
  // the upper half follows from the mirror symmetry checked below. The density is
  // scale-free, so it is integrated in units of E_bar.
  const EmmDistribution d0{1.0, 0.0};
  boost::math::quadrature::tanh_sinh<double> q;
  const double half = q.integrate([&](double e) { return emm_pdf(e, d0); }, 0.0, d0.mean_emm);
  CHECK(std::abs(2.0 * half - 1.0) <= 1e-9);
  const double first = q.integrate([&](double e) { return e * emm_pdf(e, d0); }, 0.0, d0.mean_emm);
  const double mirrored = q.integrate([&](double e) { return (2.0 * d0.mean_emm - e) * emm_pdf(e, d0); }, 0.0,
                                      d0.mean_emm);
  CHECK(std::abs(first + mirrored - 1.0) <= 1e-9);
  const EmmDistribution d50{50.0 * kUk, 0.0};
  for (double e : {0.3, 12.0, 99.0}) {
    CHECK(emm_pdf((e + 20.0) * kUk, d) == doctest::Approx(emm_pdf(e * kUk, d50)).epsilon(1e-9));
    CHECK(emm_pdf(e * kUk, d50) * 50.0 * kUk == doctest::Approx(emm_pdf(e / 50.0, d0)).epsilon(1e-9));
  }

  for (double x : {1.0, 17.0, 43.0}) {
    CHECK(emm_pdf((70.0 + x) * kUk, d) == doctest::Approx(emm_pdf((70.0 - x) * kUk, d)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(emm_pdf(10.0 * kUk, d), DomainError);
  CHECK_THROWS_AS(emm_pdf(d.upper(), d), DomainError);
}

TEST_CASE("convolution identities") {
  const EmmDistribution d{80.0 * kUk, 20.0 * kUk};
  CHECK(convolve_rate([](double) { return 3.5; }, d) == 3.5);
  CHECK(convolve_rate([](double e) { return e; }, d) == doctest::Approx(100.0 * kUk).epsilon(1e-12));
  // Second moment of the arcsine law: E0^2 + 2 E0 E_bar + 1.5 E_bar^2.
  const double m2 = convolve_rate([](double e) { return e * e / (kUk * kUk); }, d);
  CHECK(m2 == doctest::Approx(400.0 + 3200.0 + 1.5 * 6400.0).epsilon(1e-12));
  // The weight rescales the argument of the rate.
  const double w = kModel.ion_weight();
  CHECK(convolve_rate([](double e) { return e; }, d, w) == doctest::Approx(w * 100.0 * kUk).epsilon(1e-12));
}

TEST_CASE("convolution agrees with a fine Riemann sum") {
  const EmmDistribution d{300.0 * kUk, 20.0 * kUk};
  auto rate = [](double e) { return toy_rate(e, 1.3, -0.7) * (1.0 + 0.5 * std::sin(e / (40.0 * kUk))); };
  // E = E0 + 2 E_bar sin^2(phi) maps the density to the flat weight 2/pi on [0, pi/2].
  const int n = 1000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double phi = (i + 0.5) * (constants::pi / 2.0) / n;
    sum += rate(d.offset + 2.0 * d.mean_emm * std::sin(phi) * std::sin(phi));
  }
  const double riemann = sum / n;
  CHECK(convolve_rate(rate, d) == doctest::Approx(riemann).epsilon(1e-6));
}

TEST_CASE("thermally averaged rate follows a monotonic rate") {
  double prev = 0.0;
  for (double e_bar : {5.0, 20.0, 80.0, 320.0}) {
    const double k = convolve_rate([](double e) { return toy_rate(e, 2.0, 0.0); }, {e_bar * kUk, 20.0 * kUk});
    CHECK(k > prev);
    prev = k;
  }
}

TEST_CASE("spin-flip probability and chi-square") {
  const double k_l = langevin_rate_coeff(kModel);
  CHECK(spin_flip_probability(k_l, 1.2, k_l) == doctest::Approx(0.699).epsilon(1e-3));
  CHECK(spin_flip_probability(0.0, 1.2, k_l) == 0.0);
  CHECK(chi2({1.0, 2.0}, {0.5, 1.0}, {0.0, 0.0}) == doctest::Approx(4.0 + 4.0));
  CHECK_THROWS_AS(chi2({1.0}, {0.0}, {1.0}), DomainError);
  CHECK_THROWS_AS(chi2({1.0, 2.0}, {1.0}, {1.0}), DomainError);
}

TEST_CASE("noise-free closed loop recovers the scattering lengths") {
  SpinFitOptions opt;
  opt.a_min = -3.0;
  opt.a_max = 3.0;
  opt.a_step = 0.5;
  opt.k_langevin = langevin_rate_coeff(kModel);
  opt.energy_weight = kModel.ion_weight();
  SpinDataset data;
  for (double e : {10.0, 30.0, 60.0, 100.0, 200.0, 400.0, 700.0, 1000.0}) data.mean_emm.push_back(e * kUk);
  data.s.assign(data.mean_emm.size(), 0.0);
  data.sigma.assign(data.mean_emm.size(), 0.02);
  data.s = predict_spin(data, toy_rate, 1.0, -1.5, 1.2, opt);

  const SpinFitResult r = fit_spin(data, toy_rate, opt);
  CHECK(r.a_s == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.a_t == doctest::Approx(-1.5).epsilon(1e-3));
  CHECK(r.n_l == doctest::Approx(1.2).epsilon(1e-3));
  CHECK(r.chi2 < 1e-6);
  CHECK(r.contains(1.0, -1.5));
  CHECK(r.dof == static_cast<int>(data.size()) - 3);
  CHECK_FALSE(r.energy_independent);
  CHECK(r.surface.size() == r.grid.size());
}

TEST_CASE("an energy-independent model cannot identify the scattering lengths") {
  SpinFitOptions opt;
  opt.a_step = 1.0;
  opt.k_langevin = langevin_rate_coeff(kModel);
  SpinDataset data;
  for (double e : {10.0, 30.0, 100.0, 300.0, 1000.0}) data.mean_emm.push_back(e * kUk);
  data.s = {0.3, 0.32, 0.35, 0.37, 0.4};
  data.sigma.assign(5, 0.05);
  const double k = 0.5 * opt.k_langevin;
  try {
    fit_spin(data, [k](double, double, double) { return k; }, opt);
    FAIL("expected a degenerate fit");
  } catch (const DegenerateFitError& e) {
    CHECK(e.result().energy_independent);
    CHECK(e.result().degenerate);
  }
}

TEST_CASE("rate table interpolation and caching") {
  // Values linear in log E and in both scattering lengths are reproduced exactly.
  const std::vector<double> a = {-1.0, 0.0, 1.0};
  const std::vector<double> e = {1.0 * kUk, 3.0 * kUk, 10.0 * kUk, 30.0 * kUk, 100.0 * kUk};
  auto f = [](double en, double as, double at) { return 1e-15 * (5.0 + std::log(en / kUk) + 0.5 * as - 0.25 * at); };
  std::vector<double> v;
  for (double as : a)
    for (double at : a)
      for (double en : e) v.push_back(f(en, as, at));
  const RateTable t(a, e, {0.99, 1.0, 1.01}, v);
  CHECK(t.at(2, 0, 3) == f(e[3], 1.0, -1.0));
  CHECK(t.rate_at_node(17.0 * kUk, 1, 1) == doctest::Approx(f(17.0 * kUk, 0.0, 0.0)).epsilon(1e-12));
  CHECK(t.rate(5.0 * kUk, 0.3, -0.6) == doctest::Approx(f(5.0 * kUk, 0.3, -0.6)).epsilon(1e-12));
  // Clamped outside the energy grid.
  CHECK(t.rate_at_node(0.1 * kUk, 0, 0) == doctest::Approx(f(e.front(), -1.0, -1.0)));
  CHECK(t.nearest(0.4) == 1);
  CHECK_THROWS(t.nearest(5.0));

  const auto path = std::filesystem::temp_directory_path() / "ionbath_test_rate_table.txt";
  t.save(path, "fingerprint-A");
  RateTable u;
  CHECK(u.load(path, "fingerprint-A"));
  CHECK(u.rate(5.0 * kUk, 0.3, -0.6) == t.rate(5.0 * kUk, 0.3, -0.6));
  RateTable w;
  CHECK_FALSE(w.load(path, "fingerprint-B"));
  std::filesystem::remove(path);
  CHECK_FALSE(w.load(path, "fingerprint-A"));

  RateTableSpec spec;
  CHECK(spec.grid().size() == 61);
  CHECK(spec.cache_name(kModel) == spec.cache_name(kModel));
  RateTableSpec other = spec;
  other.energy_points = 8;
  CHECK(spec.cache_name(kModel) != other.cache_name(kModel));
  CHECK(spec.cache_name(kModel).rfind("rate_table_", 0) == 0);
}
