#include <doctest.h>

#include <cmath>

#include "ionbath/core/budget.hpp"
#include "ionbath/core/config.hpp"
#include "ionbath/core/constants.hpp"
#include "ionbath/core/errors.hpp"
#include "ionbath/core/interaction.hpp"
#include "ionbath/core/least_squares.hpp"
#include "ionbath/core/units.hpp"
#include "ionbath/io/table.hpp"

using namespace ionbath;

namespace {

// Closed-form values recomputed here from CODATA constants, independent of the library.
constexpr double kHbar = 1.054571817e-34;
constexpr double kAmu = 1.66053906660e-27;
constexpr double kBoltzmann = 1.380649e-23;

double uk(double joule) { return joule / kBoltzmann * 1e6; }

}  // namespace

TEST_CASE("interaction model derived scales match their definitions") {
  const InteractionModel m = InteractionModel::li_yb();
  const double mu = m.ion().mass * m.atom().mass / (m.ion().mass + m.atom().mass);
  CHECK(m.reduced_mass() == doctest::Approx(mu).epsilon(1e-12));
  CHECK(m.reduced_mass() / kAmu == doctest::Approx(5.81).epsilon(1e-3));
  const double r4 = std::sqrt(mu * m.c4()) / kHbar;
  CHECK(m.r4() == doctest::Approx(r4).epsilon(1e-12));
  CHECK(m.r4() == doctest::Approx(70e-9).epsilon(0.01));
  const double es = kHbar * kHbar / (2.0 * mu * r4 * r4);
  CHECK(m.s_wave_energy() == doctest::Approx(es).epsilon(1e-12));
  CHECK(uk(es) == doctest::Approx(8.6).epsilon(0.02));
  CHECK(langevin_rate_coeff(m) == doctest::Approx(2.0 * constants::pi * std::sqrt(m.c4() / mu)).epsilon(1e-12));
  CHECK(langevin_rate_coeff(m) == doctest::Approx(4.8e-15).epsilon(0.01));
}

TEST_CASE("one Langevin collision per ten milliseconds at 21e15 per cubic metre") {
  const double rate = langevin_rate_coeff(InteractionModel::li_yb()) * 21e15;
  CHECK(1.0 / rate == doctest::Approx(10e-3).epsilon(0.01));
}

TEST_CASE("quadrupling C4 doubles the Langevin rate") {
  const InteractionModel a = InteractionModel::li_yb();
  const InteractionModel b(a.ion(), a.atom(), 4.0 * a.c4(), a.c6());
  CHECK(langevin_rate_coeff(b) / langevin_rate_coeff(a) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("potential: zero crossing, minimum and attractive tail") {
  const InteractionModel m = InteractionModel::li_yb();
  CHECK(m.zero_crossing() == doctest::Approx(std::sqrt(2.0 * m.c6())).epsilon(1e-12));
  CHECK(m.zero_crossing() == doctest::Approx(1.0e-9).epsilon(1e-9));
  CHECK(m.potential_minimum() == doctest::Approx(std::sqrt(3.0 * m.c6())).epsilon(1e-12));
  CHECK(std::abs(atom_ion_potential(m.zero_crossing(), m)) < 1e-12 * std::abs(atom_ion_potential(1.1e-9, m)));
  CHECK(std::abs(atom_ion_radial_force(m.potential_minimum(), m)) <
        1e-9 * std::abs(atom_ion_radial_force(1.5e-9, m)));
  CHECK(atom_ion_potential(1e-6, m) < 0.0);
  CHECK(atom_ion_potential(1e-3, m) > -1e-30);
  // Exactly one sign change on a fine grid.
  int crossings = 0;
  double prev = atom_ion_potential(0.5e-9, m);
  for (double r = 0.51e-9; r < 100e-9; r += 0.01e-9) {
    const double v = atom_ion_potential(r, m);
    if ((v < 0.0) != (prev < 0.0)) ++crossings;
    prev = v;
  }
  CHECK(crossings == 1);
  CHECK_THROWS_AS(atom_ion_potential(0.0, m), DomainError);
  CHECK_THROWS_AS(atom_ion_potential(-1e-9, m), DomainError);
}

TEST_CASE("collision energy weights and table arithmetic") {
  const InteractionModel m = InteractionModel::li_yb();
  CHECK(m.ion_weight() + m.atom_weight() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.ion_weight() == doctest::Approx(0.0339).epsilon(2e-3));
  const double ei = units::microkelvin_to_joule(193.0), ea = units::microkelvin_to_joule(1.5 * 2.3);
  CHECK(uk(collision_energy(ei, ea, m)) == doctest::Approx(9.9).epsilon(0.005));
  CHECK(collision_energy(0.0, 0.0, m) == 0.0);
  CHECK(uk(collision_energy(units::microkelvin_to_joule(42.0), 0.0, m)) == doctest::Approx(1.4).epsilon(0.03));
  CHECK_THROWS_AS(collision_energy(-1.0, 0.0, m), DomainError);
  // Linearity in both arguments.
  CHECK(collision_energy(2 * ei, 3 * ea, m) ==
        doctest::Approx(2 * collision_energy(ei, 0, m) + 3 * collision_energy(0, ea, m)).epsilon(1e-14));
  CHECK(s_wave_ratio(m.s_wave_energy(), m) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s_wave_ratio(units::microkelvin_to_joule(9.9), m) == doctest::Approx(1.15).epsilon(0.01));
}

TEST_CASE("energy budget totals") {
  const InteractionModel m = InteractionModel::li_yb();
  const BudgetTotals t = budget_total(EnergyBudget::paper_table(), m);
  CHECK(uk(t.ion_kinetic.value) == doctest::Approx(193.0).epsilon(1e-9));
  CHECK(std::lround(uk(t.ion_kinetic.sigma)) == 42);
  CHECK(std::round(uk(t.total_collision.value) * 10) / 10 == doctest::Approx(9.9));
  CHECK(std::round(uk(t.total_collision.sigma) * 10) / 10 == doctest::Approx(2.0));
  CHECK(std::round(t.total_collision.value / m.s_wave_energy() * 100) / 100 == doctest::Approx(1.15));
  // Independent error propagation: radial pair linear, then quadrature with the rest.
  const double ion_sigma = std::hypot(std::hypot(18.0 + 18.0, 18.0), 13.0);
  CHECK(uk(t.ion_kinetic.sigma) == doctest::Approx(ion_sigma).epsilon(1e-9));
  // Fully independent rows: plain quadrature over the row errors, below the default.
  EnergyBudget b = EnergyBudget::paper_table();
  b.correlate_radial_and_intrinsic = false;
  b.linear_ion_atom_combination = false;
  const BudgetTotals ind = budget_total(b, m);
  double ss = 0.0;
  for (const auto& row : ind.rows) ss += row.collision.sigma * row.collision.sigma;
  CHECK(ind.total_collision.sigma == doctest::Approx(std::sqrt(ss)).epsilon(1e-12));
  CHECK(ind.total_collision.sigma < t.total_collision.sigma);

  EnergyBudget zero{};
  const BudgetTotals z = budget_total(zero, m);
  CHECK(z.ion_kinetic.value == 0.0);
  CHECK(z.total_collision.value == 0.0);
  zero.axial_secular.value = -1.0;
  CHECK_THROWS_AS(budget_total(zero, m), DomainError);
}

TEST_CASE("key=value config") {
  const auto cfg = KeyValueConfig::parse("# comment\na = 1.5   # trailing\nb=hello\nflag = true\na = 2\n", "test");
  CHECK(cfg.get_double("a") == 2.0);
  CHECK(cfg.get_string("b") == "hello");
  CHECK(cfg.get_bool("flag", false));
  CHECK(cfg.get_int("missing", 7) == 7);
  CHECK_THROWS_AS(cfg.get_double("b"), ConfigError);
  CHECK_THROWS_AS(cfg.get_string("missing"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse("no equals sign\n"), ConfigError);
  CHECK(cfg.keys().front() == "a");
  const auto round = KeyValueConfig::parse(cfg.to_string());
  CHECK(round.to_string() == cfg.to_string());
}

TEST_CASE("tables: parse, schema errors and deterministic output") {
  const io::Table t = io::parse_table("# c\nx,y\n1,2\n3 4\n", 2, "mem");
  CHECK(t.rows() == 2);
  CHECK(t.column("y")[1] == 4.0);
  CHECK_THROWS_AS(t.column("z"), ConfigError);
  try {
    (void)io::parse_table("x,y\n1,2\n3,oops\n", 2, "mem");
    FAIL("expected a schema error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
  CHECK_THROWS_AS(io::parse_table("x,y\n1\n", 2, "mem"), ConfigError);
  CHECK(io::format_number(0.1) == io::format_number(0.1));
}

TEST_CASE("Levenberg-Marquardt recovers a line exactly") {
  const std::vector<double> x = {0, 1, 2, 3, 4, 5};
  ResidualFunction f = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    for (int i = 0; i < 6; ++i) r[i] = p[0] + p[1] * x[i] - (1.5 + 0.25 * x[i]);
  };
  const auto res = levenberg_marquardt(f, Eigen::Vector2d(0, 0), 6);
  CHECK(res.converged);
  CHECK(res.params[0] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(res.params[1] == doctest::Approx(0.25).epsilon(1e-9));
}
