#include "ionbath/core/budget.hpp"

#include "ionbath/core/errors.hpp"
#include "ionbath/core/units.hpp"

namespace ionbath {

namespace {

Measured uk(double value, double sigma) {
  return {units::microkelvin_to_joule(value), units::microkelvin_to_joule(sigma)};
}

void check_row(const Measured& m, const char* name) {
  if (m.value < 0.0 || m.sigma < 0.0) {
    throw DomainError(std::string("energy budget row '") + name + "' must be non-negative");
  }
}

}  // namespace

EnergyBudget EnergyBudget::paper_table() {
  EnergyBudget b;
  b.radial_secular = uk(2 * 21.0, 2 * 9.0);
  b.intrinsic_mm = uk(2 * 21.0, 2 * 9.0);
  b.axial_secular = uk(65.0, 18.0);
  b.excess_mm = uk(44.0, 13.0);
  b.atom_thermal = uk(1.5 * 2.3, 1.5 * 0.4);
  return b;
}

BudgetTotals budget_total(const EnergyBudget& budget, const InteractionModel& model) {
  check_row(budget.radial_secular, "radial secular");
  check_row(budget.intrinsic_mm, "intrinsic micromotion");
  check_row(budget.axial_secular, "axial secular");
  check_row(budget.excess_mm, "excess micromotion");
  check_row(budget.atom_thermal, "atom thermal");

  const double wi = model.ion_weight();
  const double wa = model.atom_weight();

  BudgetTotals out;
  out.rows = {
      {"radial_secular", budget.radial_secular, budget.radial_secular.scaled(wi)},
      {"intrinsic_mm", budget.intrinsic_mm, budget.intrinsic_mm.scaled(wi)},
      {"axial_secular", budget.axial_secular, budget.axial_secular.scaled(wi)},
      {"excess_mm", budget.excess_mm, budget.excess_mm.scaled(wi)},
      {"atom_thermal", budget.atom_thermal, budget.atom_thermal.scaled(wa)},
  };

  const Measured radial = budget.correlate_radial_and_intrinsic
                              ? add_linear(budget.radial_secular, budget.intrinsic_mm)
                              : add_quadrature(budget.radial_secular, budget.intrinsic_mm);
  out.ion_kinetic = add_quadrature(add_quadrature(radial, budget.axial_secular), budget.excess_mm);
  out.ion_collision = out.ion_kinetic.scaled(wi);
  out.atom_collision = budget.atom_thermal.scaled(wa);
  out.total_collision = budget.linear_ion_atom_combination
                            ? add_linear(out.ion_collision, out.atom_collision)
                            : add_quadrature(out.ion_collision, out.atom_collision);
  return out;
}

}  // namespace ionbath
