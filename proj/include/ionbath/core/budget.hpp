#pragma once

#include <string>
#include <vector>

#include "ionbath/core/interaction.hpp"
#include "ionbath/core/measured.hpp"

namespace ionbath {

/// Kinetic-energy budget of the trapped ion plus the atoms' mean kinetic energy. All in J.
///
/// The radial secular row and the intrinsic micromotion row derive from the same
/// radial temperature measurement (E_iMM ~ k_B T_sec), so by default their errors
/// add linearly before entering the quadrature sum with the other rows.
struct EnergyBudget {
  Measured radial_secular;  // both radial modes
  Measured intrinsic_mm;
  Measured axial_secular;
  Measured excess_mm;
  Measured atom_thermal;    // 3/2 k_B T_a

  bool correlate_radial_and_intrinsic = true;
  /// Ion and atom collision-energy errors combine linearly (conservative) or in quadrature.
  bool linear_ion_atom_combination = true;

  /// The measured budget at 210 kHz radial confinement after 1 s of cooling.
  static EnergyBudget paper_table();
};

struct BudgetRow {
  std::string label;
  Measured kinetic;
  Measured collision;
};

struct BudgetTotals {
  std::vector<BudgetRow> rows;  // four ion rows followed by the atom row
  Measured ion_kinetic;
  Measured ion_collision;
  Measured atom_collision;
  Measured total_collision;
};

BudgetTotals budget_total(const EnergyBudget& budget, const InteractionModel& model);

}  // namespace ionbath
