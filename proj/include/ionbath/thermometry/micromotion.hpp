#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ionbath/core/interaction.hpp"
#include "ionbath/core/measured.hpp"

namespace ionbath::thermometry {

/// Modulation index solving J0(beta)/J1(beta) = Omega_car/Omega_MM on (0, 1.8412).
/// With laser powers, each Rabi frequency is first divided by sqrt(power).
/// Throws DomainError when the ratio has no root on that branch.
double beta_from_ratio(double omega_carrier, double omega_sideband, std::optional<double> power_carrier = {},
                       std::optional<double> power_sideband = {});

/// Mean excess micromotion energy (m/4) (beta Omega_rf / k)^2, J.
double emm_from_beta(double beta, double k_projection, double rf_drive, const Species& ion = Species::yb171_ion());

/// Mean excess micromotion energy of a stray field, E_DC^2 e^2 / (2 m omega^2), J.
double emm_from_dc_field(double field, double omega_rad, const Species& ion = Species::yb171_ion());

/// Quadrature micromotion scales with the square of the radial frequency.
double scale_quadrature(double energy, double omega1, double omega2);
Measured scale_quadrature(const Measured& energy, double omega1, double omega2);

/// One row of the excess-micromotion budget (energies in J).
struct MMEntry {
  std::string name;
  Measured energy;
  int multiplicity = 1;  // e.g. 2 for the two quadrature modes
  bool upper_bound = false;

  Measured contribution() const { return energy.scaled(multiplicity); }
};

struct MMBudget {
  double omega_rad = 0.0;  // rad/s
  std::vector<MMEntry> entries;
  /// Sum of all rows with errors in quadrature; bounds carry no error.
  Measured total() const;
};

/// Totals of the given rows. Throws DomainError for negative entries.
MMBudget mm_budget(double omega_rad, std::vector<MMEntry> entries);

/// Which value to use for the horizontal stray-field bound at 330 kHz.
enum class HorizontalBound { table, text };

/// Budget at 330 kHz from the measured values: axial 33(33), quadrature 2 x 21.5(1.5),
/// vertical <= 3.4, horizontal <= 1.9 from the 50 mV/m bound (text, default) or the 2.1
/// listed in the tabulated budget (table).
MMBudget paper_budget_330(HorizontalBound horizontal = HorizontalBound::text);

/// Budget at 210 kHz derived from the 330 kHz measurements: axial and quadrature scaled
/// by (210/330)^2, vertical from the 208 uK/V^2 calibration at V_comp = 0.2 V and
/// horizontal from the 50 mV/m stray-field bound.
MMBudget paper_budget_210();

/// Calibration of micromotion energy per squared compensation voltage, J/V^2, at the
/// modulation index measured with V_comp.
double emm_per_volt_squared(double beta, double v_comp, double k_projection, double rf_drive,
                            const Species& ion = Species::yb171_ion());

}  // namespace ionbath::thermometry
