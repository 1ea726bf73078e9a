#pragma once

#include <string>

#include "ionbath/core/constants.hpp"

namespace ionbath {

struct Species {
  double mass = 0.0;    // kg
  double charge = 0.0;  // C, +e for the ion, 0 for the neutral
  std::string label;

  static Species yb171_ion();
  static Species li6_atom();
};

/// One ion + one neutral interacting through V(r) = C4 (-1/(2 r^4) + C6 / r^6).
///
/// C6 is kept in the m^2 form used by the MD potential, so C4*C6 is the
/// coefficient of the repulsive r^-6 core. Derived quantities are cached on
/// construction; the object is immutable afterwards.
class InteractionModel {
 public:
  InteractionModel(Species ion, Species atom, double c4, double c6);

  /// 6Li / 171Yb+ with the default C4 and C6.
  static InteractionModel li_yb();

  const Species& ion() const { return ion_; }
  const Species& atom() const { return atom_; }
  double c4() const { return c4_; }
  double c6() const { return c6_; }
  double reduced_mass() const { return mu_; }
  /// R4 = sqrt(mu C4) / hbar.
  double r4() const { return r4_; }
  /// E_s = hbar^2 / (2 mu R4^2), the height of the l = 1 barrier scale.
  double s_wave_energy() const { return e_s_; }

  /// Weights mu/m_i and mu/m_a of the collision-energy formula; they sum to one.
  double ion_weight() const { return mu_ / ion_.mass; }
  double atom_weight() const { return mu_ / atom_.mass; }

  /// Position of the repulsive zero crossing, sqrt(2 C6).
  double zero_crossing() const;
  /// Position of the potential minimum, sqrt(3 C6).
  double potential_minimum() const;

 private:
  Species ion_;
  Species atom_;
  double c4_;
  double c6_;
  double mu_;
  double r4_;
  double e_s_;
};

/// V_ia(r) in J. Throws DomainError for r <= 0.
double atom_ion_potential(double r, const InteractionModel& model);

/// -dV/dr, the radial force magnitude (positive = repulsive). Throws for r <= 0.
double atom_ion_radial_force(double r, const InteractionModel& model);

/// Langevin capture rate coefficient K_L = 2 pi sqrt(C4 / mu), in m^3/s.
double langevin_rate_coeff(const InteractionModel& model);

/// E_col = (mu/m_i) E_ion + (mu/m_a) E_atom. Throws DomainError on negative input.
double collision_energy(double e_ion, double e_atom, const InteractionModel& model);

/// E_col / E_s.
double s_wave_ratio(double e_col, const InteractionModel& model);

}  // namespace ionbath
