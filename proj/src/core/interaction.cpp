#include "ionbath/core/interaction.hpp"

#include <cmath>
#include <utility>

#include "ionbath/core/errors.hpp"

namespace ionbath {

InteractionModel::InteractionModel(Species ion, Species atom, double c4, double c6)
    : ion_(std::move(ion)), atom_(std::move(atom)), c4_(c4), c6_(c6) {
  if (!(ion_.mass > 0.0) || !(atom_.mass > 0.0)) {
    throw ConfigError("species masses must be positive");
  }
  if (!(c4_ > 0.0) || !(c6_ > 0.0)) {
    throw ConfigError("interaction requires C4 > 0 and C6 > 0");
  }
  mu_ = ion_.mass * atom_.mass / (ion_.mass + atom_.mass);
  r4_ = std::sqrt(mu_ * c4_) / constants::hbar;
  e_s_ = constants::hbar * constants::hbar / (2.0 * mu_ * r4_ * r4_);
}

InteractionModel InteractionModel::li_yb() {
  return {Species::yb171_ion(), Species::li6_atom(), constants::c4_li_yb, constants::c6_li_yb};
}

double InteractionModel::zero_crossing() const { return std::sqrt(2.0 * c6_); }
double InteractionModel::potential_minimum() const { return std::sqrt(3.0 * c6_); }

double atom_ion_potential(double r, const InteractionModel& model) {
  if (!(r > 0.0)) throw DomainError("atom_ion_potential: r must be positive");
  const double r2 = r * r;
  const double r4 = r2 * r2;
  return model.c4() * (-0.5 / r4 + model.c6() / (r4 * r2));
}

double atom_ion_radial_force(double r, const InteractionModel& model) {
  if (!(r > 0.0)) throw DomainError("atom_ion_radial_force: r must be positive");
  const double r2 = r * r;
  const double r5 = r2 * r2 * r;
  // -dV/dr = C4 (-2/r^5 + 6 C6 / r^7)
  return model.c4() * (-2.0 / r5 + 6.0 * model.c6() / (r5 * r2));
}

double langevin_rate_coeff(const InteractionModel& model) {
  return constants::two_pi * std::sqrt(model.c4() / model.reduced_mass());
}

double collision_energy(double e_ion, double e_atom, const InteractionModel& model) {
  if (e_ion < 0.0 || e_atom < 0.0) throw DomainError("collision_energy: energies must be >= 0");
  return model.ion_weight() * e_ion + model.atom_weight() * e_atom;
}

double s_wave_ratio(double e_col, const InteractionModel& model) {
  if (e_col < 0.0) throw DomainError("s_wave_ratio: energy must be >= 0");
  return e_col / model.s_wave_energy();
}

}  // namespace ionbath
