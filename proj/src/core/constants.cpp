#include "ionbath/core/constants.hpp"
#include "ionbath/core/interaction.hpp"

namespace ionbath {

Species Species::yb171_ion() {
  using namespace constants;
  return {(mass_yb171_u - electron_mass_u) * atomic_mass_unit, elementary_charge, "171Yb+"};
}

Species Species::li6_atom() {
  using namespace constants;
  return {mass_li6_u * atomic_mass_unit, 0.0, "6Li"};
}

}  // namespace ionbath
