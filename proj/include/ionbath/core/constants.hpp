#pragma once

// CODATA 2018 exact/recommended values, SI units throughout.

namespace ionbath::constants {

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double boltzmann = 1.380649e-23;         // J/K
inline constexpr double planck = 6.62607015e-34;          // J s
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
inline constexpr double electron_mass_u = 5.48579909065e-4;   // u
inline constexpr double bohr_magneton = 9.2740100783e-24;     // J/T

// Isotope masses (neutral atoms), in u.
inline constexpr double mass_li6_u = 6.0151228874;
inline constexpr double mass_yb171_u = 170.9363258;

// C4 for 6Li / 171Yb+, in J m^4, for V(r) = -C4 / (2 r^4).
inline constexpr double c4_li_yb = 5.607e-57;
// Short-range repulsion coefficient (m^2) in V(r) = C4 (-1/(2r^4) + C6/r^6).
inline constexpr double c6_li_yb = 5e-19;

// Wavelength of the S1/2 -> D5/2 quadrupole transition in Yb+.
inline constexpr double yb_411_wavelength = 411e-9;  // m

}  // namespace ionbath::constants
