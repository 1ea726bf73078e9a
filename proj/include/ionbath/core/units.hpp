#pragma once

#include "ionbath/core/constants.hpp"

// Conversion helpers for the I/O boundary. Everything inside the library is SI.
namespace ionbath::units {

constexpr double microkelvin_to_joule(double t_uk) { return t_uk * 1e-6 * constants::boltzmann; }
constexpr double joule_to_microkelvin(double e) { return e / constants::boltzmann * 1e6; }
constexpr double kelvin_to_joule(double t) { return t * constants::boltzmann; }
constexpr double joule_to_kelvin(double e) { return e / constants::boltzmann; }

// Linear frequency in kHz to angular frequency in rad/s, and back.
constexpr double khz_to_angular(double f_khz) { return constants::two_pi * f_khz * 1e3; }
constexpr double angular_to_khz(double w) { return w / (constants::two_pi * 1e3); }
constexpr double mhz_to_angular(double f_mhz) { return constants::two_pi * f_mhz * 1e6; }

constexpr double millivolt_per_meter(double e_mvm) { return e_mvm * 1e-3; }
constexpr double microkelvin_per_second(double r) { return r * 1e-6; }  // -> K/s

}  // namespace ionbath::units
