#pragma once

#include "ionbath/scatter/channel_model.hpp"

namespace ionbath::scatter {

struct NumerovOptions {
  /// Base step: local wavelength / steps_per_wavelength.
  double steps_per_wavelength = 40.0;
  /// Steps never exceed this fraction of x (resolves the potential where E ~ 0).
  double max_relative_step = 0.05;
  /// Start where the WKB decay integral into the core reaches this value.
  double wkb_decay = 27.0;
  /// Reduced start / matching radii; 0 selects them automatically.
  double x_start = 0.0;
  double x_match = 0.0;
  bool step_doubling = true;
  long max_steps = 20'000'000;
};

/// Log-derivative-like output of the propagation: the wavefunction ratio
/// Q = psi(x_b) psi(x_a)^-1 between the last two grid points.
struct Propagation {
  ChannelMatrix ratio;
  double x_a = 0.0;
  double x_b = 0.0;
  long steps = 0;
  int doublings = 0;
  /// Nodes of the single-channel solution (bound states below the energy).
  int nodes = 0;
};

/// Automatic matching radius: beyond r_cut and where x^-4 < 1e-6 |eps| (bounded below by 50).
double default_match_radius(const ChannelModel& model, double eps, int l);

/// Outward renormalized Numerov propagation (Johnson) of u'' = W(x) u from deep inside
/// the repulsive core (or the hard wall) to the matching radius, with step doubling.
/// Throws NumericalError naming the radius when a step matrix is singular.
Propagation numerov_propagate(const ChannelModel& model, double eps, int l, const NumerovOptions& options = {});

}  // namespace ionbath::scatter
