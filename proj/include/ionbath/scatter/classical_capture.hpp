#pragma once

#include "ionbath/core/interaction.hpp"

namespace ionbath::scatter {

struct CaptureResult {
  double energy = 0.0;         // J
  double b_critical = 0.0;     // m
  double cross_section = 0.0;  // m^2
  double rate = 0.0;           // sigma v, m^3/s
  int trajectories = 0;
};

/// Default capture radius: ten times the potential minimum sqrt(3 C6), well inside the
/// centrifugal barrier at the energies of interest.
double default_capture_radius(const InteractionModel& model);

/// Integrates one classical relative trajectory with impact parameter b (m) at collision
/// energy E (J) and reports whether it reaches the capture radius.
bool classical_trajectory_captured(const InteractionModel& model, double energy, double b,
                                   double capture_radius = 0.0);

/// Critical impact parameter by bisection over classical trajectories in the full
/// ion-atom potential, and the resulting capture rate coefficient sigma v.
/// Throws DomainError when the capture radius lies outside the centrifugal barrier.
CaptureResult classical_capture(const InteractionModel& model, double energy, double capture_radius = 0.0,
                                double relative_tolerance = 1e-7);

}  // namespace ionbath::scatter
