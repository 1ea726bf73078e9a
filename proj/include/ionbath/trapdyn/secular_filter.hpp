#pragma once

#include <span>
#include <vector>

#include "ionbath/trapdyn/dynamics.hpp"

namespace ionbath::trapdyn {

/// Zero-phase windowed-sinc (Blackman) low-pass FIR with unit DC gain.
class LowPassFilter {
 public:
  /// `cutoff` in Hz, `sample_interval` in s, `half_width` taps on each side of centre.
  LowPassFilter(double sample_interval, double cutoff, int half_width);

  int half_width() const { return half_width_; }
  const std::vector<double>& taps() const { return taps_; }

  /// Filtered value at `center`; requires half_width samples on both sides.
  double at(std::span<const double> samples, std::size_t center) const;

  /// Gain at frequency f (Hz).
  double response(double f) const;

 private:
  double dt_;
  int half_width_;
  std::vector<double> taps_;
};

/// Filter matching a trap: cutoff Omega_rf / 2, support `support_periods` RF periods.
LowPassFilter secular_filter_for(const TrapParams& trap, double sample_interval, double support_periods = 12.0);

struct SecularEnergySeries {
  std::vector<double> t;
  std::vector<double> radial;  // x + y modes, J
  std::vector<double> axial;   // z mode, J
  std::vector<double> total;   // J
};

/// Secular energy (kinetic + pseudopotential) per sample with micromotion removed by
/// a zero-phase low-pass at Omega_rf/2 applied to positions and velocities. Only
/// samples with full filter support are returned. For secular_approximation
/// trajectories the energy is evaluated directly.
/// Throws DomainError for non-uniform or undersampled (< 20 / RF period) input.
SecularEnergySeries secular_energy(const IonTrajectory& traj, const TrapParams& trap,
                                   double support_periods = 12.0);

/// Secular energy of one ion state in the pseudopotential picture, split (radial, axial).
std::pair<double, double> pseudopotential_energy(const Vec3& position, const Vec3& velocity,
                                                 const TrapParams& trap);

}  // namespace ionbath::trapdyn
