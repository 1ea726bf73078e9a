#include "ionbath/trapdyn/secular_filter.hpp"

#include <cmath>

#include "ionbath/core/errors.hpp"

namespace ionbath::trapdyn {

LowPassFilter::LowPassFilter(double sample_interval, double cutoff, int half_width)
    : dt_(sample_interval), half_width_(half_width) {
  if (!(sample_interval > 0.0) || !(cutoff > 0.0) || half_width < 1) {
    throw DomainError("LowPassFilter: invalid parameters");
  }
  const double fc = cutoff * sample_interval;  // cycles per sample
  if (!(fc < 0.5)) throw DomainError("LowPassFilter: cutoff above Nyquist");
  const int n = 2 * half_width + 1;
  taps_.resize(n);
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const int m = k - half_width;
    const double sinc = m == 0 ? 2.0 * fc : std::sin(constants::two_pi * fc * m) / (constants::pi * m);
    const double x = static_cast<double>(k) / (n - 1);
    const double window = 0.42 - 0.5 * std::cos(constants::two_pi * x) + 0.08 * std::cos(2.0 * constants::two_pi * x);
    taps_[k] = sinc * window;
    sum += taps_[k];
  }
  for (double& t : taps_) t /= sum;
}

double LowPassFilter::at(std::span<const double> samples, std::size_t center) const {
  if (center < static_cast<std::size_t>(half_width_) || center + half_width_ >= samples.size()) {
    throw DomainError("LowPassFilter: insufficient support around sample");
  }
  double acc = 0.0;
  const std::size_t start = center - half_width_;
  for (std::size_t k = 0; k < taps_.size(); ++k) acc += taps_[k] * samples[start + k];
  return acc;
}

double LowPassFilter::response(double f) const {
  double acc = 0.0;
  for (int k = 0; k < static_cast<int>(taps_.size()); ++k) {
    acc += taps_[k] * std::cos(constants::two_pi * f * dt_ * (k - half_width_));
  }
  return acc;
}

LowPassFilter secular_filter_for(const TrapParams& trap, double sample_interval, double support_periods) {
  const double cutoff = trap.rf_drive / constants::two_pi / 2.0;
  const int half = static_cast<int>(std::ceil(0.5 * support_periods * trap.rf_period() / sample_interval));
  return LowPassFilter(sample_interval, cutoff, half);
}

std::pair<double, double> pseudopotential_energy(const Vec3& position, const Vec3& velocity,
                                                 const TrapParams& trap) {
  const Vec3 eq = trap.equilibrium();
  const double m = trap.ion.mass;
  std::array<double, 3> e{};
  for (int i = 0; i < 3; ++i) {
    const double d = position[i] - eq[i];
    e[i] = 0.5 * m * (velocity[i] * velocity[i] + trap.secular[i] * trap.secular[i] * d * d);
  }
  return {e[0] + e[1], e[2]};
}

SecularEnergySeries secular_energy(const IonTrajectory& traj, const TrapParams& trap, double support_periods) {
  SecularEnergySeries out;
  const std::size_t n = traj.size();
  if (trap.mode == TrapMode::secular_approximation) {
    for (std::size_t k = 0; k < n; ++k) {
      auto [rad, ax] = pseudopotential_energy(traj.position[k], traj.velocity[k], trap);
      out.t.push_back(traj.t[k]);
      out.radial.push_back(rad);
      out.axial.push_back(ax);
      out.total.push_back(rad + ax);
    }
    return out;
  }
  if (n < 3) throw DomainError("secular_energy: trajectory too short");
  const double dt = traj.t[1] - traj.t[0];
  for (std::size_t k = 1; k < n; ++k) {
    if (std::abs((traj.t[k] - traj.t[k - 1]) - dt) > 1e-6 * dt) {
      throw DomainError("secular_energy: trajectory must be uniformly sampled");
    }
  }
  if (dt > trap.rf_period() / 20.0 * (1.0 + 1e-9)) {
    throw DomainError("secular_energy: undersampled trajectory (need >= 20 samples per RF period)");
  }
  const LowPassFilter filter = secular_filter_for(trap, dt, support_periods);
  const std::size_t hw = filter.half_width();
  if (n < 2 * hw + 1) throw DomainError("secular_energy: trajectory shorter than the filter support");

  std::array<std::vector<double>, 6> comp;
  for (auto& c : comp) c.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (int i = 0; i < 3; ++i) {
      comp[i][k] = traj.position[k][i];
      comp[3 + i][k] = traj.velocity[k][i];
    }
  }
  for (std::size_t k = hw; k + hw < n; ++k) {
    Vec3 x, v;
    for (int i = 0; i < 3; ++i) {
      x[i] = filter.at(comp[i], k);
      v[i] = filter.at(comp[3 + i], k);
    }
    auto [rad, ax] = pseudopotential_energy(x, v, trap);
    out.t.push_back(traj.t[k]);
    out.radial.push_back(rad);
    out.axial.push_back(ax);
    out.total.push_back(rad + ax);
  }
  return out;
}

}  // namespace ionbath::trapdyn
