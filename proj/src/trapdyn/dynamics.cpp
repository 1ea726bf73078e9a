#include "ionbath/trapdyn/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "ionbath/core/errors.hpp"

namespace ionbath::trapdyn {

namespace {
constexpr double kAccelScale = kTimeUnit * kTimeUnit / kLengthUnit;  // (m/s^2) -> nm/ns^2
}

Propagator::Propagator(const TrapParams& trap, const InteractionModel& model, IntegrateOptions options)
    : trap_(trap), model_(model), options_(options) {
  if (trap_.secular[0] <= 0.0) validate(trap_);
  omega_ns_ = trap_.rf_drive * kTimeUnit;
  const double e_over_m = trap_.ion.charge / trap_.ion.mass;
  if (trap_.mode == TrapMode::secular_approximation) {
    for (int i = 0; i < 3; ++i) {
      const double w = trap_.secular[i] * kTimeUnit;
      k_static_[i] = w * w;
      k_rf_[i] = 0.0;
    }
  } else {
    for (int i = 0; i < 3; ++i) {
      k_static_[i] = 0.25 * omega_ns_ * omega_ns_ * trap_.a[i];
      k_rf_[i] = 0.5 * omega_ns_ * omega_ns_ * trap_.q[i];
    }
    const double quad_field = trap_.ion.mass * trap_.rf_drive * trap_.rf_drive * std::abs(trap_.q[0]) *
                              trap_.electrode_distance * trap_.quadrature_phase / (4.0 * trap_.ion.charge);
    f_quad_ = e_over_m * quad_field * kAccelScale * trap_.quadrature_direction;
    f_axial_ = e_over_m * trap_.axial_rf_amplitude * kAccelScale;
    axial_null_nm_ = trap_.axial_null_offset / kLengthUnit;
  }
  f_stray_ = e_over_m * kAccelScale * trap_.stray_field;

  const double l0 = kLengthUnit;
  force_scale_ = model_.c4() * kTimeUnit * kTimeUnit / std::pow(l0, 6);
  c6_nm2_ = model_.c6() / (l0 * l0);
  inv_mass_ion_ = 1.0 / model_.ion().mass;
  inv_mass_atom_ = 1.0 / model_.atom().mass;
  r_refine_nm_ = options_.close_encounter_factor * model_.potential_minimum() / l0;
  r_floor_nm_ = options_.r_min_floor / l0;
}

void Propagator::ion_accel(double t_ns, const double* x, double* acc) const {
  if (trap_.mode == TrapMode::secular_approximation) {
    for (int i = 0; i < 3; ++i) acc[i] = -k_static_[i] * x[i] + f_stray_[i];
    return;
  }
  const double phase = omega_ns_ * t_ns;
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  for (int i = 0; i < 3; ++i) acc[i] = -(k_static_[i] - k_rf_[i] * c) * x[i] + f_stray_[i] + f_quad_[i] * s;
  if (f_axial_ != 0.0) acc[2] += f_axial_ * (axial_null_nm_ - x[2]) / axial_null_nm_ * c;
}

void Propagator::ion_rhs(double t_ns, const StateVector<6>& y, StateVector<6>& dy) const {
  dy[0] = y[3];
  dy[1] = y[4];
  dy[2] = y[5];
  ion_accel(t_ns, y.data(), dy.data() + 3);
}

void Propagator::pair_rhs(double t_ns, const StateVector<12>& y, StateVector<12>& dy) const {
  for (int i = 0; i < 3; ++i) {
    dy[i] = y[3 + i];
    dy[6 + i] = y[9 + i];
  }
  ion_accel(t_ns, y.data(), dy.data() + 3);
  const double dx = y[6] - y[0], dyy = y[7] - y[1], dz = y[8] - y[2];
  const double r2 = dx * dx + dyy * dyy + dz * dz;
  const double inv_r2 = 1.0 / r2;
  const double inv_r6 = inv_r2 * inv_r2 * inv_r2;
  // Radial force over r: C4 (-2/r^6 + 6 C6/r^8).
  const double f_over_r = force_scale_ * inv_r6 * (-2.0 + 6.0 * c6_nm2_ * inv_r2);
  const double fa = f_over_r * inv_mass_atom_;
  const double fi = f_over_r * inv_mass_ion_;
  dy[9] = fa * dx;
  dy[10] = fa * dyy;
  dy[11] = fa * dz;
  dy[3] -= fi * dx;
  dy[4] -= fi * dyy;
  dy[5] -= fi * dz;
}

double Propagator::close_step_cap(const StateVector<12>& y) const {
  const double dx = y[6] - y[0], dyy = y[7] - y[1], dz = y[8] - y[2];
  const double r = std::sqrt(dx * dx + dyy * dyy + dz * dz);
  if (r < r_floor_nm_) {
    throw IntegrationError("atom-ion distance " + std::to_string(r * kLengthUnit) +
                           " m fell below the hard floor");
  }
  if (r >= r_refine_nm_) return HUGE_VAL;
  const double vx = y[9] - y[3], vy = y[10] - y[4], vz = y[11] - y[5];
  const double v = std::sqrt(vx * vx + vy * vy + vz * vz);
  return options_.close_encounter_step_fraction * r / std::max(v, 1e-12);
}

StepControl Propagator::control(bool /*with_atom*/) const {
  StepControl ctl;
  ctl.rtol = options_.rtol;
  ctl.atol = options_.atol;
  ctl.max_steps = options_.max_steps;
  if (trap_.mode == TrapMode::full_rf) {
    ctl.h_max = trap_.rf_period() / options_.rf_steps_per_period / kTimeUnit;
  } else {
    const double wmax = *std::max_element(trap_.secular.begin(), trap_.secular.end());
    ctl.h_max = constants::two_pi / wmax / options_.rf_steps_per_period / kTimeUnit;
  }
  ctl.h_initial = ctl.h_max;
  ctl.h_min = 1e-14;
  return ctl;
}

double Propagator::secular_mode_energy(const ParticleState& ion, const ParticleState* atom) const {
  const Vec3 eq = trap_.equilibrium();
  const double m = trap_.ion.mass;
  double e = 0.5 * m * ion.velocity.squaredNorm();
  for (int i = 0; i < 3; ++i) {
    const double d = ion.position[i] - eq[i];
    e += 0.5 * m * trap_.secular[i] * trap_.secular[i] * d * d;
  }
  if (atom != nullptr) {
    e += 0.5 * model_.atom().mass * atom->velocity.squaredNorm();
    e += atom_ion_potential((atom->position - ion.position).norm(), model_);
  }
  return e;
}

IonTrajectory integrate(const ParticleState& ion, const TrapParams& trap, const InteractionModel& model,
                        const std::optional<ParticleState>& atom, double t0, double duration,
                        double sample_interval, const IntegrateOptions& options) {
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(ion.position[i]) || !std::isfinite(ion.velocity[i])) {
      throw DomainError("integrate: non-finite ion state");
    }
  }
  if (!(duration > 0.0)) throw DomainError("integrate: duration must be positive");

  Propagator prop(trap, model, options);
  const TrapParams& tp = prop.trap();
  double max_interval = 0.0;
  if (tp.mode == TrapMode::full_rf) {
    max_interval = tp.rf_period() / options.rf_steps_per_period;
  } else {
    const double wmax = *std::max_element(tp.secular.begin(), tp.secular.end());
    max_interval = constants::two_pi / wmax / options.rf_steps_per_period;
  }
  if (sample_interval <= 0.0) sample_interval = max_interval;
  if (tp.mode == TrapMode::full_rf && sample_interval > max_interval * (1.0 + 1e-12)) {
    throw DomainError("integrate: full_rf sampling must be at least 20 samples per RF period");
  }

  IonTrajectory traj;
  const double m = tp.ion.mass;
  auto record = [&](double t, const ParticleState& s, const ParticleState* a) {
    traj.t.push_back(t);
    traj.position.push_back(s.position);
    traj.velocity.push_back(s.velocity);
    traj.kinetic.push_back(0.5 * m * s.velocity.squaredNorm());
    if (a != nullptr) traj.atom_position.push_back(a->position);
  };

  ParticleState ion_state = ion;
  std::optional<ParticleState> atom_state = atom;
  record(t0, ion_state, atom_state ? &*atom_state : nullptr);
  long next_index = 1;
  auto observer = [&](double t, const ParticleState& s, const ParticleState* a) {
    const double target = t0 + static_cast<double>(next_index) * sample_interval;
    if (std::abs(t - target) <= 1e-9 * sample_interval) {
      record(target, s, a);
      ++next_index;
    }
    return true;
  };
  double t = t0;
  prop.propagate(ion_state, atom_state ? &*atom_state : nullptr, t, duration, observer, sample_interval);
  return traj;
}

}  // namespace ionbath::trapdyn
