#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "ionbath/core/interaction.hpp"
#include "ionbath/trapdyn/integrator.hpp"
#include "ionbath/trapdyn/trap.hpp"

namespace ionbath::trapdyn {

struct ParticleState {
  Vec3 position = Vec3::Zero();  // m
  Vec3 velocity = Vec3::Zero();  // m/s
};

struct IntegrateOptions {
  double rtol = 1e-10;
  /// Absolute tolerance in internal units (nm for positions, m/s for velocities).
  double atol = 1e-12;
  /// Steps are refined inside this multiple of the potential-minimum radius sqrt(3 C6).
  double close_encounter_factor = 10.0;
  /// Inside the close-encounter region a step moves the pair by at most this fraction of r.
  double close_encounter_step_fraction = 0.02;
  /// Collisions closer than this abort with IntegrationError.
  double r_min_floor = 1e-11;  // m
  /// Maximum step in full_rf mode as a fraction of the RF period.
  double rf_steps_per_period = 20.0;
  long max_steps = 50'000'000;
};

/// Sampled ion trajectory. Times strictly increase.
struct IonTrajectory {
  std::vector<double> t;
  std::vector<Vec3> position;
  std::vector<Vec3> velocity;
  std::vector<double> kinetic;  // J
  std::vector<Vec3> atom_position;  // empty without an atom

  std::size_t size() const { return t.size(); }
};

/// Equations of motion for the ion in the trap and, optionally, one atom coupled
/// through V_ia. Integration runs in internal units (1 nm, 1 ns) so that positions
/// and velocities are O(1) numbers; the observer interface is SI.
class Propagator {
 public:
  Propagator(const TrapParams& trap, const InteractionModel& model, IntegrateOptions options = {});

  const TrapParams& trap() const { return trap_; }
  const InteractionModel& model() const { return model_; }
  const IntegrateOptions& options() const { return options_; }

  /// Propagates ion (and atom, if given) from `t` for `duration` seconds. `observer(t,
  /// ion, atom_or_null)` is called after each accepted step and returns false to stop.
  /// `t` is advanced to the final time. Sample landing times are multiples of
  /// `landing` (s) after the start when positive.
  template <class Observer>
  IntegrationStats propagate(ParticleState& ion, ParticleState* atom, double& t, double duration,
                             Observer&& observer, double landing = 0.0) const;

  /// Total energy of ion + atom in secular_approximation mode (kinetic + pseudopotential
  /// + V_ia), J. Not conserved in full_rf mode.
  double secular_mode_energy(const ParticleState& ion, const ParticleState* atom) const;

 private:
  void ion_accel(double t_ns, const double* x, double* acc) const;
  void pair_rhs(double t_ns, const StateVector<12>& y, StateVector<12>& dy) const;
  void ion_rhs(double t_ns, const StateVector<6>& y, StateVector<6>& dy) const;
  double close_step_cap(const StateVector<12>& y) const;
  StepControl control(bool with_atom) const;

  TrapParams trap_;
  InteractionModel model_;
  IntegrateOptions options_;
  // Precomputed coefficients in internal units.
  double omega_ns_ = 0.0;
  std::array<double, 3> k_static_{};  // per-axis static spring constant (1/ns^2)
  std::array<double, 3> k_rf_{};      // per-axis RF spring amplitude (1/ns^2)
  Vec3 f_stray_ = Vec3::Zero();       // acceleration from the stray field (nm/ns^2)
  Vec3 f_quad_ = Vec3::Zero();        // quadrature acceleration amplitude
  double f_axial_ = 0.0;              // axial RF acceleration amplitude at z = 0
  double axial_null_nm_ = 0.0;
  double force_scale_ = 0.0;          // converts C4 terms to nm/ns^2 for unit masses
  double c6_nm2_ = 0.0;
  double inv_mass_ion_ = 0.0, inv_mass_atom_ = 0.0;
  double r_refine_nm_ = 0.0, r_floor_nm_ = 0.0;
};

/// Integrates and samples the ion trajectory on a uniform grid. In full_rf mode the
/// grid has `rf_steps_per_period` samples per RF period unless `sample_interval` is
/// given; it must not be coarser than that.
IonTrajectory integrate(const ParticleState& ion, const TrapParams& trap, const InteractionModel& model,
                        const std::optional<ParticleState>& atom, double t0, double duration,
                        double sample_interval = 0.0, const IntegrateOptions& options = {});

/// Internal-unit scales.
inline constexpr double kLengthUnit = 1e-9;  // m
inline constexpr double kTimeUnit = 1e-9;    // s
inline constexpr double kVelocityUnit = kLengthUnit / kTimeUnit;

template <class Observer>
IntegrationStats Propagator::propagate(ParticleState& ion, ParticleState* atom, double& t, double duration,
                                       Observer&& observer, double landing) const {
  const double t0_ns = t / kTimeUnit;
  const double t1_ns = (t + duration) / kTimeUnit;
  const double landing_ns = landing / kTimeUnit;
  auto to_si = [](const double* y, ParticleState& p) {
    for (int i = 0; i < 3; ++i) {
      p.position[i] = y[i] * kLengthUnit;
      p.velocity[i] = y[3 + i] * kVelocityUnit;
    }
  };
  IntegrationStats stats;
  double last_t = t;
  if (atom != nullptr) {
    StateVector<12> y;
    for (int i = 0; i < 3; ++i) {
      y[i] = ion.position[i] / kLengthUnit;
      y[3 + i] = ion.velocity[i] / kVelocityUnit;
      y[6 + i] = atom->position[i] / kLengthUnit;
      y[9 + i] = atom->velocity[i] / kVelocityUnit;
    }
    ParticleState ion_si, atom_si;
    auto rhs = [this](double tt, const StateVector<12>& s, StateVector<12>& d) { pair_rhs(tt, s, d); };
    auto cap = [this](double, const StateVector<12>& s) { return close_step_cap(s); };
    auto obs = [&](double tt, const StateVector<12>& s) {
      to_si(s.data(), ion_si);
      to_si(s.data() + 6, atom_si);
      last_t = tt * kTimeUnit;
      return observer(last_t, ion_si, static_cast<const ParticleState*>(&atom_si));
    };
    stats = integrate_dopri5<12>(rhs, cap, obs, y, t0_ns, t1_ns, control(true), landing_ns);
    to_si(y.data(), ion);
    to_si(y.data() + 6, *atom);
  } else {
    StateVector<6> y;
    for (int i = 0; i < 3; ++i) {
      y[i] = ion.position[i] / kLengthUnit;
      y[3 + i] = ion.velocity[i] / kVelocityUnit;
    }
    ParticleState ion_si;
    auto rhs = [this](double tt, const StateVector<6>& s, StateVector<6>& d) { ion_rhs(tt, s, d); };
    auto cap = [](double, const StateVector<6>&) { return HUGE_VAL; };
    auto obs = [&](double tt, const StateVector<6>& s) {
      to_si(s.data(), ion_si);
      last_t = tt * kTimeUnit;
      return observer(last_t, ion_si, static_cast<const ParticleState*>(nullptr));
    };
    stats = integrate_dopri5<6>(rhs, cap, obs, y, t0_ns, t1_ns, control(false), landing_ns);
    to_si(y.data(), ion);
  }
  t = stats.stopped_by_observer ? last_t : t + duration;
  return stats;
}

}  // namespace ionbath::trapdyn
