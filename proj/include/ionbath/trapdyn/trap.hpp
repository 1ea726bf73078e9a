#pragma once

#include <array>

#include <Eigen/Dense>

#include "ionbath/core/config.hpp"
#include "ionbath/core/interaction.hpp"

namespace ionbath::trapdyn {

using Vec3 = Eigen::Vector3d;

enum class TrapMode { full_rf, secular_approximation };

/// Linear Paul trap in Mathieu form plus the excess-micromotion sources.
///
/// Ion equation of motion per axis i in full_rf mode:
///   x_i'' = -(Omega^2/4) (a_i - 2 q_i cos(Omega t)) x_i + (e/m) E_extra,i(x, t)
/// with E_extra the stray field, the quadrature field and the axial RF residual.
/// Use `make_trap` to build a validated instance; it caches the exact secular
/// frequencies used by the pseudopotential.
struct TrapParams {
  Species ion = Species::yb171_ion();
  double rf_drive = 0.0;  // Omega_rf, rad/s
  std::array<double, 3> a{};
  std::array<double, 3> q{};
  Vec3 stray_field = Vec3::Zero();  // V/m
  /// RF phase imbalance between opposing electrodes and the electrode distance R;
  /// together they set a uniform field (m Omega^2 q R phi / (4e)) sin(Omega t).
  double quadrature_phase = 0.0;        // rad
  double electrode_distance = 0.5e-3;   // m
  Vec3 quadrature_direction = Vec3(1.0, 1.0, 0.0).normalized();
  /// Axial RF field, amplitude at the trap centre, vanishing at z = axial_null_offset.
  double axial_rf_amplitude = 0.0;    // V/m
  double axial_null_offset = 100e-6;  // m
  TrapMode mode = TrapMode::full_rf;

  /// Exact (Floquet) secular frequencies, rad/s; filled by make_trap.
  std::array<double, 3> secular{};

  double rf_period() const;
  double radial_q() const { return q[0]; }
  /// Pseudopotential equilibrium shifted by the stray field.
  Vec3 equilibrium() const;
};

/// Solves for (a, q) reproducing the requested secular frequencies exactly
/// (Floquet analysis, a_x + a_y + a_z = 0, q_y = -q_x, q_z = 0) and validates.
TrapParams make_trap(double rf_drive, double omega_x, double omega_y, double omega_z,
                     TrapMode mode = TrapMode::full_rf, Species ion = Species::yb171_ion());

/// The trap used for the cooling measurements: Omega = 2pi x 1.85 MHz, 330/330/130 kHz.
TrapParams paper_trap(TrapMode mode = TrapMode::full_rf);

/// Fills `secular` from (a, q) and throws ConfigError when unstable, when q >= 0.9
/// or when Omega <= 2 max(omega).
void validate(TrapParams& params);

/// Electric field at `pos` and time `t`, V/m. In secular_approximation mode this is
/// the static pseudopotential field (including the stray field).
Vec3 trap_field(const Vec3& pos, double t, const TrapParams& params);

/// Lowest-order Mathieu estimate (Omega/2) sqrt(a + q^2/2) per axis.
std::array<double, 3> lowest_order_frequencies(const TrapParams& params);

/// Secular frequencies, rad/s: lowest-order estimate refined by integrating one RF
/// period of the Mathieu equation (Floquet characteristic exponent).
std::array<double, 3> secular_frequencies(const TrapParams& params);

/// Floquet characteristic exponent beta of x'' + (a - 2q cos 2 tau) x = 0 (first
/// stability zone); throws DomainError when unstable.
double mathieu_beta(double a, double q);

/// Excess-micromotion energy scales of the configured trap, J (lowest-order formulas).
double stray_field_mm_energy(const TrapParams& params);
double quadrature_mm_energy(const TrapParams& params);
double axial_mm_energy(const TrapParams& params);

/// Set quadrature phase / axial amplitude so that the corresponding mean excess
/// micromotion energy equals `energy` (J).
void set_quadrature_energy(TrapParams& params, double energy);
void set_axial_energy(TrapParams& params, double energy);
/// Stray field along `direction` whose micromotion energy equals `energy`.
void set_stray_field_energy(TrapParams& params, const Vec3& direction, double energy);

/// Ion state at t = 0 (RF phase zero) whose micromotion-averaged motion is the
/// secular oscillation with displacement `secular_offset` from the equilibrium and
/// velocity `secular_velocity`. In full_rf mode the exact Floquet solution of each axis
/// is used, including the periodic orbit driven by the stray, quadrature and axial RF
/// fields; in secular_approximation mode the state is equilibrium + offset.
struct OrbitState {
  Vec3 position;
  Vec3 velocity;
};
OrbitState orbit_state(const TrapParams& params, const Vec3& secular_offset, const Vec3& secular_velocity);

/// Reads trap.* keys (frequencies in kHz/MHz, fields in mV/m, energies in uK).
TrapParams trap_from_config(const KeyValueConfig& cfg, TrapMode mode);

}  // namespace ionbath::trapdyn
