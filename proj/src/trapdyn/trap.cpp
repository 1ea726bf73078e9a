#include "ionbath/trapdyn/trap.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "ionbath/core/errors.hpp"
#include "ionbath/core/units.hpp"

namespace ionbath::trapdyn {

namespace {

constexpr int kFloquetSteps = 4000;

// Bisection on a monotone function with f(lo) and f(hi) of opposite sign.
template <class F>
double bisect(F&& f, double lo, double hi, double xtol) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double charge_to_mass(const TrapParams& p) { return p.ion.charge / p.ion.mass; }

}  // namespace

double TrapParams::rf_period() const { return constants::two_pi / rf_drive; }

Vec3 TrapParams::equilibrium() const {
  Vec3 eq;
  for (int i = 0; i < 3; ++i) eq[i] = charge_to_mass(*this) * stray_field[i] / (secular[i] * secular[i]);
  return eq;
}

double mathieu_beta(double a, double q) {
  // Monodromy matrix over tau in [0, pi] by classical RK4.
  const double h = constants::pi / kFloquetSteps;
  auto acc = [&](double tau, double x) { return -(a - 2.0 * q * std::cos(2.0 * tau)) * x; };
  double trace = 0.0;
  for (int col = 0; col < 2; ++col) {
    double x = col == 0 ? 1.0 : 0.0;
    double v = col == 0 ? 0.0 : 1.0;
    for (int n = 0; n < kFloquetSteps; ++n) {
      const double tau = n * h;
      const double k1x = v, k1v = acc(tau, x);
      const double k2x = v + 0.5 * h * k1v, k2v = acc(tau + 0.5 * h, x + 0.5 * h * k1x);
      const double k3x = v + 0.5 * h * k2v, k3v = acc(tau + 0.5 * h, x + 0.5 * h * k2x);
      const double k4x = v + h * k3v, k4v = acc(tau + h, x + h * k3x);
      x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
      v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    }
    trace += col == 0 ? x : v;
  }
  const double half = 0.5 * trace;
  if (!(std::abs(half) < 1.0)) throw DomainError("Mathieu parameters outside the first stability zone");
  return std::acos(half) / constants::pi;
}

std::array<double, 3> lowest_order_frequencies(const TrapParams& p) {
  std::array<double, 3> w{};
  for (int i = 0; i < 3; ++i) {
    const double b2 = p.a[i] + 0.5 * p.q[i] * p.q[i];
    if (b2 <= 0.0) throw ConfigError("trap axis " + std::to_string(i) + " is not confining");
    w[i] = 0.5 * p.rf_drive * std::sqrt(b2);
  }
  return w;
}

std::array<double, 3> secular_frequencies(const TrapParams& p) {
  std::array<double, 3> w{};
  for (int i = 0; i < 3; ++i) {
    try {
      w[i] = 0.5 * p.rf_drive * mathieu_beta(p.a[i], p.q[i]);
    } catch (const DomainError&) {
      throw ConfigError("trap axis " + std::to_string(i) + " is unstable");
    }
  }
  return w;
}

void validate(TrapParams& p) {
  if (!(p.rf_drive > 0.0)) throw ConfigError("RF drive frequency must be positive");
  for (int i = 0; i < 3; ++i) {
    if (!(std::abs(p.q[i]) < 0.9)) throw ConfigError("Mathieu q must be below 0.9");
  }
  p.secular = secular_frequencies(p);
  const double wmax = *std::max_element(p.secular.begin(), p.secular.end());
  if (!(p.rf_drive > 2.0 * wmax)) throw ConfigError("RF drive must exceed twice the secular frequencies");
  for (double w : p.secular) {
    if (!(w > 0.0)) throw ConfigError("secular frequencies must be positive");
  }
  if (p.axial_rf_amplitude != 0.0 && p.axial_null_offset == 0.0) {
    throw ConfigError("axial RF residual requires a non-zero null offset");
  }
}

TrapParams make_trap(double rf_drive, double omega_x, double omega_y, double omega_z, TrapMode mode,
                     Species ion) {
  if (!(rf_drive > 0.0) || !(omega_x > 0.0) || !(omega_y > 0.0) || !(omega_z > 0.0)) {
    throw ConfigError("trap frequencies must be positive");
  }
  if (!(rf_drive > 2.0 * std::max({omega_x, omega_y, omega_z}))) {
    throw ConfigError("RF drive must exceed twice the secular frequencies");
  }
  TrapParams p;
  p.ion = std::move(ion);
  p.rf_drive = rf_drive;
  p.mode = mode;
  const double az = 4.0 * omega_z * omega_z / (rf_drive * rf_drive);
  const double beta_x = 2.0 * omega_x / rf_drive;
  const double beta_y = 2.0 * omega_y / rf_drive;

  auto solve_q = [&](double a, double beta_target) {
    auto f = [&](double q) {
      try {
        return mathieu_beta(a, q) - beta_target;
      } catch (const DomainError&) {
        // Below the beta = 0 edge (near q^2/2 = -a) the motion is unbounded from lack
        // of confinement; above it the q edge of the first zone is crossed.
        return q < 1.5 * std::sqrt(std::max(0.0, -2.0 * a)) ? -1.0 : 1.0;
      }
    };
    if (a > 0.0 && std::sqrt(a) >= beta_target) {
      throw ConfigError("static confinement alone exceeds the requested radial frequency");
    }
    return bisect(f, 1e-9, 0.9, 1e-13);
  };

  double delta = 0.0;
  double q = 0.0;
  if (omega_x == omega_y) {
    q = solve_q(-0.5 * az, beta_x);
  } else {
    auto mismatch = [&](double d) {
      const double qx = solve_q(-0.5 * az + d, beta_x);
      try {
        return mathieu_beta(-0.5 * az - d, -qx) - beta_y;
      } catch (const DomainError&) {
        return -1.0;
      }
    };
    const double span = 0.5 * beta_x * beta_x;
    delta = bisect(mismatch, -span, span, 1e-14);
    q = solve_q(-0.5 * az + delta, beta_x);
  }
  p.a = {-0.5 * az + delta, -0.5 * az - delta, az};
  p.q = {q, -q, 0.0};
  validate(p);
  return p;
}

TrapParams paper_trap(TrapMode mode) {
  TrapParams p = make_trap(units::mhz_to_angular(1.85), units::khz_to_angular(330.0),
                           units::khz_to_angular(330.0), units::khz_to_angular(130.0), mode);
  // Excess micromotion at 330 kHz radial: 50 mV/m horizontal stray field, a vertical
  // field worth 3.4 uK, 2 x 21.5 uK quadrature and 33 uK axial.
  p.stray_field = Vec3(0.05, 0.0, 0.0);
  Vec3 vertical = Vec3::Zero();
  {
    const double m = p.ion.mass, e = p.ion.charge, w = p.secular[1];
    vertical[1] = std::sqrt(2.0 * m * w * w * units::microkelvin_to_joule(3.4)) / e;
  }
  p.stray_field += vertical;
  set_quadrature_energy(p, units::microkelvin_to_joule(2 * 21.5));
  set_axial_energy(p, units::microkelvin_to_joule(33.0));
  return p;
}

Vec3 trap_field(const Vec3& pos, double t, const TrapParams& p) {
  const double m_over_e = p.ion.mass / p.ion.charge;
  Vec3 field;
  if (p.mode == TrapMode::secular_approximation) {
    for (int i = 0; i < 3; ++i) field[i] = -m_over_e * p.secular[i] * p.secular[i] * pos[i];
    return field + p.stray_field;
  }
  const double w2 = p.rf_drive * p.rf_drive;
  const double c = std::cos(p.rf_drive * t);
  for (int i = 0; i < 3; ++i) field[i] = -m_over_e * 0.25 * w2 * (p.a[i] - 2.0 * p.q[i] * c) * pos[i];
  field += p.stray_field;
  if (p.quadrature_phase != 0.0) {
    const double amp =
        m_over_e * w2 * std::abs(p.q[0]) * p.electrode_distance * p.quadrature_phase / 4.0;
    field += amp * std::sin(p.rf_drive * t) * p.quadrature_direction;
  }
  if (p.axial_rf_amplitude != 0.0) {
    field[2] += p.axial_rf_amplitude * (p.axial_null_offset - pos[2]) / p.axial_null_offset * c;
  }
  return field;
}

double stray_field_mm_energy(const TrapParams& p) {
  double e = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double f = p.stray_field[i] * p.ion.charge;
    e += f * f / (2.0 * p.ion.mass * p.secular[i] * p.secular[i]);
  }
  return e;
}

double quadrature_mm_energy(const TrapParams& p) {
  // Velocity amplitude q R phi Omega / 4 -> mean kinetic energy m v0^2 / 4.
  const double v0 = std::abs(p.q[0]) * p.electrode_distance * p.quadrature_phase * p.rf_drive / 4.0;
  return 0.25 * p.ion.mass * v0 * v0;
}

double axial_mm_energy(const TrapParams& p) {
  const double v0 = p.ion.charge * p.axial_rf_amplitude / (p.ion.mass * p.rf_drive);
  return 0.25 * p.ion.mass * v0 * v0;
}

void set_quadrature_energy(TrapParams& p, double energy) {
  if (energy < 0.0) throw DomainError("quadrature micromotion energy must be >= 0");
  const double v0 = std::sqrt(4.0 * energy / p.ion.mass);
  p.quadrature_phase = 4.0 * v0 / (std::abs(p.q[0]) * p.electrode_distance * p.rf_drive);
}

void set_axial_energy(TrapParams& p, double energy) {
  if (energy < 0.0) throw DomainError("axial micromotion energy must be >= 0");
  const double v0 = std::sqrt(4.0 * energy / p.ion.mass);
  p.axial_rf_amplitude = v0 * p.ion.mass * p.rf_drive / p.ion.charge;
}

void set_stray_field_energy(TrapParams& p, const Vec3& direction, double energy) {
  if (energy < 0.0) throw DomainError("stray-field micromotion energy must be >= 0");
  const Vec3 u = direction.normalized();
  double per_unit = 0.0;  // energy for a 1 V/m field along u
  for (int i = 0; i < 3; ++i) {
    per_unit += std::pow(u[i] * p.ion.charge, 2) / (2.0 * p.ion.mass * p.secular[i] * p.secular[i]);
  }
  p.stray_field = std::sqrt(energy / per_unit) * u;
}

namespace {

// One axis of the full_rf equation of motion:
//   x'' = -(k0 - k1 cos W t) x + f0 + fs sin W t + fc cos W t
struct AxisEquation {
  double k0, k1, f0, fs, fc, w;
  double accel(double t, double x) const {
    const double c = std::cos(w * t);
    return -(k0 - k1 * c) * x + f0 + fs * std::sin(w * t) + fc * c;
  }
  double homogeneous(double t, double x) const { return -(k0 - k1 * std::cos(w * t)) * x; }
};

constexpr int kOrbitSteps = 4000;

// RK4 over one RF period from (x, v), optionally homogeneous, calling `sample(t, x, v)`
// at every step start.
template <class Acc, class Sample>
void rk4_period(const Acc& acc, double period, double& x, double& v, Sample&& sample) {
  const double h = period / kOrbitSteps;
  for (int n = 0; n < kOrbitSteps; ++n) {
    const double t = n * h;
    sample(t, x, v);
    const double k1x = v, k1v = acc(t, x);
    const double k2x = v + 0.5 * h * k1v, k2v = acc(t + 0.5 * h, x + 0.5 * h * k1x);
    const double k3x = v + 0.5 * h * k2v, k3v = acc(t + 0.5 * h, x + 0.5 * h * k2x);
    const double k4x = v + h * k3v, k4v = acc(t + h, x + h * k3x);
    x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
}

}  // namespace

OrbitState orbit_state(const TrapParams& p, const Vec3& secular_offset, const Vec3& secular_velocity) {
  OrbitState s;
  if (p.mode == TrapMode::secular_approximation) {
    s.position = p.equilibrium() + secular_offset;
    s.velocity = secular_velocity;
    return s;
  }
  const double w = p.rf_drive;
  const double period = p.rf_period();
  const double e_over_m = p.ion.charge / p.ion.mass;
  const double quad = p.ion.mass * w * w * std::abs(p.q[0]) * p.electrode_distance * p.quadrature_phase /
                      (4.0 * p.ion.charge);
  for (int i = 0; i < 3; ++i) {
    AxisEquation eq{0.25 * w * w * p.a[i], 0.5 * w * w * p.q[i], e_over_m * p.stray_field[i],
                    e_over_m * quad * p.quadrature_direction[i], 0.0, w};
    if (i == 2 && p.axial_rf_amplitude != 0.0) {
      eq.fc = e_over_m * p.axial_rf_amplitude;
      eq.k1 -= e_over_m * p.axial_rf_amplitude / p.axial_null_offset;
    }
    auto hom = [&](double t, double x) { return eq.homogeneous(t, x); };
    auto full = [&](double t, double x) { return eq.accel(t, x); };
    auto none = [](double, double, double) {};

    // Monodromy matrix of the homogeneous equation.
    double m00 = 1.0, m10 = 0.0, m01 = 0.0, m11 = 1.0;
    rk4_period(hom, period, m00, m10, none);
    rk4_period(hom, period, m01, m11, none);
    const double half_trace = 0.5 * (m00 + m11);
    if (!(std::abs(half_trace) < 1.0)) throw ConfigError("orbit_state: unstable axis");
    const double mu = std::acos(half_trace);  // secular phase advance per RF period
    const double omega = mu / period;

    // Periodic orbit driven by the inhomogeneous terms: y0 = (I - M)^-1 y(T) from rest.
    double xp = 0.0, vp = 0.0;
    rk4_period(full, period, xp, vp, none);
    const double d00 = 1.0 - m00, d01 = -m01, d10 = -m10, d11 = 1.0 - m11;
    const double det = d00 * d11 - d01 * d10;
    const double x0p = (d11 * xp - d01 * vp) / det;
    const double v0p = (-d10 * xp + d00 * vp) / det;

    // Floquet solution u(t) = e^{i omega t} P(t): eigenvector of M for e^{i mu}.
    // (M - e^{i mu}) (u0, u0') = 0 with u0 = m01, u0' = e^{i mu} - m00.
    const std::complex<double> lam = std::polar(1.0, mu);
    std::complex<double> u0 = m01, du0 = lam - m00;
    if (std::abs(u0) < 1e-300) {
      u0 = lam - m11;
      du0 = m10;
    }
    // Secular (zeroth Fourier) amplitude C0 = <u(t) e^{-i omega t}> over one period.
    std::complex<double> c0 = 0.0;
    {
      double xr = u0.real(), vr = du0.real(), xi = u0.imag(), vi = du0.imag();
      std::vector<double> re, im;
      re.reserve(kOrbitSteps);
      im.reserve(kOrbitSteps);
      rk4_period(hom, period, xr, vr, [&](double, double xx, double) { re.push_back(xx); });
      rk4_period(hom, period, xi, vi, [&](double, double xx, double) { im.push_back(xx); });
      const double h = period / kOrbitSteps;
      for (int n = 0; n < kOrbitSteps; ++n) {
        c0 += std::complex<double>(re[n], im[n]) * std::polar(1.0, -omega * n * h);
      }
      c0 /= static_cast<double>(kOrbitSteps);
    }
    // Secular motion Re[Z e^{i omega t}] with Re Z = X and -omega Im Z = V.
    const std::complex<double> z(secular_offset[i], -secular_velocity[i] / omega);
    const std::complex<double> coeff = z / c0;
    s.position[i] = x0p + (coeff * u0).real();
    s.velocity[i] = v0p + (coeff * du0).real();
  }
  return s;
}

TrapParams trap_from_config(const KeyValueConfig& cfg, TrapMode mode) {
  const double rf = units::mhz_to_angular(cfg.get_double("trap.rf_drive_mhz", 1.85));
  const double wx = units::khz_to_angular(cfg.get_double("trap.omega_x_khz", 330.0));
  const double wy = units::khz_to_angular(cfg.get_double("trap.omega_y_khz", wx / units::khz_to_angular(1.0)));
  const double wz = units::khz_to_angular(cfg.get_double("trap.omega_z_khz", 130.0));
  TrapParams p = make_trap(rf, wx, wy, wz, mode);
  if (!cfg.get_bool("trap.excess_micromotion", true)) return p;

  const TrapParams ref = paper_trap(mode);
  p.stray_field = Vec3(units::millivolt_per_meter(cfg.get_double("trap.stray_field_x_mvm", ref.stray_field[0] * 1e3)),
                       units::millivolt_per_meter(cfg.get_double("trap.stray_field_y_mvm", ref.stray_field[1] * 1e3)),
                       units::millivolt_per_meter(cfg.get_double("trap.stray_field_z_mvm", 0.0)));
  p.electrode_distance = cfg.get_double("trap.electrode_distance_mm", 0.5) * 1e-3;
  if (cfg.has("trap.quadrature_phase_rad")) {
    p.quadrature_phase = cfg.get_double("trap.quadrature_phase_rad");
  } else {
    set_quadrature_energy(p, units::microkelvin_to_joule(cfg.get_double("trap.quadrature_mm_uk", 43.0)));
  }
  p.axial_null_offset = cfg.get_double("trap.axial_null_offset_um", 100.0) * 1e-6;
  if (cfg.has("trap.axial_rf_amplitude_vm")) {
    p.axial_rf_amplitude = cfg.get_double("trap.axial_rf_amplitude_vm");
  } else {
    set_axial_energy(p, units::microkelvin_to_joule(cfg.get_double("trap.axial_mm_uk", 33.0)));
  }
  validate(p);
  return p;
}

}  // namespace ionbath::trapdyn
