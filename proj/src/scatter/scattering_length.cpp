#include "ionbath/scatter/scattering_length.hpp"

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "ionbath/core/errors.hpp"
#include "ionbath/scatter/smatrix.hpp"

namespace ionbath::scatter {

namespace {

// Low-energy phase shifts are of order k a, so the Numerov dispersion error
// (relative k x (k h)^4 / 480) must be pushed far below the usual setting.
constexpr double kLowEnergyStepsPerWavelength = 400.0;

// Zero-energy solutions regular and linear at large x.
struct ZeroEnergyBasis {
  double constant;  // tends to 1
  double linear;    // tends to x
};

ZeroEnergyBasis zero_energy_basis(PotentialKind kind, double x) {
  if (kind == PotentialKind::free) return {1.0, x};
  return {x * std::sin(1.0 / x), x * std::cos(1.0 / x)};
}

}  // namespace

ScatteringLength zero_energy_scattering_length(const ChannelModel& model, const NumerovOptions& options) {
  if (model.channels() != 1) throw DomainError("scattering length needs a single-channel model");
  NumerovOptions opt = options;
  if (opt.x_match <= 0.0) opt.x_match = std::max(50.0, 4.0 * model.r_cut() + model.wall());
  const Propagation p = numerov_propagate(model, 0.0, 0, opt);
  const double q = p.ratio(0, 0);
  const ZeroEnergyBasis fa = zero_energy_basis(model.kind(), p.x_a);
  const ZeroEnergyBasis fb = zero_energy_basis(model.kind(), p.x_b);
  // q (A f_a + B g_a) = A f_b + B g_b
  const double a_coef = -(fb.linear - q * fa.linear);
  const double b_coef = fb.constant - q * fa.constant;
  ScatteringLength out;
  if (b_coef == 0.0) throw NumericalError("scattering length: exactly on a zero-energy resonance");
  out.reduced = -a_coef / b_coef;
  out.meters = out.reduced * model.interaction().r4();
  out.bound_states = p.nodes + (out.reduced > p.x_b ? 1 : 0);
  out.near_pole = std::abs(out.reduced) > 0.5 * p.x_b;
  return out;
}

ScatteringLength scattering_length(const ChannelModel& model, double k_max, const NumerovOptions& options) {
  if (model.channels() != 1) throw DomainError("scattering length needs a single-channel model");
  if (!(k_max > 0.0) || k_max > 0.1) throw DomainError("scattering length: k_max must lie in (0, 0.1] / R4");
  Eigen::Matrix4d design;
  Eigen::Vector4d rhs;
  std::array<double, 4> tan_delta{};
  for (int i = 0; i < 4; ++i) {
    const double k = k_max * (i + 1) / 4.0;
    NumerovOptions opt = options;
    opt.steps_per_wavelength = std::max(opt.steps_per_wavelength, kLowEnergyStepsPerWavelength);
    // The 1/x^4 tail decays slowly: match far enough out that k x >> 1.
    if (opt.x_match <= 0.0) opt.x_match = std::max(default_match_radius(model, k * k, 0), 30.0 / k);
    const ScatteringResult r = solve_scattering(model, k * k, 0, opt);
    tan_delta[i] = r.K(0, 0);
    if (tan_delta[i] == 0.0) throw NumericalError("scattering length: vanishing phase shift");
    rhs[i] = k / tan_delta[i];
    design(i, 0) = 1.0;
    design(i, 1) = k;
    design(i, 2) = k * k * std::log(k);
    design(i, 3) = k * k;
  }
  const Eigen::Vector4d c = design.fullPivLu().solve(rhs);
  ScatteringLength out;
  for (int i = 0; i < 4; ++i) out.expansion[i] = c[i];
  if (c[0] == 0.0) throw NumericalError("scattering length: k cot(delta) extrapolates to zero");
  out.reduced = -1.0 / c[0];
  out.meters = out.reduced * model.interaction().r4();
  // Near a pole k cot(delta) is not dominated by its constant term, and the
  // phase shifts no longer share the sign of -k a.
  for (int i = 0; i < 4; ++i) {
    const double k = k_max * (i + 1) / 4.0;
    if (tan_delta[i] * out.reduced > 0.0 || std::abs(c[1] * k) > std::abs(c[0])) out.near_pole = true;
  }
  NumerovOptions zopt = options;
  zopt.x_match = 0.0;
  out.bound_states = zero_energy_scattering_length(model, zopt).bound_states;
  return out;
}

TuneResult tune_scaling(const InteractionModel& interaction, double target, double tolerance, double lambda_min,
                        double lambda_max, const NumerovOptions& options) {
  if (!std::isfinite(target)) throw DomainError("tune_scaling: target must be finite");
  if (!(lambda_min > 0.0 && lambda_min < 1.0 && lambda_max > 1.0)) {
    throw DomainError("tune_scaling: bracket must contain lambda = 1");
  }
  TuneResult out;
  auto eval = [&](double lambda) {
    ++out.evaluations;
    return zero_energy_scattering_length(ChannelModel::single(interaction, lambda), options);
  };
  const ScatteringLength base = eval(1.0);
  const int base_states = base.bound_states;
  if (std::abs(base.reduced - target) <= tolerance) {
    out.reduced = base.reduced;
    out.bound_states = base_states;
    return out;
  }
  // a decreases with lambda between poles: go up to lower a, down to raise it.
  const double dir = target < base.reduced ? 1.0 : -1.0;
  const double limit = dir > 0 ? lambda_max : lambda_min;
  double lam = 1.0;
  double a_prev = base.reduced;
  double step = 0.005;
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  while (step > 1e-13) {
    double next = lam + dir * step;
    if ((next - limit) * dir > 0.0) next = limit;
    if (next == lam) break;
    const double a_next = eval(next).reduced;
    const bool monotone = dir > 0 ? a_next <= a_prev : a_next >= a_prev;
    if (!monotone) {
      step *= 0.5;  // a pole lies in between: approach it more carefully
      continue;
    }
    if ((a_next - target) * dir <= 0.0) {
      lo = std::min(lam, next);
      hi = std::max(lam, next);
      bracketed = true;
      break;
    }
    lam = next;
    a_prev = a_next;
    step = std::min(2.0 * step, 0.005);
  }
  if (!bracketed) throw NumericalError("tune_scaling: target scattering length unreachable in the bracket");

  std::uintmax_t iterations = 200;
  const auto f = [&](double l) { return eval(l).reduced - target; };
  const auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-14 * std::abs(a); };
  const auto root = boost::math::tools::toms748_solve(f, lo, hi, tol, iterations);
  out.lambda = 0.5 * (root.first + root.second);
  const ScatteringLength fin = eval(out.lambda);
  if (std::abs(fin.reduced - target) > std::max(tolerance, 1e-3)) {
    throw NumericalError("tune_scaling: root finder did not converge on the target");
  }
  out.reduced = fin.reduced;
  out.bound_states = fin.bound_states;
  out.bound_states_crossed = fin.bound_states - base_states;
  return out;
}

}  // namespace ionbath::scatter
