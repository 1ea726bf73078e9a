#include "ionbath/thermometry/rabi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ionbath/core/errors.hpp"
#include "ionbath/core/least_squares.hpp"

namespace ionbath::thermometry {

double lamb_dicke(double wavevector, double mass, double omega) {
  if (!(mass > 0.0) || !(omega > 0.0)) throw DomainError("lamb_dicke: mass and frequency must be positive");
  return wavevector * std::sqrt(constants::hbar / (2.0 * mass * omega));
}

RabiConfig radial_rabi_config(double omega0, double omega, double contrast, const Species& ion) {
  RabiConfig cfg;
  cfg.omega0 = omega0;
  cfg.mode_frequency = omega;
  cfg.contrast = contrast;
  const double eta = lamb_dicke(constants::two_pi / constants::yb_411_wavelength, ion.mass, omega);
  cfg.eta = {eta / std::sqrt(2.0), eta / std::sqrt(2.0), 0.0};
  return cfg;
}

std::vector<double> laguerre_table(int n, double x) {
  if (n < 0) throw DomainError("laguerre_table: order must be >= 0");
  std::vector<double> l(static_cast<std::size_t>(n) + 1);
  l[0] = 1.0;
  if (n >= 1) l[1] = 1.0 - x;
  for (int k = 1; k < n; ++k) {
    l[k + 1] = ((2.0 * k + 1.0 - x) * l[k] - k * l[k - 1]) / (k + 1.0);
  }
  return l;
}

double thermal_weight(int n, double nbar) {
  if (nbar < 0.0 || n < 0) throw DomainError("thermal_weight: nbar and n must be >= 0");
  if (nbar == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(nbar / (1.0 + nbar))) / (1.0 + nbar);
}

int truncation(double nbar) { return std::max(50, static_cast<int>(std::ceil(20.0 * nbar))); }

namespace {

// Per-axis list of (weight, Rabi factor) for occupied Fock states.
struct AxisFactors {
  std::vector<double> weight;
  std::vector<double> factor;
};

AxisFactors axis_factors(double nbar, double eta) {
  AxisFactors a;
  if (eta == 0.0) {
    a.weight = {1.0};
    a.factor = {1.0};
    return a;
  }
  const int nmax = truncation(nbar);
  const double ratio = nbar / (1.0 + nbar);
  const double tail = nbar == 0.0 ? 0.0 : std::pow(ratio, nmax + 1);
  if (tail > 1e-6) throw NumericalError("rabi_signal: thermal truncation tail exceeds 1e-6");
  const double x = eta * eta;
  const std::vector<double> lag = laguerre_table(nmax, x);
  const double dw = std::exp(-0.5 * x);
  a.weight.resize(nmax + 1);
  a.factor.resize(nmax + 1);
  double w = 1.0 / (1.0 + nbar);
  for (int n = 0; n <= nmax; ++n) {
    a.weight[n] = w;
    a.factor[n] = dw * lag[n];
    w *= ratio;
  }
  return a;
}

}  // namespace

std::vector<double> rabi_signal(const std::vector<double>& t_pulse, double nbar, const RabiConfig& cfg) {
  if (!(nbar >= 0.0)) throw DomainError("rabi_signal: nbar must be >= 0");
  if (!(cfg.contrast > 0.0 && cfg.contrast <= 1.0)) throw DomainError("rabi_signal: contrast must be in (0, 1]");
  std::array<AxisFactors, 3> axes;
  for (int i = 0; i < 3; ++i) axes[i] = axis_factors(nbar, cfg.eta[i]);
  // Flatten the product over axes into (weight, Omega_n) pairs.
  std::vector<double> weight{1.0}, omega{cfg.omega0};
  for (const auto& ax : axes) {
    std::vector<double> w2, o2;
    w2.reserve(weight.size() * ax.weight.size());
    o2.reserve(weight.size() * ax.weight.size());
    for (std::size_t j = 0; j < weight.size(); ++j) {
      for (std::size_t k = 0; k < ax.weight.size(); ++k) {
        w2.push_back(weight[j] * ax.weight[k]);
        o2.push_back(omega[j] * ax.factor[k]);
      }
    }
    weight.swap(w2);
    omega.swap(o2);
  }
  std::vector<double> out(t_pulse.size());
  for (std::size_t i = 0; i < t_pulse.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < weight.size(); ++j) {
      const double si = std::sin(0.5 * omega[j] * t_pulse[i]);
      s += weight[j] * si * si;
    }
    out[i] = cfg.contrast * s;
  }
  return out;
}

double rabi_signal(double t_pulse, double nbar, const RabiConfig& cfg) {
  return rabi_signal(std::vector<double>{t_pulse}, nbar, cfg).front();
}

double temperature_from_nbar(double nbar, double omega) {
  if (nbar < 0.0) throw DomainError("temperature_from_nbar: nbar must be >= 0");
  return constants::hbar * omega * (nbar + 0.5) / constants::boltzmann;
}

double nbar_from_temperature(double temperature, double omega) {
  return temperature * constants::boltzmann / (constants::hbar * omega) - 0.5;
}

RabiFit fit_nbar(const std::vector<double>& t, const std::vector<double>& p, const RabiConfig& cfg,
                 const std::vector<double>& sigma) {
  const std::size_t n = t.size();
  if (n < 8 || p.size() != n) throw FitError("fit_nbar: need at least 8 (t, P) points");
  if (!sigma.empty() && sigma.size() != n) throw DomainError("fit_nbar: sigma length mismatch");
  const double span = *std::max_element(t.begin(), t.end()) - *std::min_element(t.begin(), t.end());
  double omega0 = cfg.omega0;
  if (!(omega0 > 0.0)) {
    // First maximum of the excitation approximates the pi time.
    const auto it = std::max_element(p.begin(), p.end());
    const double t_pi = t[static_cast<std::size_t>(it - p.begin())];
    if (!(t_pi > 0.0)) throw FitError("fit_nbar: cannot estimate the Rabi frequency");
    omega0 = constants::pi / t_pi;
  }
  if (span * omega0 < constants::two_pi) throw FitError("fit_nbar: data must span at least one Rabi period");
  const bool weighted = !sigma.empty();
  const double w_scale = omega0;

  RabiConfig model = cfg;
  const ResidualFunction residual = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
    const double nbar = q[0] * q[0];  // keeps nbar >= 0
    model.omega0 = q[1] * w_scale;
    const std::vector<double> s = rabi_signal(t, nbar, model);
    for (std::size_t i = 0; i < n; ++i) {
      double ri = s[i] - p[i];
      if (weighted) ri /= sigma[i];
      r[static_cast<Eigen::Index>(i)] = ri;
    }
  };

  // Coarse scan over nbar for a robust starting point.
  double best_nbar = 1.0, best_chi2 = HUGE_VAL;
  for (double nb : {0.05, 0.3, 1.0, 2.0, 4.0, 8.0, 15.0, 30.0}) {
    Eigen::VectorXd q(2), r(static_cast<Eigen::Index>(n));
    q << std::sqrt(nb), 1.0;
    residual(q, r);
    if (r.squaredNorm() < best_chi2) {
      best_chi2 = r.squaredNorm();
      best_nbar = nb;
    }
  }
  Eigen::VectorXd q0(2);
  q0 << std::sqrt(best_nbar), 1.0;
  LeastSquaresOptions opts;
  opts.weighted = weighted;
  const LeastSquaresResult res = levenberg_marquardt(residual, q0, static_cast<int>(n), opts);
  if (!res.converged || res.singular || !res.params.allFinite()) {
    std::ostringstream msg;
    msg << "fit_nbar did not converge (chi2 = " << res.chi2 << ", evaluations = " << res.evaluations << ")";
    throw FitError(msg.str());
  }
  RabiFit fit;
  const double s = res.params[0];
  fit.nbar = s * s;
  fit.omega0 = res.params[1] * w_scale;
  // Jacobian of (nbar, omega0) with respect to (s, q1).
  Eigen::Matrix2d j;
  j << 2.0 * s, 0.0, 0.0, w_scale;
  fit.covariance = j * res.covariance * j.transpose();
  fit.chi2 = res.chi2;
  fit.dof = res.dof;
  fit.temperature = temperature_from_nbar(fit.nbar, cfg.mode_frequency);
  fit.temperature_sigma = constants::hbar * cfg.mode_frequency * fit.sigma_nbar() / constants::boltzmann;
  return fit;
}

}  // namespace ionbath::thermometry
