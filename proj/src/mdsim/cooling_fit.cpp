#include "ionbath/mdsim/cooling_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ionbath/core/errors.hpp"
#include "ionbath/core/least_squares.hpp"

namespace ionbath::mdsim {

double CoolingFit::operator()(double n) const {
  if (degenerate || N_eq <= 0.0) return T_inf;
  return (T0 - T_inf) * std::exp(-n / N_eq) + T_inf;
}

CoolingFit fit_cooling(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& sigma) {
  const std::size_t n = x.size();
  if (n < 10 || y.size() != n) throw DomainError("fit_cooling: need at least 10 points with matching abscissa");
  if (!sigma.empty() && sigma.size() != n) throw DomainError("fit_cooling: sigma length mismatch");
  const bool weighted = !sigma.empty() && std::all_of(sigma.begin(), sigma.end(), [](double s) { return s > 0.0; });

  // Scaled problem: unit-sized abscissa span and ordinates.
  const double xs = std::max(std::abs(x.back() - x.front()), 1e-300);
  double ys = 0.0;
  for (double v : y) ys = std::max(ys, std::abs(v));
  if (ys == 0.0) ys = 1.0;

  CoolingFit fit;
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  if (*ymax - *ymin <= 1e-12 * ys) {
    fit.T0 = fit.T_inf = y.front();
    fit.N_eq = 0.0;
    fit.degenerate = true;
    fit.dof = static_cast<int>(n) - 3;
    return fit;
  }

  // Initial guess: tail average for T_inf, 1/e crossing for N_eq.
  const std::size_t tail = std::max<std::size_t>(1, n / 5);
  const double t_inf0 = std::accumulate(y.end() - tail, y.end(), 0.0) / static_cast<double>(tail);
  const double t00 = y.front();
  double n_eq0 = 0.2 * xs;
  const double level = t_inf0 + (t00 - t_inf0) / std::exp(1.0);
  for (std::size_t i = 1; i < n; ++i) {
    if ((t00 > t_inf0 && y[i] <= level) || (t00 < t_inf0 && y[i] >= level)) {
      n_eq0 = std::max(x[i] - x.front(), 1e-3 * xs);
      break;
    }
  }

  const ResidualFunction residual = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    for (std::size_t i = 0; i < n; ++i) {
      const double model = (p[0] - p[1]) * std::exp(-(x[i] / xs) / p[2]) + p[1];
      double ri = model - y[i] / ys;
      if (weighted) ri /= sigma[i] / ys;
      r[static_cast<Eigen::Index>(i)] = ri;
    }
  };
  Eigen::VectorXd p0(3);
  p0 << t00 / ys, t_inf0 / ys, n_eq0 / xs;
  LeastSquaresOptions opts;
  opts.weighted = weighted;
  const LeastSquaresResult res = levenberg_marquardt(residual, p0, static_cast<int>(n), opts);
  if (!res.converged || !res.params.allFinite() || !(res.params[2] > 0.0)) {
    std::ostringstream msg;
    msg << "cooling fit did not converge after " << res.evaluations << " evaluations (chi2 = " << res.chi2
        << ", parameters T0 = " << res.params[0] * ys << ", T_inf = " << res.params[1] * ys
        << ", N_eq = " << res.params[2] * xs << ")";
    throw FitError(msg.str());
  }
  fit.T0 = res.params[0] * ys;
  fit.T_inf = res.params[1] * ys;
  fit.N_eq = res.params[2] * xs;
  fit.chi2 = res.chi2;
  fit.dof = res.dof;
  const Eigen::Vector3d scale(ys, ys, xs);
  if (res.singular) {
    fit.covariance.setConstant(std::nan(""));
    fit.degenerate = true;
  } else {
    fit.covariance = scale.asDiagonal() * res.covariance * scale.asDiagonal();
    // An amplitude indistinguishable from zero leaves N_eq unidentified.
    const double amp = fit.T0 - fit.T_inf;
    const double amp_var = fit.covariance(0, 0) + fit.covariance(1, 1) - 2.0 * fit.covariance(0, 1);
    if (amp_var > 0.0 && std::abs(amp) < 2.0 * std::sqrt(amp_var)) fit.degenerate = true;
  }
  return fit;
}

double simulation_density(double sphere_radius) {
  if (!(sphere_radius > 0.0)) throw DomainError("sphere radius must be positive");
  return 1.0 / (4.0 / 3.0 * constants::pi * std::pow(sphere_radius, 3));
}

double langevin_collisions(const CoolingFit& fit, double flux, double rho_sim, const InteractionModel& model) {
  if (!(flux > 0.0)) throw DomainError("langevin_collisions: atom flux must be positive");
  if (!(rho_sim > 0.0)) throw DomainError("langevin_collisions: density must be positive");
  return langevin_rate_coeff(model) * rho_sim * fit.N_eq / flux;
}

double density_from_cooling(double n_l_eq, double tau, const InteractionModel& model) {
  if (!(tau > 0.0)) throw DomainError("density_from_cooling: tau must be positive");
  return n_l_eq / (tau * langevin_rate_coeff(model));
}

double HeatedCooling::operator()(double t) const {
  return (T0 - T_inf) * std::exp(-t / tau) + T_inf + offset();
}

HeatedCooling apply_heating(const CoolingFit& fit, double gamma_heat) {
  if (!(fit.tau > 0.0)) throw DomainError("apply_heating: cooling time must be positive");
  return HeatedCooling{fit.T0, fit.T_inf, fit.tau, gamma_heat};
}

}  // namespace ionbath::mdsim
