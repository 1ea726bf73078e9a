#include "ionbath/thermometry/doppler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ionbath/core/errors.hpp"
#include "ionbath/core/least_squares.hpp"

namespace ionbath::thermometry {

double doppler_temperature(double sigma, double mass, double wavelength) {
  if (sigma < 0.0) throw DomainError("doppler_temperature: width must be >= 0");
  const double v = sigma * wavelength;
  return mass * v * v / constants::boltzmann;
}

double doppler_width(double temperature, double mass, double wavelength) {
  if (temperature < 0.0) throw DomainError("doppler_width: temperature must be >= 0");
  return std::sqrt(constants::boltzmann * temperature / mass) / wavelength;
}

DopplerFit doppler_fit(const std::vector<double>& detuning, const std::vector<double>& p, const Species& ion,
                       double wavelength, const std::vector<double>& sigma) {
  const std::size_t n = detuning.size();
  if (n < 5 || p.size() != n) throw FitError("doppler_fit: need at least 5 points");
  if (!sigma.empty() && sigma.size() != n) throw DomainError("doppler_fit: sigma length mismatch");
  const auto [lo_it, hi_it] = std::minmax_element(detuning.begin(), detuning.end());
  const double lo = *lo_it, hi = *hi_it;
  const double span = hi - lo;
  if (!(span > 0.0)) throw FitError("doppler_fit: detuning range is empty");

  // Moments of the baseline-subtracted spectrum for the starting point.
  const double base = *std::min_element(p.begin(), p.end());
  const double peak = *std::max_element(p.begin(), p.end());
  double w = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = p[i] - base;
    w += y;
    m1 += y * detuning[i];
  }
  if (!(w > 0.0)) throw FitError("doppler_fit: no resonance signal");
  m1 /= w;
  for (std::size_t i = 0; i < n; ++i) m2 += (p[i] - base) * (detuning[i] - m1) * (detuning[i] - m1);
  const double s0 = std::clamp(std::sqrt(m2 / w), span / (4.0 * static_cast<double>(n)), span / 2.0);

  const bool weighted = !sigma.empty();
  const double ys = std::max(std::abs(peak), 1e-300);
  const ResidualFunction residual = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
    const double c = lo + q[1] * span;
    const double s = q[2] * span;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (detuning[i] - c) / s;
      double ri = q[0] * std::exp(-0.5 * d * d) + q[3] - p[i] / ys;
      if (weighted) ri /= sigma[i] / ys;
      r[static_cast<Eigen::Index>(i)] = ri;
    }
  };
  Eigen::VectorXd q0(4);
  q0 << (peak - base) / ys, (m1 - lo) / span, s0 / span, base / ys;
  LeastSquaresOptions opts;
  opts.weighted = weighted;
  const LeastSquaresResult res = levenberg_marquardt(residual, q0, static_cast<int>(n), opts);
  if (!res.converged || res.singular || !res.params.allFinite()) throw FitError("doppler_fit did not converge");

  DopplerFit fit;
  fit.amplitude = res.params[0] * ys;
  fit.center = lo + res.params[1] * span;
  fit.sigma = std::abs(res.params[2]) * span;
  fit.offset = res.params[3] * ys;
  if (fit.center < lo || fit.center > hi) throw FitError("doppler_fit: resonance outside the scanned range");
  const Eigen::Vector4d scale(ys, span, span, ys);
  fit.covariance = scale.asDiagonal() * res.covariance * scale.asDiagonal();
  fit.temperature = doppler_temperature(fit.sigma, ion.mass, wavelength);
  // dT/dsigma = 2 T / sigma.
  fit.temperature_sigma = fit.sigma > 0.0 ? 2.0 * fit.temperature * fit.sigma_sigma() / fit.sigma : 0.0;
  return fit;
}

}  // namespace ionbath::thermometry
