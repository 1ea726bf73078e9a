#pragma once

#include <functional>

namespace ionbath::spinx {

/// Energy convention for labelling a data point.
enum class EnergyLabel {
  maximum,  // E0 + 2 E_bar: where the shifted arcsine density peaks (upper edge)
  mean,     // E0 + E_bar
};

/// Kinetic-energy distribution of an ion with coherent excess micromotion of mean
/// energy `mean_emm` on top of a thermal offset: the arcsine law on [E0, E0 + 2 E_bar].
struct EmmDistribution {
  double mean_emm = 0.0;  // J
  double offset = 0.0;    // J

  double lower() const { return offset; }
  double upper() const { return offset + 2.0 * mean_emm; }
  double label(EnergyLabel convention = EnergyLabel::maximum) const;
};

/// Default thermal offset, k_B x 20 uK.
double default_thermal_offset();

/// Arcsine density P(E - E0) = 1 / (pi sqrt((E - E0)(2 E_bar - (E - E0)))), 1/J.
/// Throws DomainError unless E lies strictly inside the support.
double emm_pdf(double energy, const EmmDistribution& dist);

struct ConvolutionOptions {
  int points = 64;
  /// Accepted relative change when the rule is doubled; the rule doubles up to
  /// `max_points` before giving up.
  double relative_tolerance = 1e-6;
  int max_points = 4096;
};

/// K_bar = integral P(E - E0) K(weight E) dE over the support. The substitution
/// E = E0 + E_bar (1 - cos(theta)) turns the integral into (1/pi) int_0^pi K dtheta,
/// evaluated with the equal-weight midpoint (Gauss-Chebyshev) rule, which is exact for
/// K polynomial in E up to degree 2N - 1. `weight` maps the ion energy to the argument
/// of K (mu/m_i for the collision energy). Throws NumericalError if doubling the rule
/// never settles.
double convolve_rate(const std::function<double(double)>& rate, const EmmDistribution& dist, double weight = 1.0,
                     const ConvolutionOptions& options = {});

}  // namespace ionbath::spinx
