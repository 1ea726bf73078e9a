#include "ionbath/spinx/emm_distribution.hpp"

#include <cmath>

#include "ionbath/core/constants.hpp"
#include "ionbath/core/errors.hpp"
#include "ionbath/core/units.hpp"

namespace ionbath::spinx {

namespace {

// Mean of the node values, accumulated as deviations from the first node so that a
// constant rate is reproduced exactly and near-constant rates lose no digits.
double midpoint_rule(const std::function<double(double)>& rate, const EmmDistribution& dist, double weight, int n) {
  double reference = 0.0;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double theta = constants::pi * (j + 0.5) / n;
    const double e = dist.offset + dist.mean_emm * (1.0 - std::cos(theta));
    const double k = rate(weight * e);
    if (j == 0) reference = k;
    sum += k - reference;
  }
  return reference + sum / n;
}

}  // namespace

double default_thermal_offset() { return units::microkelvin_to_joule(20.0); }

double EmmDistribution::label(EnergyLabel convention) const {
  return convention == EnergyLabel::maximum ? upper() : offset + mean_emm;
}

double emm_pdf(double energy, const EmmDistribution& dist) {
  if (!(dist.mean_emm > 0.0)) throw DomainError("emm_pdf: mean micromotion energy must be positive");
  const double e = energy - dist.offset;
  const double width = 2.0 * dist.mean_emm;
  if (!(e > 0.0 && e < width)) throw DomainError("emm_pdf: energy outside the open support");
  return 1.0 / (constants::pi * std::sqrt(e * (width - e)));
}

double convolve_rate(const std::function<double(double)>& rate, const EmmDistribution& dist, double weight,
                     const ConvolutionOptions& options) {
  if (dist.mean_emm < 0.0 || dist.offset < 0.0) throw DomainError("convolve_rate: energies must be >= 0");
  if (options.points < 1) throw DomainError("convolve_rate: need at least one quadrature point");
  if (dist.mean_emm == 0.0) return rate(weight * dist.offset);
  int n = options.points;
  double coarse = midpoint_rule(rate, dist, weight, n);
  while (true) {
    const int m = 2 * n;
    const double fine = midpoint_rule(rate, dist, weight, m);
    if (std::abs(fine - coarse) <= options.relative_tolerance * std::abs(fine) ||
        std::abs(fine - coarse) == 0.0) {
      return fine;
    }
    if (m >= options.max_points) throw NumericalError("convolve_rate: quadrature did not converge");
    n = m;
    coarse = fine;
  }
}

}  // namespace ionbath::spinx
