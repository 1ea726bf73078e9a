#include "ionbath/mdsim/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/gamma.hpp>

#include "ionbath/core/errors.hpp"

namespace ionbath::mdsim {

EnergyHistogram energy_histogram(const std::vector<double>& energies, int modes, int bins) {
  if (energies.size() < 100) throw DomainError("energy_histogram: need at least 100 samples");
  if (modes < 1) throw DomainError("energy_histogram: modes must be >= 1");
  for (double e : energies) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw DomainError("energy_histogram: energies must be finite and >= 0");
  }
  const double n = static_cast<double>(energies.size());
  const double mean = std::accumulate(energies.begin(), energies.end(), 0.0) / n;
  if (!(mean > 0.0)) throw DomainError("energy_histogram: all energies are zero");

  EnergyHistogram h;
  h.modes = modes;
  // Maximum likelihood for Gamma(k, kT) with known shape k: kT = mean / k.
  const double kt = mean / modes;
  h.temperature = kt / constants::boltzmann;
  h.temperature_sigma = h.temperature / std::sqrt(modes * n);

  if (bins <= 0) bins = std::clamp(static_cast<int>(std::lround(2.0 * std::pow(n, 0.4))), 5, 50);
  const boost::math::gamma_distribution<double> dist(modes, kt);
  h.edges.resize(bins + 1);
  h.edges[0] = 0.0;
  for (int b = 1; b < bins; ++b) h.edges[b] = boost::math::quantile(dist, static_cast<double>(b) / bins);
  h.edges[bins] = std::max(boost::math::quantile(boost::math::complement(dist, 1e-12)),
                           *std::max_element(energies.begin(), energies.end()));
  h.counts.assign(bins, 0);
  for (double e : energies) {
    const auto it = std::upper_bound(h.edges.begin() + 1, h.edges.end() - 1, e);
    ++h.counts[static_cast<std::size_t>(it - (h.edges.begin() + 1))];
  }
  h.expected.assign(bins, n / bins);
  h.chi2 = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double d = h.counts[b] - h.expected[b];
    h.chi2 += d * d / h.expected[b];
  }
  h.dof = bins - 2;  // one fitted parameter
  h.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(h.dof), h.chi2));
  return h;
}

std::vector<double> plateau_energies(const std::vector<SequenceResult>& runs, int start, int stride) {
  if (start < 0 || stride < 1) throw DomainError("plateau_energies: invalid start or stride");
  std::vector<double> out;
  for (const auto& r : runs) {
    for (std::size_t i = static_cast<std::size_t>(start); i < r.radial_energy.size(); i += stride) {
      out.push_back(r.radial_energy[i] + r.axial_energy[i]);
    }
  }
  return out;
}

}  // namespace ionbath::mdsim
