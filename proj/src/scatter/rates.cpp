#include "ionbath/scatter/rates.hpp"

#include <cmath>
#include <memory>

#include <tbb/global_control.h>
#include <tbb/parallel_for.h>

#include "ionbath/core/errors.hpp"
#include "ionbath/core/units.hpp"
#include "ionbath/scatter/smatrix.hpp"

namespace ionbath::scatter {

std::vector<double> log_energy_grid(double e_min, double e_max, int n) {
  if (!(e_min > 0.0) || !(e_max >= e_min) || n < 1) throw DomainError("log_energy_grid: need 0 < e_min <= e_max, n >= 1");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = e_min;
    return out;
  }
  const double step = std::log(e_max / e_min) / (n - 1);
  for (int i = 0; i < n; ++i) out[i] = e_min * std::exp(step * i);
  out.back() = e_max;
  return out;
}

io::Table RateCurve::table() const {
  io::Table t;
  t.header = {"E_uK", "K_m3s"};
  t.columns.resize(2 + partial.size());
  for (double e : energies) t.columns[0].push_back(units::joule_to_microkelvin(e));
  t.columns[1] = rate;
  for (std::size_t l = 0; l < partial.size(); ++l) {
    t.header.push_back("K_l" + std::to_string(l));
    t.columns[2 + l] = partial[l];
  }
  return t;
}

RateCurve rate_constant(const ChannelModel& model, const std::vector<double>& energies, const RateOptions& options) {
  if (model.channels() != 2) throw DomainError("rate_constant needs a two-channel (entrance, exit) model");
  if (options.l_max < 0) throw DomainError("rate_constant: l_max must be >= 0");
  for (double e : energies) {
    if (!(e > 0.0)) throw DomainError("rate_constant: energies must be positive");
  }
  const InteractionModel& im = model.interaction();
  const double es = im.s_wave_energy();
  const double mu = im.reduced_mass();
  const int n = static_cast<int>(energies.size());
  const int nl = options.l_max + 1;

  RateCurve curve;
  curve.energies = energies;
  curve.l_max = options.l_max;
  curve.rate.assign(n, 0.0);
  curve.partial.assign(nl, std::vector<double>(n, 0.0));
  std::vector<double> unitarity(n, 0.0), asymmetry(n, 0.0);

  auto body = [&](int i) {
    const double e = energies[i];
    const double k = std::sqrt(2.0 * mu * e) / constants::hbar;
    const double prefactor = constants::pi * constants::hbar / (mu * k);
    const double eps = e / es;
    double sum = 0.0;
    for (int l = 0; l < nl; ++l) {
      const ScatteringResult r = solve_scattering(model, eps, l, options.numerov);
      const double term = prefactor * (2.0 * l + 1.0) * r.transition_probability(1, 0);
      curve.partial[l][i] = term;
      sum += term;
      unitarity[i] = std::max(unitarity[i], r.unitarity_error);
      asymmetry[i] = std::max(asymmetry[i], r.k_asymmetry);
      // Deep below the centrifugal barrier top (l(l+1))^2/4 the remaining waves only
      // tunnel, and each is orders of magnitude below the previous one.
      const double barrier = 0.25 * l * (l + 1.0) * l * (l + 1.0);
      if (options.truncate_l && l >= 2 && eps < 0.25 * barrier && term <= options.truncation_threshold * sum) break;
    }
  };
  if (options.workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
  } else {
    std::unique_ptr<tbb::global_control> limit;
    if (options.workers > 1) {
      limit = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                    static_cast<std::size_t>(options.workers));
    }
    tbb::parallel_for(0, n, body);
  }
  // Sum in a fixed order so results do not depend on scheduling.
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < nl; ++l) curve.rate[i] += curve.partial[l][i];
    curve.worst_unitarity = std::max(curve.worst_unitarity, unitarity[i]);
    curve.worst_asymmetry = std::max(curve.worst_asymmetry, asymmetry[i]);
  }
  if (n > 0) {
    int imax = 0;
    for (int i = 1; i < n; ++i)
      if (energies[i] > energies[imax]) imax = i;
    const double total = curve.rate[imax];
    curve.l_max_fraction = total > 0.0 ? curve.partial[options.l_max][imax] / total : 0.0;
    if (curve.l_max_fraction > options.l_max_warning) {
      curve.warnings.push_back("l_max = " + std::to_string(options.l_max) + " carries " +
                               std::to_string(100.0 * curve.l_max_fraction) +
                               "% of the rate at the highest energy; raise l_max");
    }
  }
  return curve;
}

}  // namespace ionbath::scatter
