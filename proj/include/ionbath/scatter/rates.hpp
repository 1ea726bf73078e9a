#pragma once

#include <string>
#include <vector>

#include "ionbath/io/table.hpp"
#include "ionbath/scatter/channel_model.hpp"
#include "ionbath/scatter/numerov.hpp"

namespace ionbath::scatter {

/// Energy-dependent spin-exchange rate constant with its partial-wave decomposition.
struct RateCurve {
  std::vector<double> energies;              // collision energies, J
  std::vector<double> rate;                  // m^3/s
  std::vector<std::vector<double>> partial;  // partial[l][i], m^3/s
  int l_max = 0;
  /// Share of the l_max term in the total at the highest energy.
  double l_max_fraction = 0.0;
  /// Worst unitarity / K-symmetry defects over all solved points.
  double worst_unitarity = 0.0;
  double worst_asymmetry = 0.0;
  std::vector<std::string> warnings;

  /// Columns: E_uK, K_m3s, K_l0 ... K_l<l_max>.
  io::Table table() const;
};

struct RateOptions {
  int l_max = 10;
  NumerovOptions numerov;
  /// Worker threads for the energy loop; 0 uses the scheduler default.
  int workers = 0;
  /// Warn when the l_max term exceeds this share of the total at E_max.
  double l_max_warning = 0.01;
  /// Stop the partial-wave sum once a wave far below its barrier adds less than
  /// `truncation_threshold` of the running total (the rest are set to zero).
  bool truncate_l = true;
  double truncation_threshold = 1e-10;
};

/// n energies spaced logarithmically between e_min and e_max (J).
std::vector<double> log_energy_grid(double e_min, double e_max, int n);

/// K(E) = sum_l (pi hbar / (mu k)) (2l + 1) |S_exit,entrance(l, E)|^2 for the transition
/// from channel 0 (entrance) to channel 1 (exit) of a two-channel model. Energies are
/// evaluated in parallel; each propagation is single-threaded.
RateCurve rate_constant(const ChannelModel& model, const std::vector<double>& energies,
                        const RateOptions& options = {});

}  // namespace ionbath::scatter
