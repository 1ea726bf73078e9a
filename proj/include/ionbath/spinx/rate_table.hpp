#pragma once

#include <filesystem>
#include <vector>

#include "ionbath/core/interaction.hpp"
#include "ionbath/scatter/rates.hpp"

namespace ionbath::spinx {

/// Spin-exchange rate K(E; a_S, a_T) tabulated on a uniform scattering-length grid (units
/// of R4, shared by singlet and triplet) and a logarithmic collision-energy grid.
class RateTable {
 public:
  RateTable() = default;
  RateTable(std::vector<double> a_grid, std::vector<double> energies, std::vector<double> lambdas,
            std::vector<double> values);

  const std::vector<double>& a_grid() const { return a_grid_; }
  const std::vector<double>& energies() const { return energies_; }
  /// Potential scale reproducing each grid scattering length.
  const std::vector<double>& lambdas() const { return lambdas_; }
  /// Tabulated value at grid node (i_s, i_t) and energy index k (m^3/s).
  double at(std::size_t i_s, std::size_t i_t, std::size_t k) const;

  /// Interpolated rate: natural cubic spline in log E (clamped to the
  /// grid ends), bilinear in (a_S, a_T).
  double rate(double energy, double a_s, double a_t) const;
  /// Interpolation at a grid node: cubic spline in log E only.
  double rate_at_node(double energy, std::size_t i_s, std::size_t i_t) const;
  /// Index of the grid node nearest to a (throws if outside the grid).
  std::size_t nearest(double a) const;

  void save(const std::filesystem::path& path, const std::string& fingerprint) const;
  /// Loads a cached table; returns false when the file is missing or its fingerprint differs.
  bool load(const std::filesystem::path& path, const std::string& fingerprint);

 private:
  std::vector<double> a_grid_;
  std::vector<double> energies_;
  std::vector<double> lambdas_;
  std::vector<double> values_;  // [i_s][i_t][k]
  std::vector<double> curvature_;  // spline second derivatives in log E, same layout
};

struct RateTableSpec {
  double a_min = -3.0;
  double a_max = 3.0;
  double a_step = 0.1;
  double e_min = 0.0;  // J; 0 selects k_B x 0.3 uK
  double e_max = 0.0;  // J; 0 selects k_B x 150 uK
  int energy_points = 16;
  double splitting = 0.0;  // J; 0 selects the default
  double mixing_angle = 0.25 * constants::pi;
  scatter::RateOptions rates;
  int workers = 0;

  std::vector<double> grid() const;
  std::vector<double> energy_grid() const;
  /// Text identifying every input of the table (used to validate caches).
  std::string fingerprint(const InteractionModel& interaction) const;
  /// Cache file name derived from the fingerprint ("rate_table_<hash>.txt").
  std::string cache_name(const InteractionModel& interaction) const;
};

/// Tunes one potential scale per grid scattering length (singlet and triplet share the
/// lambda -> a map), then solves the two-channel model for every (a_S, a_T) pair. Pairs
/// are evaluated in parallel; the result does not depend on the worker count. When
/// `cache` is non-empty the table is read from / written to that file.
RateTable build_rate_table(const InteractionModel& interaction, const RateTableSpec& spec,
                           const std::filesystem::path& cache = {});

}  // namespace ionbath::spinx
