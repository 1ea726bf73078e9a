#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ionbath/core/errors.hpp"
#include "ionbath/io/table.hpp"
#include "ionbath/spinx/emm_distribution.hpp"

namespace ionbath::spinx {

/// S = 1 - exp(-n_L K_bar / K_L).
double spin_flip_probability(double k_bar, double n_langevin, double k_langevin);

/// Sum of squared normalized residuals. Throws DomainError on non-positive sigma or
/// mismatched lengths.
double chi2(const std::vector<double>& observed, const std::vector<double>& sigma,
            const std::vector<double>& predicted);

/// Measured spin-flip probabilities versus mean excess-micromotion energy.
struct SpinDataset {
  std::vector<double> mean_emm;  // J (ion kinetic energy)
  std::vector<double> s;
  std::vector<double> sigma;

  std::size_t size() const { return s.size(); }
  void validate() const;
};

/// Reads columns (E_eMM_uK, S, sigma); throws ConfigError naming the line on bad rows.
SpinDataset read_spin_dataset(const std::filesystem::path& path);
io::Table spin_dataset_table(const SpinDataset& data);

/// Rate model K(E_collision; a_S, a_T) in m^3/s with a_S, a_T in units of R4.
using RateModel = std::function<double(double energy, double a_s, double a_t)>;

struct SpinFitOptions {
  double a_min = -3.0;
  double a_max = 3.0;
  double a_step = 0.1;
  double offset = 0.0;        // thermal offset E0 (J); 0 selects k_B x 20 uK
  double energy_weight = 1.0;  // ion energy -> collision energy (mu / m_i)
  double k_langevin = 0.0;     // m^3/s (required)
  double n_max = 50.0;         // upper end of the n_L search
  double p_level = 0.05;
  bool refine = true;
  int workers = 0;
  ConvolutionOptions convolution;
  EnergyLabel label = EnergyLabel::maximum;
};

struct SpinFitResult {
  double a_s = 0.0;  // R4
  double a_t = 0.0;  // R4
  double n_l = 0.0;
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 0.0;
  /// chi2 threshold of the region: the (1 - p_level) quantile with N_points degrees of freedom.
  double region_threshold = 0.0;
  /// Bounding box of the grid nodes inside the region.
  double a_s_min = 0.0, a_s_max = 0.0, a_t_min = 0.0, a_t_max = 0.0, n_l_min = 0.0, n_l_max = 0.0;
  int region_nodes = 0;

  std::vector<double> grid;                 // a values shared by both axes
  std::vector<std::vector<double>> surface;  // chi2[i_s][i_t] with n_L optimized
  std::vector<std::vector<double>> best_n;   // optimal n_L per node

  /// Model prediction and energy labels at the best fit.
  std::vector<double> labels;  // J
  std::vector<double> predicted;

  bool energy_independent = false;  // best-fit prediction flat in energy
  bool degenerate = false;           // chi2 surface flat over (a_S, a_T)

  /// True when grid node (i_s, i_t) lies inside the p-level region.
  bool in_region(std::size_t i_s, std::size_t i_t) const;
  /// Nearest-node membership for a point inside the grid.
  bool contains(double a_s, double a_t) const;
  io::Table surface_table() const;
};

/// Raised when the data cannot identify (a_S, a_T); carries the flat-surface result.
class DegenerateFitError : public FitError {
 public:
  DegenerateFitError(const std::string& what, SpinFitResult result)
      : FitError(what), result_(std::move(result)) {}
  const SpinFitResult& result() const { return result_; }

 private:
  SpinFitResult result_;
};

/// Grid scan over (a_S, a_T) with n_L optimized at every node, then a local pattern
/// search around the best node. The scan order and reductions are fixed, so identical
/// inputs give identical surfaces regardless of the worker count.
SpinFitResult fit_spin(const SpinDataset& data, const RateModel& model, const SpinFitOptions& options);

/// Predicted S at every data point for given parameters.
std::vector<double> predict_spin(const SpinDataset& data, const RateModel& model, double a_s, double a_t,
                                 double n_l, const SpinFitOptions& options);

}  // namespace ionbath::spinx
