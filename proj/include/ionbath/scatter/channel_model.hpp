#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ionbath/core/config.hpp"
#include "ionbath/core/interaction.hpp"

namespace ionbath::scatter {

/// Small dense matrices for the coupled-channel problem (no heap allocation up to 4).
using ChannelMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

enum class PotentialKind {
  ion_atom,  // C4 (-1/(2 r^4) + C6/r^6)
  pure_c4,   // -C4/(2 r^4) only (needs a hard wall)
  free,      // V = 0
};

/// Multichannel radial model in reduced units x = r / R4, energies in E_s.
///
/// Spin-state potentials are V_j(r) = V(r) [1 + (lambda_j - 1) w(r)], with w a smooth
/// taper equal to one inside r_cut/2 and zero beyond r_cut, so that the scaled part and
/// hence the exchange coupling are short-ranged. Two-channel models rotate the
/// (singlet, triplet) pair by `mixing_angle` into asymptotic channels; channel 0 is the
/// entrance channel at threshold 0 and channel 1 the exit channel at -splitting.
class ChannelModel {
 public:
  /// One channel with potential scale lambda.
  static ChannelModel single(const InteractionModel& interaction, double lambda = 1.0);
  /// Free particle (V = 0), one channel.
  static ChannelModel free(const InteractionModel& interaction);
  /// Impenetrable sphere of radius `radius` (m) in a free or pure -C4/(2r^4) potential.
  static ChannelModel hard_sphere(const InteractionModel& interaction, double radius, bool with_c4 = false);
  /// Singlet/triplet pair with scales (lambda_s, lambda_t), exit threshold at -splitting (J).
  static ChannelModel two_spin(const InteractionModel& interaction, double lambda_s, double lambda_t,
                               double splitting, double mixing_angle = 0.25 * constants::pi);

  const InteractionModel& interaction() const { return interaction_; }
  int channels() const { return static_cast<int>(thresholds_.size()); }
  PotentialKind kind() const { return kind_; }
  double wall() const { return wall_; }  // reduced units, 0 when absent
  double r_cut() const { return r_cut_; }  // reduced units
  double lambda(int spin) const { return lambdas_.at(spin); }
  double mixing_angle() const { return mixing_; }
  /// Channel thresholds in units of E_s.
  const std::vector<double>& thresholds() const { return thresholds_; }
  /// True when the channels do not interact (single channel or zero mixing/coupling).
  bool decoupled() const;

  /// Reduced base potential V(x)/E_s.
  double base_potential(double x) const;
  /// Short-range taper w(x).
  double taper(double x) const;
  /// Potential matrix (without centrifugal term and thresholds), units of E_s.
  ChannelMatrix potential(double x) const;
  /// W(x) = V(x) + l(l+1)/x^2 + thresholds - eps, so that u'' = W u.
  ChannelMatrix w_matrix(double x, double eps, int l) const;

  ChannelModel with_lambdas(double lambda_s, double lambda_t) const;

 private:
  ChannelModel(const InteractionModel& interaction) : interaction_(interaction) {}

  InteractionModel interaction_;
  PotentialKind kind_ = PotentialKind::ion_atom;
  double c6_reduced_ = 0.0;  // 2 C6 / R4^2
  double wall_ = 0.0;
  double r_cut_ = 0.0;
  double mixing_ = 0.0;
  std::vector<double> lambdas_;
  std::vector<double> thresholds_;
};

/// Default exit-channel splitting: one Bohr magneton times 4 G.
double default_splitting();

/// Reads scatter.* keys (lambda_s, lambda_t, splitting_uk, mixing_angle, r_cut_factor).
ChannelModel channel_model_from_config(const KeyValueConfig& cfg, const InteractionModel& interaction);

}  // namespace ionbath::scatter
