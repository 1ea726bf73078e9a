#include "ionbath/scatter/channel_model.hpp"

#include <cmath>

#include "ionbath/core/errors.hpp"
#include "ionbath/core/units.hpp"

namespace ionbath::scatter {

namespace {
double reduced_c6(const InteractionModel& m) { return 2.0 * m.c6() / (m.r4() * m.r4()); }
double reduced_r_cut(const InteractionModel& m) { return 30.0 * m.potential_minimum() / m.r4(); }
}  // namespace

double default_splitting() { return constants::bohr_magneton * 4e-4; }

ChannelModel ChannelModel::single(const InteractionModel& interaction, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("potential scale must be positive");
  ChannelModel m(interaction);
  m.kind_ = PotentialKind::ion_atom;
  m.c6_reduced_ = reduced_c6(interaction);
  m.r_cut_ = reduced_r_cut(interaction);
  m.lambdas_ = {lambda};
  m.thresholds_ = {0.0};
  return m;
}

ChannelModel ChannelModel::free(const InteractionModel& interaction) {
  ChannelModel m(interaction);
  m.kind_ = PotentialKind::free;
  m.lambdas_ = {1.0};
  m.thresholds_ = {0.0};
  return m;
}

ChannelModel ChannelModel::hard_sphere(const InteractionModel& interaction, double radius, bool with_c4) {
  if (!(radius > 0.0)) throw DomainError("hard-sphere radius must be positive");
  ChannelModel m(interaction);
  m.kind_ = with_c4 ? PotentialKind::pure_c4 : PotentialKind::free;
  m.wall_ = radius / interaction.r4();
  m.lambdas_ = {1.0};
  m.thresholds_ = {0.0};
  return m;
}

ChannelModel ChannelModel::two_spin(const InteractionModel& interaction, double lambda_s, double lambda_t,
                                    double splitting, double mixing_angle) {
  if (!(lambda_s > 0.0) || !(lambda_t > 0.0)) throw DomainError("potential scales must be positive");
  if (splitting < 0.0) throw DomainError("threshold splitting must be >= 0");
  ChannelModel m(interaction);
  m.kind_ = PotentialKind::ion_atom;
  m.c6_reduced_ = reduced_c6(interaction);
  m.r_cut_ = reduced_r_cut(interaction);
  m.lambdas_ = {lambda_s, lambda_t};
  m.mixing_ = mixing_angle;
  m.thresholds_ = {0.0, -splitting / interaction.s_wave_energy()};
  return m;
}

ChannelModel ChannelModel::with_lambdas(double lambda_s, double lambda_t) const {
  if (!(lambda_s > 0.0) || !(lambda_t > 0.0)) throw DomainError("potential scales must be positive");
  ChannelModel m = *this;
  if (m.lambdas_.size() == 1) {
    m.lambdas_ = {lambda_s};
  } else {
    m.lambdas_ = {lambda_s, lambda_t};
  }
  return m;
}

bool ChannelModel::decoupled() const {
  if (channels() == 1) return true;
  const double s = std::sin(mixing_), c = std::cos(mixing_);
  return std::abs(s * c) < 1e-15 || lambdas_[0] == lambdas_[1];
}

double ChannelModel::base_potential(double x) const {
  switch (kind_) {
    case PotentialKind::free:
      return 0.0;
    case PotentialKind::pure_c4:
      return -1.0 / (x * x * x * x);
    case PotentialKind::ion_atom: {
      const double x2 = x * x;
      const double x4 = x2 * x2;
      return -1.0 / x4 + c6_reduced_ / (x4 * x2);
    }
  }
  return 0.0;
}

double ChannelModel::taper(double x) const {
  if (r_cut_ <= 0.0) return 1.0;
  const double inner = 0.5 * r_cut_;
  if (x <= inner) return 1.0;
  if (x >= r_cut_) return 0.0;
  const double s = (x - inner) / (r_cut_ - inner);
  const double c = std::cos(0.5 * constants::pi * s);
  return c * c;
}

ChannelMatrix ChannelModel::potential(double x) const {
  const int n = channels();
  ChannelMatrix v = ChannelMatrix::Zero(n, n);
  const double base = base_potential(x);
  if (n == 1) {
    v(0, 0) = base * (1.0 + (lambdas_[0] - 1.0) * taper(x));
    return v;
  }
  const double w = taper(x);
  const double vs = base * (1.0 + (lambdas_[0] - 1.0) * w);
  const double vt = base * (1.0 + (lambdas_[1] - 1.0) * w);
  const double s = std::sin(mixing_), c = std::cos(mixing_);
  v(0, 0) = c * c * vs + s * s * vt;
  v(1, 1) = s * s * vs + c * c * vt;
  v(0, 1) = v(1, 0) = s * c * (vs - vt);
  return v;
}

ChannelMatrix ChannelModel::w_matrix(double x, double eps, int l) const {
  ChannelMatrix w = potential(x);
  const double cent = l == 0 ? 0.0 : l * (l + 1.0) / (x * x);
  for (int i = 0; i < channels(); ++i) w(i, i) += cent + thresholds_[i] - eps;
  return w;
}

ChannelModel channel_model_from_config(const KeyValueConfig& cfg, const InteractionModel& interaction) {
  const double ls = cfg.get_double("scatter.lambda_s", 1.0);
  const double lt = cfg.get_double("scatter.lambda_t", 1.0);
  const double splitting = cfg.has("scatter.splitting_uk")
                               ? units::microkelvin_to_joule(cfg.get_double("scatter.splitting_uk"))
                               : default_splitting();
  const double mixing = cfg.get_double("scatter.mixing_angle", 0.25 * constants::pi);
  return ChannelModel::two_spin(interaction, ls, lt, splitting, mixing);
}

}  // namespace ionbath::scatter
