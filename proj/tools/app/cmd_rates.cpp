#include "commands.hpp"
#include "ionbath/core/errors.hpp"
#include "ionbath/core/units.hpp"
#include "ionbath/scatter/rates.hpp"
#include "ionbath/scatter/scattering_length.hpp"

namespace ionbath::app {

void cmd_rates(RunContext& ctx) {
  const KeyValueConfig& cfg = ctx.config();
  const InteractionModel im = InteractionModel::li_yb();

  // Scattering lengths (units of R4) select the potential scales; explicit scales win.
  nlohmann::ordered_json tuning = nlohmann::ordered_json::object();
  KeyValueConfig model_cfg = cfg;
  for (const auto& [spin, a_key, l_key] : {std::tuple{"singlet", "scatter.a_s", "scatter.lambda_s"},
                                          std::tuple{"triplet", "scatter.a_t", "scatter.lambda_t"}}) {
    if (cfg.has(l_key) || !cfg.has(a_key)) continue;
    const scatter::TuneResult t = scatter::tune_scaling(im, cfg.get_double(a_key));
    model_cfg.set(l_key, t.lambda);
    tuning[spin] = {{"a_R4", t.reduced},
                    {"lambda", t.lambda},
                    {"bound_states", t.bound_states},
                    {"bound_states_crossed", t.bound_states_crossed}};
  }
  const scatter::ChannelModel model = scatter::channel_model_from_config(model_cfg, im);

  scatter::RateOptions opts;
  opts.l_max = static_cast<int>(cfg.get_int("rates.l_max", 10));
  opts.numerov.steps_per_wavelength = cfg.get_double("rates.steps_per_wavelength", 40.0);
  opts.workers = ctx.workers();
  const int points = static_cast<int>(cfg.get_int("rates.points", 24));
  const std::vector<double> energies =
      scatter::log_energy_grid(units::microkelvin_to_joule(cfg.get_double("rates.e_min_uk", 0.1)),
                               units::microkelvin_to_joule(cfg.get_double("rates.e_max_uk", 200.0)), points);
  const scatter::RateCurve curve = scatter::rate_constant(model, energies, opts);
  const double k_l = langevin_rate_coeff(im);

  io::Table table = curve.table();
  table.header.insert(table.header.begin() + 2, "K_over_KL");
  std::vector<double> ratio;
  for (double k : curve.rate) ratio.push_back(k / k_l);
  table.columns.insert(table.columns.begin() + 2, ratio);
  ctx.write_table("rates.csv", table);

  nlohmann::ordered_json j;
  j["lambda_s"] = model.lambda(0);
  j["lambda_t"] = model.lambda(1);
  j["tuning"] = tuning;
  j["splitting_uK"] = units::joule_to_microkelvin(-model.thresholds().back() * im.s_wave_energy());
  j["mixing_angle"] = model.mixing_angle();
  j["K_langevin_m3s"] = k_l;
  j["R4_nm"] = im.r4() * 1e9;
  j["E_s_uK"] = units::joule_to_microkelvin(im.s_wave_energy());
  j["l_max"] = curve.l_max;
  j["l_max_fraction"] = curve.l_max_fraction;
  j["worst_unitarity"] = curve.worst_unitarity;
  j["worst_asymmetry"] = curve.worst_asymmetry;
  j["warnings"] = curve.warnings;
  ctx.write_json("rates.json", j);
}

}  // namespace ionbath::app
