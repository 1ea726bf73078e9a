#include <cmath>
#include <random>

#include "commands.hpp"
#include "ionbath/core/errors.hpp"
#include "ionbath/core/units.hpp"
#include "ionbath/spinx/rate_table.hpp"
#include "ionbath/spinx/spin_fit.hpp"

namespace ionbath::app {

namespace {

spinx::EnergyLabel label_from(const KeyValueConfig& cfg) {
  const std::string l = cfg.get_string("spinfit.energy_label", "maximum");
  if (l == "maximum") return spinx::EnergyLabel::maximum;
  if (l == "mean") return spinx::EnergyLabel::mean;
  throw ConfigError("spinfit.energy_label must be 'maximum' or 'mean', got '" + l + "'");
}

// Synthetic spin-flip data: the model at the injected parameters plus Gaussian
// projection noise of `shots` shots per point.
spinx::SpinDataset synthetic_dataset(const KeyValueConfig& cfg, const spinx::RateModel& model,
                                     const spinx::SpinFitOptions& opts, std::uint64_t seed) {
  spinx::SpinDataset d;
  for (double e : parse_list(cfg, "spinfit.emm_uk")) {
    d.mean_emm.push_back(units::microkelvin_to_joule(e));
    d.s.push_back(0.0);
    d.sigma.push_back(1.0);
  }
  const std::vector<double> truth =
      spinx::predict_spin(d, model, cfg.get_double("spinfit.truth_a_s", 1.2), cfg.get_double("spinfit.truth_a_t", -1.5),
                          cfg.get_double("spinfit.truth_n_l", 1.2), opts);
  const double shots = cfg.get_double("spinfit.shots_per_point", 40.0);
  if (!(shots >= 1.0)) throw ConfigError("spinfit.shots_per_point must be >= 1");
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double p = std::clamp(truth[i], 1.0 / shots, 1.0 - 1.0 / shots);
    d.sigma[i] = std::sqrt(p * (1.0 - p) / shots);
    d.s[i] = truth[i] + std::normal_distribution<double>(0.0, d.sigma[i])(rng);
  }
  return d;
}

}  // namespace

void cmd_spinfit(RunContext& ctx) {
  const KeyValueConfig& cfg = ctx.config();
  const InteractionModel im = InteractionModel::li_yb();
  const double k_l = langevin_rate_coeff(im);

  spinx::SpinFitOptions opts;
  opts.a_min = cfg.get_double("spinfit.a_min", -3.0);
  opts.a_max = cfg.get_double("spinfit.a_max", 3.0);
  opts.a_step = cfg.get_double("spinfit.a_step", 0.1);
  opts.offset = units::microkelvin_to_joule(cfg.get_double("spinfit.offset_uk", 20.0));
  opts.energy_weight = im.ion_weight();
  opts.k_langevin = k_l;
  opts.n_max = cfg.get_double("spinfit.n_max", 50.0);
  opts.p_level = cfg.get_double("spinfit.p_level", 0.05);
  opts.workers = ctx.workers();
  opts.label = label_from(cfg);

  const std::string kind = cfg.get_string("spinfit.model", "table");
  spinx::RateTable table;
  spinx::RateModel model;
  nlohmann::ordered_json model_json;
  if (kind == "constant") {
    // Classical capture: every Langevin collision exchanges spin with a fixed probability.
    const double k = cfg.get_double("spinfit.constant_fraction", 0.5) * k_l;
    model = [k](double, double, double) { return k; };
    model_json = {{"kind", kind}, {"K_m3s", k}};
  } else if (kind == "table") {
    spinx::RateTableSpec spec;
    spec.a_min = opts.a_min;
    spec.a_max = opts.a_max;
    spec.a_step = opts.a_step;
    spec.e_min = units::microkelvin_to_joule(cfg.get_double("spinfit.e_min_uk", 0.3));
    spec.e_max = units::microkelvin_to_joule(cfg.get_double("spinfit.e_max_uk", 150.0));
    spec.energy_points = static_cast<int>(cfg.get_int("spinfit.energy_points", 16));
    if (cfg.has("scatter.splitting_uk")) spec.splitting = units::microkelvin_to_joule(cfg.get_double("scatter.splitting_uk"));
    spec.mixing_angle = cfg.get_double("scatter.mixing_angle", spec.mixing_angle);
    spec.rates.l_max = static_cast<int>(cfg.get_int("rates.l_max", 10));
    spec.workers = ctx.workers();
    std::filesystem::path cache;
    if (cfg.get_bool("spinfit.cache", true)) {
      cache = ctx.cache_dir() / spec.cache_name(im);
    }
    table = spinx::build_rate_table(im, spec, cache);
    model = [&table](double e, double a_s, double a_t) { return table.rate(e, a_s, a_t); };
    model_json = {{"kind", kind},
                  {"grid_points", table.a_grid().size()},
                  {"energy_points", table.energies().size()}};
  } else {
    throw ConfigError("spinfit.model must be 'table' or 'constant', got '" + kind + "'");
  }

  spinx::SpinDataset data;
  if (cfg.has("spinfit.data")) {
    data = spinx::read_spin_dataset(cfg.get_string("spinfit.data"));
  } else if (cfg.get_bool("spinfit.synthetic", false)) {
    data = synthetic_dataset(cfg, model, opts, ctx.seed());
  } else {
    throw ConfigError("spinfit needs spinfit.data or spinfit.synthetic = true");
  }
  ctx.write_table("spin_data.csv", spinx::spin_dataset_table(data));

  spinx::SpinFitResult result;
  std::string status = "ok";
  try {
    result = spinx::fit_spin(data, model, opts);
  } catch (const spinx::DegenerateFitError& e) {
    result = e.result();
    status = e.what();
  }

  io::Table curve;
  curve.header = {"E_eMM_uK", "E_label_uK", "S", "sigma", "S_fit"};
  curve.columns.resize(5);
  for (std::size_t i = 0; i < data.size(); ++i) {
    curve.columns[0].push_back(units::joule_to_microkelvin(data.mean_emm[i]));
    curve.columns[1].push_back(units::joule_to_microkelvin(result.labels.at(i)));
    curve.columns[2].push_back(data.s[i]);
    curve.columns[3].push_back(data.sigma[i]);
    curve.columns[4].push_back(result.predicted.at(i));
  }
  ctx.write_table("spin_curve.csv", curve);
  ctx.write_table("chi2_surface.csv", result.surface_table());

  nlohmann::ordered_json j;
  j["status"] = status;
  j["model"] = model_json;
  j["a_s_R4"] = result.a_s;
  j["a_t_R4"] = result.a_t;
  j["n_l"] = result.n_l;
  j["chi2"] = result.chi2;
  j["dof"] = result.dof;
  j["p_value"] = result.p_value;
  j["region"] = {{"p_level", opts.p_level},
                 {"chi2_threshold", result.region_threshold},
                 {"nodes", result.region_nodes},
                 {"a_s_R4", {result.a_s_min, result.a_s_max}},
                 {"a_t_R4", {result.a_t_min, result.a_t_max}},
                 {"n_l", {result.n_l_min, result.n_l_max}}};
  j["energy_independent"] = result.energy_independent;
  j["degenerate"] = result.degenerate;
  if (cfg.get_bool("spinfit.synthetic", false) && !cfg.has("spinfit.data")) {
    const double ts = cfg.get_double("spinfit.truth_a_s", 1.2), tt = cfg.get_double("spinfit.truth_a_t", -1.5);
    const double tn = cfg.get_double("spinfit.truth_n_l", 1.2);
    // The region is the set of (a_S, a_T, n_L) whose chi2 stays below the threshold.
    const double chi2_truth = spinx::chi2(data.s, data.sigma, spinx::predict_spin(data, model, ts, tt, tn, opts));
    j["truth"] = {{"a_s_R4", ts},
                  {"a_t_R4", tt},
                  {"n_l", tn},
                  {"chi2", chi2_truth},
                  {"inside_region", chi2_truth <= result.region_threshold},
                  {"inside_projected_region", result.contains(ts, tt)}};
  }
  ctx.write_json("spinfit.json", j);
}

}  // namespace ionbath::app
