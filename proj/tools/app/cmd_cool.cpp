#include <cmath>
#include <optional>
#include <string>

#include "commands.hpp"
#include "ionbath/core/errors.hpp"
#include "ionbath/core/units.hpp"
#include "ionbath/mdsim/cooling_fit.hpp"
#include "ionbath/mdsim/histogram.hpp"
#include "ionbath/mdsim/sequence.hpp"

namespace ionbath::app {

namespace {

constexpr std::size_t kMinHistogramSamples = 100;

trapdyn::TrapMode md_mode(const KeyValueConfig& cfg) {
  const std::string mode = cfg.get_string("md.mode", "secular");
  if (mode == "secular") return trapdyn::TrapMode::secular_approximation;
  if (mode == "full_rf") return trapdyn::TrapMode::full_rf;
  throw ConfigError("md.mode must be 'secular' or 'full_rf', got '" + mode + "'");
}

}  // namespace

void cmd_cool(RunContext& ctx) {
  const KeyValueConfig& cfg = ctx.config();
  mdsim::EnsembleConfig ens;
  ens.bath = mdsim::bath_from_config(cfg);
  ens.bath.seed = ctx.seed();
  ens.trap = trapdyn::trap_from_config(cfg, md_mode(cfg));
  ens.workers = ctx.workers();
  mdsim::validate(ens.bath, ens.model);

  const mdsim::EnsembleResult res = mdsim::run_ensemble(ens, ens.bath.runs);
  const mdsim::CoolingCurve& curve = res.curve;

  io::Table table;
  table.header = {"collisions", "T_mean_uK", "T_sem_uK"};
  table.columns.resize(3);
  for (std::size_t i = 0; i < curve.collisions.size(); ++i) {
    table.columns[0].push_back(curve.collisions[i]);
    table.columns[1].push_back(curve.mean[i] * 1e6);
    table.columns[2].push_back(curve.sem[i] * 1e6);
  }

  const bool weighted = cfg.get_bool("cool.fit_weighted", true) && ens.bath.runs > 1;
  mdsim::CoolingFit fit = weighted ? mdsim::fit_cooling(curve.collisions, curve.mean, curve.sem)
                                   : mdsim::fit_cooling(curve.collisions, curve.mean);
  io::Table fitted = table;
  fitted.header.push_back("T_fit_uK");
  fitted.columns.emplace_back();
  for (double n : curve.collisions) fitted.columns.back().push_back(fit(n) * 1e6);
  ctx.write_table("cooling_curve.csv", fitted);

  // Plateau histogram of the total secular energy (three harmonic modes).
  const int start = static_cast<int>(std::lround(cfg.get_double("cool.histogram_fraction", 0.5) *
                                                 ens.bath.atoms_per_run));
  const int stride = static_cast<int>(cfg.get_int("cool.histogram_stride", 50));
  if (stride < 1) throw ConfigError("cool.histogram_stride must be >= 1");
  const std::vector<double> plateau = mdsim::plateau_energies(res.runs, start, stride);
  // Too few plateau samples (short runs) leave the histogram out rather than failing the run.
  std::optional<mdsim::EnergyHistogram> hist;
  if (plateau.size() >= kMinHistogramSamples) {
    hist = mdsim::energy_histogram(plateau, 3);
    io::Table htab;
    htab.header = {"E_low_uK", "E_high_uK", "count", "expected"};
    htab.columns.resize(4);
    for (std::size_t b = 0; b < hist->counts.size(); ++b) {
      htab.columns[0].push_back(units::joule_to_microkelvin(hist->edges[b]));
      htab.columns[1].push_back(units::joule_to_microkelvin(hist->edges[b + 1]));
      htab.columns[2].push_back(hist->counts[b]);
      htab.columns[3].push_back(hist->expected[b]);
    }
    ctx.write_table("histogram.csv", htab);
  }

  // Map simulated collisions onto laboratory time. By default the measured 1/e cooling time
  // sets gamma_cool = 1/tau and the atomic density follows from rho = N_L,eq / (tau K_L).
  // Giving md.atom_density_per_m3 instead predicts tau = N_L,eq / (rho K_L).
  const double rho_sim = mdsim::simulation_density(ens.bath.sphere_radius);
  const double n_l_eq = mdsim::langevin_collisions(fit, res.flux, rho_sim, ens.model);
  fit.N_L_eq = n_l_eq;
  std::string time_mapping;
  if (cfg.has("md.atom_density_per_m3")) {
    const double rho_exp = cfg.get_double("md.atom_density_per_m3");
    if (!(rho_exp > 0.0)) throw ConfigError("md.atom_density_per_m3 must be positive");
    fit.rho_at = rho_exp;
    fit.tau = n_l_eq / (rho_exp * langevin_rate_coeff(ens.model));
    time_mapping = "density";
  } else {
    const double tau_exp = cfg.get_double("md.cooling_time_ms", 244.0) * 1e-3;
    if (!(tau_exp > 0.0)) throw ConfigError("md.cooling_time_ms must be positive");
    fit.tau = tau_exp;
    fit.rho_at = mdsim::density_from_cooling(n_l_eq, tau_exp, ens.model);
    time_mapping = "cooling_time";
  }
  const double gamma_heat = cfg.get_double("md.gamma_heat_uk_per_s", 0.0) * 1e-6;
  const mdsim::HeatedCooling heated = mdsim::apply_heating(fit, gamma_heat);

  nlohmann::ordered_json j;
  j["mode"] = cfg.get_string("md.mode", "secular");
  j["runs"] = ens.bath.runs;
  j["atoms_per_run"] = ens.bath.atoms_per_run;
  j["weighted"] = weighted;
  j["T0_uK"] = fit.T0 * 1e6;
  j["T0_sigma_uK"] = fit.sigma_T0() * 1e6;
  j["T_inf_uK"] = fit.T_inf * 1e6;
  j["T_inf_sigma_uK"] = fit.sigma_T_inf() * 1e6;
  j["N_eq"] = fit.N_eq;
  j["N_eq_sigma"] = fit.sigma_N_eq();
  j["chi2"] = fit.chi2;
  j["dof"] = fit.dof;
  j["degenerate"] = fit.degenerate;
  j["atom_flux_per_s"] = res.flux;
  j["simulated_time_s"] = res.simulated_time;
  j["capped_atoms"] = res.capped_atoms;
  j["rho_sim_per_m3"] = rho_sim;
  j["N_L_eq"] = n_l_eq;
  j["time_mapping"] = time_mapping;
  j["rho_exp_per_m3"] = fit.rho_at;
  j["tau_s"] = fit.tau;
  j["gamma_heat_uK_per_s"] = gamma_heat * 1e6;
  j["heating_offset_uK"] = heated.offset() * 1e6;
  j["T_final_uK"] = heated.final_temperature() * 1e6;
  if (hist) {
    j["histogram"] = {{"samples", plateau.size()},
                      {"T_uK", hist->temperature * 1e6},
                      {"T_sigma_uK", hist->temperature_sigma * 1e6},
                      {"chi2", hist->chi2},
                      {"dof", hist->dof},
                      {"p_value", hist->p_value},
                      {"thermal", hist->thermal()}};
  } else {
    j["histogram"] = {{"samples", plateau.size()}, {"status", "skipped: fewer than 100 plateau samples"}};
  }
  ctx.write_json("cooling_fit.json", j);
}

}  // namespace ionbath::app
