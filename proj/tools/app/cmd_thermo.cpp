#include <cmath>

#include "commands.hpp"
#include "ionbath/core/errors.hpp"
#include "ionbath/core/units.hpp"
#include "ionbath/thermometry/doppler.hpp"
#include "ionbath/thermometry/micromotion.hpp"
#include "ionbath/thermometry/rabi.hpp"

namespace ionbath::app {

namespace {

// Reads a data file and checks the required columns, naming the file on failure.
io::Table read_dataset(const std::string& path, const std::vector<std::string>& required) {
  if (!std::filesystem::exists(path)) throw ConfigError("data file '" + path + "' not found");
  io::Table t = io::read_table(path, required.size());
  for (const std::string& name : required) {
    try {
      (void)t.column(name);
    } catch (const ConfigError&) {
      throw ConfigError(path + ": missing required column '" + name + "'");
    }
  }
  return t;
}

std::vector<double> optional_column(const io::Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == name) return t.columns[i];
  }
  return {};
}

nlohmann::ordered_json rabi_report(RunContext& ctx) {
  const KeyValueConfig& cfg = ctx.config();
  const std::string path = cfg.get_string("thermo.rabi_data");
  const io::Table data = read_dataset(path, {"t_us", "P"});
  std::vector<double> t = data.column("t_us");
  for (double& v : t) v *= 1e-6;
  const std::vector<double>& p = data.column("P");
  const std::vector<double> sigma = optional_column(data, "sigma");

  const double omega = units::khz_to_angular(cfg.get_double("thermo.rabi_mode_khz", 210.0));
  const double omega0_guess = units::khz_to_angular(cfg.get_double("thermo.rabi_omega0_khz", 0.0));
  const thermometry::RabiConfig rc =
      thermometry::radial_rabi_config(omega0_guess, omega, cfg.get_double("thermo.contrast", 0.83));
  const thermometry::RabiFit fit = thermometry::fit_nbar(t, p, rc, sigma);

  io::Table curve;
  curve.header = {"t_us", "P", "P_fit"};
  curve.columns.resize(3);
  thermometry::RabiConfig best = rc;
  best.omega0 = fit.omega0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    curve.columns[0].push_back(t[i] * 1e6);
    curve.columns[1].push_back(p[i]);
    curve.columns[2].push_back(thermometry::rabi_signal(t[i], fit.nbar, best));
  }
  ctx.write_table("rabi_curve.csv", curve);

  nlohmann::ordered_json j;
  j["data"] = std::filesystem::path(path).filename().string();
  j["mode_khz"] = cfg.get_double("thermo.rabi_mode_khz", 210.0);
  j["nbar"] = fit.nbar;
  j["nbar_sigma"] = fit.sigma_nbar();
  j["omega0_khz"] = fit.omega0 / units::khz_to_angular(1.0);
  j["T_uK"] = fit.temperature * 1e6;
  j["T_sigma_uK"] = fit.temperature_sigma * 1e6;
  j["chi2"] = fit.chi2;
  j["dof"] = fit.dof;
  return j;
}

nlohmann::ordered_json doppler_report(RunContext& ctx) {
  const KeyValueConfig& cfg = ctx.config();
  const std::string path = cfg.get_string("thermo.doppler_data");
  const io::Table data = read_dataset(path, {"detuning_khz", "P"});
  std::vector<double> det = data.column("detuning_khz");
  for (double& v : det) v *= 1e3;
  const std::vector<double>& p = data.column("P");
  const std::vector<double> sigma = optional_column(data, "sigma");
  const thermometry::DopplerFit fit =
      thermometry::doppler_fit(det, p, Species::yb171_ion(), constants::yb_411_wavelength, sigma);

  io::Table curve;
  curve.header = {"detuning_khz", "P", "P_fit"};
  curve.columns.resize(3);
  for (std::size_t i = 0; i < det.size(); ++i) {
    const double z = (det[i] - fit.center) / fit.sigma;
    curve.columns[0].push_back(det[i] * 1e-3);
    curve.columns[1].push_back(p[i]);
    curve.columns[2].push_back(fit.offset + fit.amplitude * std::exp(-0.5 * z * z));
  }
  ctx.write_table("doppler_curve.csv", curve);

  nlohmann::ordered_json j;
  j["data"] = std::filesystem::path(path).filename().string();
  j["sigma_khz"] = fit.sigma * 1e-3;
  j["sigma_sigma_khz"] = fit.sigma_sigma() * 1e-3;
  j["center_khz"] = fit.center * 1e-3;
  j["T_uK"] = fit.temperature * 1e6;
  j["T_sigma_uK"] = fit.temperature_sigma * 1e6;
  return j;
}

nlohmann::ordered_json micromotion_report(const KeyValueConfig& cfg) {
  const double carrier = units::khz_to_angular(cfg.get_double("thermo.carrier_rabi_khz", 39.0));
  const double sideband = units::khz_to_angular(cfg.get_double("thermo.sideband_rabi_khz", 28.3));
  const double beta = thermometry::beta_from_ratio(carrier, sideband);
  const double rf = units::mhz_to_angular(cfg.get_double("trap.rf_drive_mhz", 1.85));
  const double k = constants::two_pi / constants::yb_411_wavelength * cfg.get_double("thermo.k_projection", 1.0);
  const double v_comp = cfg.get_double("thermo.compensation_v", 7.0);
  const double emm = thermometry::emm_from_beta(beta, k, rf);
  const double field = units::millivolt_per_meter(cfg.get_double("thermo.stray_field_bound_mvm", 50.0));

  nlohmann::ordered_json j;
  j["beta"] = beta;
  j["emm_uK"] = units::joule_to_microkelvin(emm);
  j["compensation_v"] = v_comp;
  j["emm_per_volt2_uK"] = units::joule_to_microkelvin(thermometry::emm_per_volt_squared(beta, v_comp, k, rf));
  nlohmann::ordered_json stray = nlohmann::ordered_json::array();
  for (double f_khz : {210.0, 330.0}) {
    stray.push_back({{"omega_khz", f_khz},
                     {"field_mvm", field * 1e3},
                     {"emm_uK", units::joule_to_microkelvin(
                                    thermometry::emm_from_dc_field(field, units::khz_to_angular(f_khz)))}});
  }
  j["stray_field_bound"] = stray;
  return j;
}

}  // namespace

void cmd_thermo(RunContext& ctx) {
  const KeyValueConfig& cfg = ctx.config();
  if (cfg.has("thermo.rabi_data")) ctx.write_json("rabi_fit.json", rabi_report(ctx));
  if (cfg.has("thermo.doppler_data")) ctx.write_json("doppler_fit.json", doppler_report(ctx));
  ctx.write_json("micromotion.json", micromotion_report(cfg));
}

}  // namespace ionbath::app
