// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Argument: scratch directory for command outputs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <nlohmann/json.hpp>

#include "app/commands.hpp"
#include "app/run_context.hpp"
#include "ionbath/core/budget.hpp"
#include "ionbath/core/units.hpp"
#include "ionbath/scatter/channel_model.hpp"
#include "ionbath/scatter/classical_capture.hpp"
#include "ionbath/scatter/scattering_length.hpp"
#include "ionbath/scatter/smatrix.hpp"
#include "ionbath/spinx/emm_distribution.hpp"
#include "ionbath/thermometry/doppler.hpp"
#include "ionbath/thermometry/micromotion.hpp"
#include "ionbath/thermometry/rabi.hpp"

namespace fs = std::filesystem;
using namespace ionbath;

namespace {

fs::path g_root;

/// Collects the individual checks of one criterion.
class Criterion {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok) failed_.push_back(what);
    notes_.push_back(what + (ok ? "" : " [x]"));
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool passed() const { return failed_.empty(); }
  std::string summary() const {
    std::string s;
    for (const auto& n : notes_) s += (s.empty() ? "" : "; ") + n;
    return s;
  }

 private:
  std::vector<std::string> notes_;
  std::vector<std::string> failed_;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

/// |value - reference| within half a unit of the reference's last quoted digit.
bool rounds_to(double value, double reference, double last_digit) {
  return std::abs(value - reference) <= 0.5 * last_digit + 1e-12;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

fs::path run_command(const std::string& command, const std::vector<std::string>& overrides, const std::string& name,
                     std::optional<std::uint64_t> seed = {}) {
  app::RunRequest req;
  req.command = command;
  req.overrides = overrides;
  req.seed = seed;
  req.out = (g_root / name).string();
  auto ctx = app::make_context(req);
  app::dispatch(*ctx);
  return ctx->out_dir();
}

double uk(double joule) { return units::joule_to_microkelvin(joule); }

// --- criteria ---------------------------------------------------------------

void thermalization(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path out = run_command("cool", {"md.mode=secular"}, "cool_secular");
  const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
  const auto j = load_json(out / "cooling_fit.json");
  const double t_inf = j["T_inf_uK"].get<double>();
  c.check(t_inf >= 8.0 && t_inf <= 13.0, "T_inf = " + fmt(t_inf) + "(" + fmt(j["T_inf_sigma_uK"].get<double>(), 2) +
                                             ") uK in [8, 13]");
  c.note("N_eq = " + fmt(j["N_eq"].get<double>()) + " collisions of " + fmt(j["atoms_per_run"].get<double>()));
  c.check(minutes <= 10.0, "runtime " + fmt(minutes, 3) + " min <= 10");
}

void rf_plateau(Criterion& c) {
  const fs::path out = run_command("cool", {"md.mode=full_rf"}, "cool_full_rf");
  const auto j = load_json(out / "cooling_fit.json");
  const double t_inf = j["T_inf_uK"].get<double>();
  c.check(t_inf >= 30.0 && t_inf <= 60.0,
          "T_inf = " + fmt(t_inf) + "(" + fmt(j["T_inf_sigma_uK"].get<double>(), 2) + ") uK in [30, 60]");
  const double offset = j["heating_offset_uK"].get<double>();
  c.check(std::abs(offset - 20.0) <= 5.0, "heating offset " + fmt(offset, 3) + " uK ~ 20");
}

void energy_ledger(Criterion& c) {
  const fs::path out = run_command("budget", {}, "budget");
  const auto j = load_json(out / "budget.json");
  const double ion = j["ion_kinetic"]["value"], ion_s = j["ion_kinetic"]["sigma"];
  const double col = j["total_collision"]["value"], col_s = j["total_collision"]["sigma"];
  const double ratio = j["collision_to_s_wave_ratio"];
  c.check(rounds_to(ion, 193, 1) && rounds_to(ion_s, 42, 1), "ion " + fmt(ion) + "(" + fmt(ion_s, 3) + ") uK");
  c.check(rounds_to(col, 9.9, 0.1) && rounds_to(col_s, 2.0, 0.1),
          "collision " + fmt(col, 3) + "(" + fmt(col_s, 3) + ") uK");
  c.check(rounds_to(ratio, 1.15, 0.01), "ratio " + fmt(ratio));
  const InteractionModel m = InteractionModel::li_yb();
  const double r4 = std::sqrt(m.reduced_mass() * m.c4()) / constants::hbar;
  const double es = uk(constants::hbar * constants::hbar / (2.0 * m.reduced_mass() * r4 * r4));
  c.check(std::abs(es / 8.6 - 1.0) <= 0.02, "E_s = " + fmt(es) + " uK");
}

void thermometry_round_trips(Criterion& c) {
  using namespace thermometry;
  const double t330 = temperature_from_nbar(5.8, units::khz_to_angular(330.0)) * 1e6;
  const double t210 = temperature_from_nbar(3.7, units::khz_to_angular(210.0)) * 1e6;
  const double td = doppler_temperature(193e3, Species::yb171_ion().mass) * 1e6;
  const double beta = beta_from_ratio(39.0, 28.3);
  const double stray = uk(emm_from_dc_field(0.05, units::khz_to_angular(210.0)));
  c.check(rounds_to(t330, 98, 1), "nbar 5.8 @ 330 kHz -> " + fmt(t330) + " uK vs 98");
  c.check(rounds_to(t210, 42, 1), "nbar 3.7 @ 210 kHz -> " + fmt(t210) + " uK");
  c.check(rounds_to(td, 130, 10), "193 kHz -> " + fmt(td) + " uK");
  c.check(std::abs(beta - 1.18) <= 0.01, "beta " + fmt(beta, 5));
  c.check(rounds_to(stray, 4.7, 0.1), "stray field " + fmt(stray, 3) + " uK");
}

void scattering(Criterion& c) {
  using namespace scatter;
  const InteractionModel m = InteractionModel::li_yb();
  NumerovOptions fine;
  fine.steps_per_wavelength = 400.0;

  double unitarity = 0.0, asym = 0.0;
  const ChannelModel two = ChannelModel::two_spin(m, 1.003, 0.998, default_splitting());
  for (int l : {0, 1, 3, 6}) {
    for (double eps : {0.05, 1.0, 10.0}) {
      const ScatteringResult r = solve_scattering(two, eps, l, fine);
      unitarity = std::max(unitarity, r.unitarity_error);
      asym = std::max(asym, r.k_asymmetry);
    }
  }
  c.check(unitarity <= 1e-8 && asym <= 1e-8, "unitarity " + fmt(unitarity, 2) + ", symmetry " + fmt(asym, 2));

  double phase = 0.0;
  const ChannelModel free = ChannelModel::free(m);
  const double a = 0.5;
  const ChannelModel hard = ChannelModel::hard_sphere(m, a * m.r4());
  for (int l : {0, 1, 2}) {
    for (double eps : {0.1, 2.0, 8.0}) {
      phase = std::max(phase, std::abs(solve_scattering(free, eps, l, fine).phase_shift()));
      const double ka = std::sqrt(eps) * a;
      double d = solve_scattering(hard, eps, l, fine).phase_shift() -
                 std::atan(boost::math::sph_bessel(l, ka) / boost::math::sph_neumann(l, ka));
      d = std::remainder(d, constants::pi);
      phase = std::max(phase, std::abs(d));
    }
  }
  c.check(phase <= 1e-6, "phase-shift oracles " + fmt(phase, 2));

  double a_err = 0.0;
  for (double wall : {0.05, 0.08, 0.13}) {
    const ScatteringLength sl = zero_energy_scattering_length(ChannelModel::hard_sphere(m, wall * m.r4(), true), fine);
    a_err = std::max(a_err, std::abs(sl.reduced - 1.0 / std::tan(1.0 / wall)));
  }
  c.check(a_err <= 1e-3, "zero-energy 1/r^4 oracle " + fmt(a_err, 2) + " R4");

  double worst = 0.0;
  for (double t : {5.0, 15.0, 50.0}) {
    const CaptureResult r = classical_capture(m, units::microkelvin_to_joule(t));
    worst = std::max(worst, std::abs(r.rate / langevin_rate_coeff(m) - 1.0));
  }
  c.check(worst <= 0.02, "classical capture vs K_L " + fmt(100.0 * worst, 2) + "% over 5-50 uK");
}

void spin_exchange(Criterion& c) {
  using namespace spinx;
  const double kuk = units::microkelvin_to_joule(1.0);
  // The density is scale-free: integrate the zero-offset law in units of E_bar over the
  // lower half (E - E0 exact at the singularity) and use its mirror symmetry.
  const EmmDistribution unit{1.0, 0.0};
  boost::math::quadrature::tanh_sinh<double> q;
  const double half = q.integrate([&](double e) { return emm_pdf(e, unit); }, 0.0, 1.0);
  const double mean = q.integrate([&](double e) { return e * emm_pdf(e, unit); }, 0.0, 1.0) +
                      q.integrate([&](double e) { return (2.0 - e) * emm_pdf(e, unit); }, 0.0, 1.0);
  double mirror = 0.0;
  for (double x : {0.01, 0.3, 0.77}) mirror = std::max(mirror, std::abs(emm_pdf(1.0 + x, unit) / emm_pdf(1.0 - x, unit) - 1.0));
  c.check(std::abs(2.0 * half - 1.0) <= 1e-9 && std::abs(mean - 1.0) <= 1e-9 && mirror <= 1e-9,
          "arcsine norm-1 " + fmt(2.0 * half - 1.0, 2) + ", mean/E_bar-1 " + fmt(mean - 1.0, 2));
  const EmmDistribution d{150.0 * kuk, 20.0 * kuk};
  const double k = 2.7e-15;
  c.check(convolve_rate([k](double) { return k; }, d) == k, "constant-rate convolution exact");

  int inside = 0;
  const int trials = 20;
  for (int s = 1; s <= trials; ++s) {
    const fs::path out = run_command("spinfit", {"spinfit.cache=true"}, "spinfit_seed" + std::to_string(s),
                                     static_cast<std::uint64_t>(s));
    const auto j = load_json(out / "spinfit.json");
    if (j["truth"]["inside_region"].get<bool>()) ++inside;
  }
  c.check(inside >= 19, "closed loop: truth inside the 95% region in " + std::to_string(inside) + "/" +
                            std::to_string(trials) + " trials");

  const fs::path out = run_command("spinfit", {"spinfit.model=constant"}, "spinfit_constant");
  const auto j = load_json(out / "spinfit.json");
  c.check(j["energy_independent"].get<bool>(), "constant-K model predicts energy-independent S");
}

void determinism(Criterion& c) {
  // Fresh runs of every command, then replays from the manifests.
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
      {"cool", {"bath.runs=4", "bath.atoms_per_run=300"}},
      {"thermo", {}},
      {"budget", {}},
      {"rates", {"rates.points=6"}},
      {"spinfit", {"spinfit.cache=true"}},
  };
  for (const auto& [command, overrides] : runs) {
    const fs::path out = run_command(command, overrides, "det_" + command);
    auto ctx = app::context_from_manifest(out / "manifest.txt", (g_root / ("det_" + command + "_replay")).string(), 0);
    app::dispatch(*ctx);
    int files = 0, same = 0;
    for (const auto& entry : fs::directory_iterator(out)) {
      const std::string ext = entry.path().extension().string();
      if (ext != ".csv" && ext != ".json") continue;
      ++files;
      if (slurp(entry.path()) == slurp(ctx->out_dir() / entry.path().filename())) ++same;
    }
    c.check(files > 0 && same == files, command + " " + std::to_string(same) + "/" + std::to_string(files));
  }
}

}  // namespace

int main(int argc, char** argv) {
  g_root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "ionbath_acceptance";
  fs::create_directories(g_root);

  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria = {
      {"thermalization (secular, desk)", thermalization},
      {"micromotion-limited plateau (full RF)", rf_plateau},
      {"energy ledger", energy_ledger},
      {"thermometry round trips", thermometry_round_trips},
      {"scattering properties", scattering},
      {"spin-exchange pipeline", spin_exchange},
      {"determinism", determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Criterion c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.check(false, std::string("error: ") + e.what());
    }
    if (!c.passed()) ++failures;
    std::cout << (c.passed() ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << c.summary()
              << std::endl;
  }
  std::cout << criteria.size() - failures << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
