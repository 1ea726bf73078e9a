#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "ionbath_test_cli";

int run(const std::string& args) {
  const std::string cmd = std::string(IONBATH_CLI) + " " + args + " > " + (kScratch / "last.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

fs::path out(const std::string& name) { return kScratch / name; }

std::string out_arg(const std::string& name) { return "--out " + out(name).string(); }

struct Scratch {
  Scratch() {
    fs::remove_all(kScratch);
    fs::create_directories(kScratch);
  }
};

}  // namespace

TEST_CASE_FIXTURE(Scratch, "budget defaults and unit round trip") {
  REQUIRE(run("budget " + out_arg("uk")) == 0);
  const auto j = load_json(out("uk") / "budget.json");
  CHECK(j["unit"] == "uK");
  CHECK(j["ion_kinetic"]["value"].get<double>() == doctest::Approx(193.0).epsilon(0.005));
  CHECK(j["ion_kinetic"]["sigma"].get<double>() == doctest::Approx(42.3).epsilon(0.01));
  CHECK(j["total_collision"]["value"].get<double>() == doctest::Approx(9.89).epsilon(0.005));
  CHECK(j["collision_to_s_wave_ratio"].get<double>() == doctest::Approx(1.153).epsilon(0.005));
  CHECK(fs::exists(out("uk") / "table1.csv"));
  CHECK(fs::exists(out("uk") / "table2.csv"));
  CHECK(fs::exists(out("uk") / "manifest.txt"));

  REQUIRE(run("budget --set budget.unit=J " + out_arg("j")) == 0);
  const auto jj = load_json(out("j") / "budget.json");
  const double kb = 1.380649e-23;
  CHECK(jj["total_collision"]["value"].get<double>() / kb * 1e6 ==
        doctest::Approx(j["total_collision"]["value"].get<double>()).epsilon(1e-12));
}

TEST_CASE_FIXTURE(Scratch, "zeroed budget rows give zero totals") {
  std::string sets;
  for (const char* row : {"radial_secular", "intrinsic_mm", "axial_secular", "excess_mm", "atom_thermal"}) {
    sets += std::string(" --set budget.") + row + "=0 --set budget." + row + "_sigma=0";
  }
  REQUIRE(run("budget" + sets + " " + out_arg("zero")) == 0);
  const auto j = load_json(out("zero") / "budget.json");
  CHECK(j["total_collision"]["value"].get<double>() == 0.0);
  CHECK(j["total_collision"]["sigma"].get<double>() == 0.0);
  CHECK(j["ion_kinetic"]["value"].get<double>() == 0.0);
}

TEST_CASE_FIXTURE(Scratch, "invalid input exits with a configuration error") {
  const std::string bad = std::string(IONBATH_TEST_DATA) + "/rabi_missing_column.csv";
  CHECK(run("thermo --set thermo.rabi_data=" + bad + " " + out_arg("bad")) == 2);
  CHECK(slurp(kScratch / "last.log").find("rabi_missing_column.csv") != std::string::npos);
  CHECK(run("thermo --set thermo.rabi_data=/nonexistent.csv " + out_arg("missing")) == 2);
  CHECK(run("budget --set budget.unit=furlongs " + out_arg("unit")) == 2);
  CHECK(run("cool --set bath.temperature_uk=-1 " + out_arg("cold")) == 2);
  CHECK(run("nosuchcommand") == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE_FIXTURE(Scratch, "thermometry on the bundled datasets") {
  REQUIRE(run("thermo " + out_arg("thermo")) == 0);
  const auto rabi = load_json(out("thermo") / "rabi_fit.json");
  CHECK(rabi["nbar"].get<double>() == doctest::Approx(3.7).epsilon(0.1));
  const auto doppler = load_json(out("thermo") / "doppler_fit.json");
  CHECK(doppler["sigma_khz"].get<double>() == doctest::Approx(193.0).epsilon(0.05));
  const auto mm = load_json(out("thermo") / "micromotion.json");
  CHECK(mm["beta"].get<double>() == doctest::Approx(1.1818).epsilon(1e-3));
}

TEST_CASE_FIXTURE(Scratch, "identical seeds give identical outputs and replay reproduces them") {
  const std::string small = "cool --set bath.runs=2 --set bath.atoms_per_run=12 --set cool.fit_weighted=false --seed 9 ";
  REQUIRE(run(small + out_arg("a")) == 0);
  REQUIRE(run(small + "--workers 1 " + out_arg("b")) == 0);
  for (const char* f : {"cooling_curve.csv", "cooling_fit.json"}) {
    CHECK(slurp(out("a") / f) == slurp(out("b") / f));
  }
  REQUIRE(run("replay " + (out("a") / "manifest.txt").string() + " " + out_arg("r")) == 0);
  for (const char* f : {"cooling_curve.csv", "cooling_fit.json", "manifest.txt"}) {
    CHECK(slurp(out("a") / f) == slurp(out("r") / f));
  }
  REQUIRE(run(small.substr(0, small.size() - 9) + "--seed 10 " + out_arg("c")) == 0);
  CHECK(slurp(out("a") / "cooling_curve.csv") != slurp(out("c") / "cooling_curve.csv"));
}

TEST_CASE_FIXTURE(Scratch, "cool maps collisions to time through the cooling time or a given density") {
  const std::string small = "cool --set bath.runs=2 --set bath.atoms_per_run=12 --set cool.fit_weighted=false ";
  REQUIRE(run(small + out_arg("tau")) == 0);
  const auto j = load_json(out("tau") / "cooling_fit.json");
  CHECK(j["time_mapping"] == "cooling_time");
  CHECK(j["tau_s"].get<double>() == doctest::Approx(0.244));
  CHECK(j["heating_offset_uK"].get<double>() == doctest::Approx(83.0 * 0.244));

  REQUIRE(run(small + "--set md.atom_density_per_m3=24e15 " + out_arg("rho")) == 0);
  const auto k = load_json(out("rho") / "cooling_fit.json");
  CHECK(k["time_mapping"] == "density");
  CHECK(k["rho_exp_per_m3"].get<double>() == doctest::Approx(24e15));
  // Same collisions, so the deduced density and the given one scale the cooling time inversely.
  CHECK(k["tau_s"].get<double>() * 24e15 ==
        doctest::Approx(0.244 * j["rho_exp_per_m3"].get<double>()).epsilon(1e-9));

  CHECK(run("cool --set md.cooling_time_ms=0 " + out_arg("bad")) == 2);
}
