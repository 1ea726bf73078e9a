// Regenerates the synthetic thermometry datasets shipped in data/:
//   rabi_nbar3p7_210khz.csv     carrier Rabi flops, nbar = 3.7 at 210 kHz radial modes
//   doppler_sigma193khz.csv     Doppler-broadened line, sigma = 193 kHz
// Usage: ionbath_make_datasets OUTPUT_DIR

#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>

#include "ionbath/core/units.hpp"
#include "ionbath/io/table.hpp"
#include "ionbath/thermometry/rabi.hpp"

using namespace ionbath;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: ionbath_make_datasets OUTPUT_DIR\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(20240611);

  {
    const double noise = 0.02;
    const auto cfg = thermometry::radial_rabi_config(units::khz_to_angular(50.0), units::khz_to_angular(210.0));
    io::Table t;
    t.header = {"t_us", "P", "sigma"};
    t.columns.resize(3);
    for (int i = 0; i <= 60; ++i) {
      const double t_us = 1.0 * i;
      const double p = thermometry::rabi_signal(t_us * 1e-6, 3.7, cfg);
      t.columns[0].push_back(t_us);
      t.columns[1].push_back(p + std::normal_distribution<double>(0.0, noise)(rng));
      t.columns[2].push_back(noise);
    }
    io::write_table(dir / "rabi_nbar3p7_210khz.csv", t);
  }
  {
    const double noise = 0.01, sigma_khz = 193.0;
    io::Table t;
    t.header = {"detuning_khz", "P", "sigma"};
    t.columns.resize(3);
    for (int i = -40; i <= 40; ++i) {
      const double d = 20.0 * i;
      const double z = (d - 15.0) / sigma_khz;
      const double p = 0.02 + 0.45 * std::exp(-0.5 * z * z);
      t.columns[0].push_back(d);
      t.columns[1].push_back(p + std::normal_distribution<double>(0.0, noise)(rng));
      t.columns[2].push_back(noise);
    }
    io::write_table(dir / "doppler_sigma193khz.csv", t);
  }
  std::cout << "wrote datasets to " << dir.string() << "\n";
  return 0;
}
