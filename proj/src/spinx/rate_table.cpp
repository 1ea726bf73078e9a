#include "ionbath/spinx/rate_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <tbb/global_control.h>
#include <tbb/parallel_for.h>

#include "ionbath/core/errors.hpp"
#include "ionbath/core/units.hpp"
#include "ionbath/scatter/scattering_length.hpp"

namespace ionbath::spinx {

RateTable::RateTable(std::vector<double> a_grid, std::vector<double> energies, std::vector<double> lambdas,
                     std::vector<double> values)
    : a_grid_(std::move(a_grid)), energies_(std::move(energies)), lambdas_(std::move(lambdas)),
      values_(std::move(values)) {
  const std::size_t na = a_grid_.size();
  if (na < 2 || energies_.size() < 2) throw DomainError("rate table needs at least two grid points per axis");
  if (values_.size() != na * na * energies_.size() || lambdas_.size() != na) {
    throw DomainError("rate table: inconsistent array sizes");
  }
  // Natural cubic spline in log E for every node: second derivatives by the Thomas algorithm.
  const std::size_t ne = energies_.size();
  std::vector<double> u(ne);
  for (std::size_t k = 0; k < ne; ++k) {
    if (!(energies_[k] > 0.0) || (k > 0 && !(energies_[k] > energies_[k - 1]))) {
      throw DomainError("rate table: energies must be positive and increasing");
    }
    u[k] = std::log(energies_[k]);
  }
  curvature_.assign(values_.size(), 0.0);
  std::vector<double> c(ne, 0.0), d(ne, 0.0);
  for (std::size_t node = 0; node < na * na; ++node) {
    const double* y = &values_[node * ne];
    double* m = &curvature_[node * ne];
    for (std::size_t k = 1; k + 1 < ne; ++k) {
      const double h0 = u[k] - u[k - 1], h1 = u[k + 1] - u[k];
      const double diag = 2.0 * (h0 + h1) - h0 * c[k - 1];
      const double rhs = 6.0 * ((y[k + 1] - y[k]) / h1 - (y[k] - y[k - 1]) / h0) - h0 * d[k - 1];
      c[k] = h1 / diag;
      d[k] = rhs / diag;
    }
    m[ne - 1] = 0.0;
    for (std::size_t k = ne - 1; k-- > 1;) m[k] = d[k] - c[k] * m[k + 1];
    m[0] = 0.0;
  }
}

double RateTable::at(std::size_t i_s, std::size_t i_t, std::size_t k) const {
  const std::size_t na = a_grid_.size(), ne = energies_.size();
  return values_.at((i_s * na + i_t) * ne + k);
}

double RateTable::rate_at_node(double energy, std::size_t i_s, std::size_t i_t) const {
  if (!(energy > 0.0)) throw DomainError("rate table: energy must be positive");
  const std::size_t ne = energies_.size();
  if (energy <= energies_.front()) return at(i_s, i_t, 0);
  if (energy >= energies_.back()) return at(i_s, i_t, ne - 1);
  const auto it = std::upper_bound(energies_.begin(), energies_.end(), energy);
  const std::size_t k = static_cast<std::size_t>(it - energies_.begin()) - 1;
  const double h = std::log(energies_[k + 1] / energies_[k]);
  const double b = std::log(energy / energies_[k]) / h;
  const double a = 1.0 - b;
  const std::size_t base = (i_s * a_grid_.size() + i_t) * ne;
  const double m0 = curvature_[base + k], m1 = curvature_[base + k + 1];
  return a * values_[base + k] + b * values_[base + k + 1] +
         ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
}

std::size_t RateTable::nearest(double a) const {
  const double step = a_grid_[1] - a_grid_[0];
  const double pos = (a - a_grid_.front()) / step;
  if (pos < -1e-9 || pos > static_cast<double>(a_grid_.size() - 1) + 1e-9) {
    throw DomainError("rate table: scattering length outside the grid");
  }
  return static_cast<std::size_t>(std::lround(std::clamp(pos, 0.0, static_cast<double>(a_grid_.size() - 1))));
}

double RateTable::rate(double energy, double a_s, double a_t) const {
  const std::size_t na = a_grid_.size();
  const double step = a_grid_[1] - a_grid_[0];
  auto locate = [&](double a, std::size_t& i, double& w) {
    const double pos = (a - a_grid_.front()) / step;
    if (pos < -1e-9 || pos > static_cast<double>(na - 1) + 1e-9) {
      throw DomainError("rate table: scattering length outside the grid");
    }
    const double p = std::clamp(pos, 0.0, static_cast<double>(na - 1));
    i = std::min(static_cast<std::size_t>(p), na - 2);
    w = p - static_cast<double>(i);
    if (w < 1e-12) w = 0.0;
    if (w > 1.0 - 1e-12) w = 1.0;
  };
  std::size_t is = 0, it = 0;
  double ws = 0.0, wt = 0.0;
  locate(a_s, is, ws);
  locate(a_t, it, wt);
  double sum = 0.0;
  for (int ds = 0; ds < 2; ++ds) {
    const double fs = ds == 0 ? 1.0 - ws : ws;
    if (fs == 0.0) continue;
    for (int dt = 0; dt < 2; ++dt) {
      const double ft = dt == 0 ? 1.0 - wt : wt;
      if (ft == 0.0) continue;
      sum += fs * ft * rate_at_node(energy, is + ds, it + dt);
    }
  }
  return sum;
}

void RateTable::save(const std::filesystem::path& path, const std::string& fingerprint) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ConfigError("cannot write rate table cache " + path.string());
    out << std::setprecision(17);
    out << "# " << fingerprint << "\n";
    out << a_grid_.size() << " " << energies_.size() << "\n";
    for (double a : a_grid_) out << a << " ";
    out << "\n";
    for (double e : energies_) out << e << " ";
    out << "\n";
    for (double l : lambdas_) out << l << " ";
    out << "\n";
    for (double v : values_) out << v << "\n";
  }
  std::filesystem::rename(tmp, path);
}

bool RateTable::load(const std::filesystem::path& path, const std::string& fingerprint) {
  std::ifstream in(path);
  if (!in) return false;
  std::string line;
  std::getline(in, line);
  if (line != "# " + fingerprint) return false;
  std::size_t na = 0, ne = 0;
  in >> na >> ne;
  if (!in || na < 2 || ne < 2) return false;
  std::vector<double> a(na), e(ne), lam(na), v(na * na * ne);
  for (auto& x : a) in >> x;
  for (auto& x : e) in >> x;
  for (auto& x : lam) in >> x;
  for (auto& x : v) in >> x;
  if (!in) return false;
  *this = RateTable(std::move(a), std::move(e), std::move(lam), std::move(v));
  return true;
}

std::vector<double> RateTableSpec::grid() const {
  if (!(a_step > 0.0) || !(a_max > a_min)) throw DomainError("rate table: invalid scattering-length grid");
  const int n = static_cast<int>(std::lround((a_max - a_min) / a_step)) + 1;
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a_min + a_step * i;
  return g;
}

std::vector<double> RateTableSpec::energy_grid() const {
  const double lo = e_min > 0.0 ? e_min : units::microkelvin_to_joule(0.3);
  const double hi = e_max > 0.0 ? e_max : units::microkelvin_to_joule(150.0);
  return scatter::log_energy_grid(lo, hi, energy_points);
}

std::string RateTableSpec::fingerprint(const InteractionModel& im) const {
  std::ostringstream s;
  s << std::setprecision(12) << "rate-table v1 c4=" << im.c4() << " c6=" << im.c6() << " mu=" << im.reduced_mass()
    << " a=[" << a_min << "," << a_max << "," << a_step << "] e=[" << energy_grid().front() << ","
    << energy_grid().back() << "," << energy_points << "] split="
    << (splitting > 0.0 ? splitting : scatter::default_splitting()) << " mix=" << mixing_angle
    << " lmax=" << rates.l_max << " spw=" << rates.numerov.steps_per_wavelength
    << " trunc=" << rates.truncate_l << ":" << rates.truncation_threshold;
  return s.str();
}

std::string RateTableSpec::cache_name(const InteractionModel& im) const {
  // FNV-1a: stable across platforms, unlike std::hash.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : fingerprint(im)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream s;
  s << "rate_table_" << std::hex << std::setw(16) << std::setfill('0') << h << ".txt";
  return s.str();
}

RateTable build_rate_table(const InteractionModel& interaction, const RateTableSpec& spec,
                           const std::filesystem::path& cache) {
  const std::string fp = spec.fingerprint(interaction);
  if (!cache.empty()) {
    RateTable cached;
    if (cached.load(cache, fp)) return cached;
  }
  const std::vector<double> grid = spec.grid();
  const std::vector<double> energies = spec.energy_grid();
  const std::size_t na = grid.size(), ne = energies.size();

  std::unique_ptr<tbb::global_control> limit;
  if (spec.workers > 0) {
    limit = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                  static_cast<std::size_t>(spec.workers));
  }
  std::vector<double> lambdas(na);
  tbb::parallel_for(std::size_t{0}, na, [&](std::size_t i) {
    lambdas[i] = scatter::tune_scaling(interaction, grid[i]).lambda;
  });

  const double splitting = spec.splitting > 0.0 ? spec.splitting : scatter::default_splitting();
  const scatter::ChannelModel base =
      scatter::ChannelModel::two_spin(interaction, 1.0, 1.0, splitting, spec.mixing_angle);
  scatter::RateOptions ro = spec.rates;
  ro.workers = 1;  // parallelism lives in the pair loop
  std::vector<double> values(na * na * ne);
  tbb::parallel_for(std::size_t{0}, na * na, [&](std::size_t pair) {
    const std::size_t is = pair / na, it = pair % na;
    const scatter::RateCurve c = scatter::rate_constant(base.with_lambdas(lambdas[is], lambdas[it]), energies, ro);
    for (std::size_t k = 0; k < ne; ++k) values[pair * ne + k] = c.rate[k];
  });
  RateTable table(grid, energies, lambdas, std::move(values));
  if (!cache.empty()) table.save(cache, fp);
  return table;
}

}  // namespace ionbath::spinx
