#include "ionbath/spinx/spin_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/tools/minima.hpp>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>

#include "ionbath/core/units.hpp"

namespace ionbath::spinx {

double spin_flip_probability(double k_bar, double n_langevin, double k_langevin) {
  if (k_bar < 0.0 || n_langevin < 0.0) throw DomainError("spin_flip_probability: K_bar and n_L must be >= 0");
  if (!(k_langevin > 0.0)) throw DomainError("spin_flip_probability: K_L must be positive");
  return -std::expm1(-n_langevin * k_bar / k_langevin);
}

double chi2(const std::vector<double>& observed, const std::vector<double>& sigma,
            const std::vector<double>& predicted) {
  if (observed.size() != sigma.size() || observed.size() != predicted.size()) {
    throw DomainError("chi2: length mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(sigma[i] > 0.0)) throw DomainError("chi2: sigma must be positive");
    const double r = (observed[i] - predicted[i]) / sigma[i];
    sum += r * r;
  }
  return sum;
}

void SpinDataset::validate() const {
  if (mean_emm.size() != s.size() || sigma.size() != s.size()) throw ConfigError("spin dataset: column lengths differ");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(mean_emm[i] >= 0.0)) throw ConfigError("spin dataset: negative micromotion energy in row " + std::to_string(i + 1));
    if (!(sigma[i] > 0.0)) throw ConfigError("spin dataset: sigma must be positive in row " + std::to_string(i + 1));
  }
}

SpinDataset read_spin_dataset(const std::filesystem::path& path) {
  const io::Table t = io::read_table(path, 3);
  SpinDataset d;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    d.mean_emm.push_back(units::microkelvin_to_joule(t.columns[0][i]));
    d.s.push_back(t.columns[1][i]);
    d.sigma.push_back(t.columns[2][i]);
  }
  d.validate();
  return d;
}

io::Table spin_dataset_table(const SpinDataset& data) {
  io::Table t;
  t.header = {"E_eMM_uK", "S", "sigma"};
  t.columns.resize(3);
  for (std::size_t i = 0; i < data.size(); ++i) {
    t.columns[0].push_back(units::joule_to_microkelvin(data.mean_emm[i]));
    t.columns[1].push_back(data.s[i]);
    t.columns[2].push_back(data.sigma[i]);
  }
  return t;
}

namespace {

double offset_of(const SpinFitOptions& o) { return o.offset > 0.0 ? o.offset : default_thermal_offset(); }

std::vector<double> convolved_rates(const SpinDataset& data, const RateModel& model, double a_s, double a_t,
                                    const SpinFitOptions& o) {
  std::vector<double> k(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const EmmDistribution dist{data.mean_emm[i], offset_of(o)};
    k[i] = convolve_rate([&](double e) { return model(e, a_s, a_t); }, dist, o.energy_weight, o.convolution);
  }
  return k;
}

struct InnerFit {
  double n = 0.0;
  double chi2 = 0.0;
};

// Best n_L for fixed convolved rates: chi2 is smooth in log n_L; Brent's method on a
// log grid-seeded bracket.
InnerFit best_n(const SpinDataset& data, const std::vector<double>& kbar, const SpinFitOptions& o) {
  auto chi = [&](double n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double r = (data.s[i] - spin_flip_probability(kbar[i], n, o.k_langevin)) / data.sigma[i];
      sum += r * r;
    }
    return sum;
  };
  const double lo = std::log(1e-4), hi = std::log(o.n_max);
  const int coarse = 48;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int j = 0; j <= coarse; ++j) {
    const double v = chi(std::exp(lo + (hi - lo) * j / coarse));
    if (v < best_val) {
      best_val = v;
      best = j;
    }
  }
  const double a = lo + (hi - lo) * std::max(best - 1, 0) / coarse;
  const double b = lo + (hi - lo) * std::min(best + 1, coarse) / coarse;
  const auto r = boost::math::tools::brent_find_minima([&](double x) { return chi(std::exp(x)); }, a, b, 40);
  InnerFit f;
  f.n = std::exp(r.first);
  f.chi2 = r.second;
  if (best_val < f.chi2) {
    f.n = std::exp(lo + (hi - lo) * best / coarse);
    f.chi2 = best_val;
  }
  return f;
}

}  // namespace

std::vector<double> predict_spin(const SpinDataset& data, const RateModel& model, double a_s, double a_t,
                                 double n_l, const SpinFitOptions& options) {
  const std::vector<double> k = convolved_rates(data, model, a_s, a_t, options);
  std::vector<double> s(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) s[i] = spin_flip_probability(k[i], n_l, options.k_langevin);
  return s;
}

bool SpinFitResult::in_region(std::size_t i_s, std::size_t i_t) const {
  return surface.at(i_s).at(i_t) <= region_threshold;
}

bool SpinFitResult::contains(double a_s, double a_t) const {
  if (grid.size() < 2) return false;
  const double step = grid[1] - grid[0];
  const auto idx = [&](double a) -> long { return std::lround((a - grid.front()) / step); };
  const long is = idx(a_s), it = idx(a_t);
  if (is < 0 || it < 0 || is >= static_cast<long>(grid.size()) || it >= static_cast<long>(grid.size())) return false;
  return in_region(static_cast<std::size_t>(is), static_cast<std::size_t>(it));
}

io::Table SpinFitResult::surface_table() const {
  io::Table t;
  t.header = {"a_S_R4", "a_T_R4", "chi2", "n_L"};
  t.columns.resize(4);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      t.columns[0].push_back(grid[i]);
      t.columns[1].push_back(grid[j]);
      t.columns[2].push_back(surface[i][j]);
      t.columns[3].push_back(best_n[i][j]);
    }
  }
  return t;
}

SpinFitResult fit_spin(const SpinDataset& data, const RateModel& model, const SpinFitOptions& o) {
  data.validate();
  if (data.size() < 5) throw DomainError("fit_spin: need at least five energy points");
  if (!(o.k_langevin > 0.0)) throw DomainError("fit_spin: K_L must be positive");
  if (!(o.a_step > 0.0) || !(o.a_max > o.a_min)) throw DomainError("fit_spin: invalid grid");
  if (!(o.p_level > 0.0 && o.p_level < 1.0)) throw DomainError("fit_spin: p level must lie in (0, 1)");

  SpinFitResult res;
  const int na = static_cast<int>(std::lround((o.a_max - o.a_min) / o.a_step)) + 1;
  res.grid.resize(na);
  for (int i = 0; i < na; ++i) res.grid[i] = o.a_min + o.a_step * i;
  res.surface.assign(na, std::vector<double>(na));
  res.best_n.assign(na, std::vector<double>(na));

  std::unique_ptr<tbb::global_control> limit;
  if (o.workers > 0) {
    limit = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                  static_cast<std::size_t>(o.workers));
  }
  tbb::parallel_for(0, na * na, [&](int node) {
    const int is = node / na, it = node % na;
    const InnerFit f = best_n(data, convolved_rates(data, model, res.grid[is], res.grid[it], o), o);
    res.surface[is][it] = f.chi2;
    res.best_n[is][it] = f.n;
  });

  // Deterministic reduction in scan order.
  int bs = 0, bt = 0;
  double lo = res.surface[0][0], hi = lo;
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < na; ++j) {
      const double v = res.surface[i][j];
      if (v < res.surface[bs][bt]) {
        bs = i;
        bt = j;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  res.a_s = res.grid[bs];
  res.a_t = res.grid[bt];
  res.n_l = res.best_n[bs][bt];
  res.chi2 = res.surface[bs][bt];

  if (o.refine) {
    // Compass search between grid nodes (bilinear rate interpolation makes the model
    // continuous there).
    double step = 0.5 * o.a_step;
    while (step > 1e-3 * o.a_step) {
      bool moved = false;
      const double cand[4][2] = {{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}};
      for (const auto& d : cand) {
        const double s = res.a_s + d[0], t = res.a_t + d[1];
        if (s < o.a_min || s > o.a_max || t < o.a_min || t > o.a_max) continue;
        const InnerFit f = best_n(data, convolved_rates(data, model, s, t, o), o);
        if (f.chi2 < res.chi2) {
          res.a_s = s;
          res.a_t = t;
          res.n_l = f.n;
          res.chi2 = f.chi2;
          moved = true;
          break;
        }
      }
      if (!moved) step *= 0.5;
    }
  }

  const int n = static_cast<int>(data.size());
  res.dof = std::max(n - 3, 1);
  const boost::math::chi_squared_distribution<double> dof_dist(res.dof);
  res.p_value = boost::math::cdf(boost::math::complement(dof_dist, res.chi2));
  // Region: parameter sets whose chi2, judged with all N points as degrees of freedom,
  // still has a p-value of at least p_level.
  const boost::math::chi_squared_distribution<double> region_dist(n);
  res.region_threshold = boost::math::quantile(boost::math::complement(region_dist, o.p_level));
  bool first = true;
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < na; ++j) {
      if (!res.in_region(i, j)) continue;
      ++res.region_nodes;
      const double nl = res.best_n[i][j];
      if (first) {
        res.a_s_min = res.a_s_max = res.grid[i];
        res.a_t_min = res.a_t_max = res.grid[j];
        res.n_l_min = res.n_l_max = nl;
        first = false;
      }
      res.a_s_min = std::min(res.a_s_min, res.grid[i]);
      res.a_s_max = std::max(res.a_s_max, res.grid[i]);
      res.a_t_min = std::min(res.a_t_min, res.grid[j]);
      res.a_t_max = std::max(res.a_t_max, res.grid[j]);
      res.n_l_min = std::min(res.n_l_min, nl);
      res.n_l_max = std::max(res.n_l_max, nl);
    }
  }

  const double offset = offset_of(o);
  res.predicted = predict_spin(data, model, res.a_s, res.a_t, res.n_l, o);
  for (std::size_t i = 0; i < data.size(); ++i) {
    res.labels.push_back(EmmDistribution{data.mean_emm[i], offset}.label(o.label) * o.energy_weight);
  }
  const auto [pmin, pmax] = std::minmax_element(res.predicted.begin(), res.predicted.end());
  res.energy_independent = (*pmax - *pmin) <= 1e-9 * std::max(1.0, std::abs(*pmax));
  res.degenerate = (hi - lo) <= 1e-9 * std::max(1.0, hi);
  if (res.degenerate) {
    throw DegenerateFitError(res.energy_independent
                                 ? "chi2 surface is flat: the rate model is energy independent (classical Langevin)"
                                 : "chi2 surface is flat: (a_S, a_T) are not identifiable from these data",
                             res);
  }
  return res;
}

}  // namespace ionbath::spinx
