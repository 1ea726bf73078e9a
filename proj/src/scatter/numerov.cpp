#include "ionbath/scatter/numerov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ionbath/core/errors.hpp"

namespace ionbath::scatter {

namespace {

// Largest |W_ii| over channels, floored by the asymptotic value so the step stays
// resolved beyond turning points.
double local_scale(const ChannelModel& model, double x, double eps, int l, double asymptotic) {
  const ChannelMatrix w = model.w_matrix(x, eps, l);
  double s = asymptotic;
  for (int i = 0; i < model.channels(); ++i) s = std::max(s, std::abs(w(i, i)));
  return s;
}

double min_diag(const ChannelMatrix& w) {
  double m = w(0, 0);
  for (int i = 1; i < w.rows(); ++i) m = std::min(m, w(i, i));
  return m;
}

std::string at_radius(double x) {
  std::ostringstream s;
  s << "renormalized Numerov: singular step matrix at x = " << x << " R4";
  return s.str();
}


template <class Mat>
bool invert(const Mat& m, Mat& out) {
  if constexpr (Mat::RowsAtCompileTime == 1) {
    if (m(0, 0) == 0.0 || !std::isfinite(m(0, 0))) return false;
    out(0, 0) = 1.0 / m(0, 0);
    return true;
  } else if constexpr (Mat::RowsAtCompileTime == 2) {
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double scale = m.cwiseAbs().maxCoeff();
    if (!(std::abs(det) > 1e-300 * scale * scale) || !std::isfinite(det)) return false;
    out(0, 0) = m(1, 1) / det;
    out(1, 1) = m(0, 0) / det;
    out(0, 1) = -m(0, 1) / det;
    out(1, 0) = -m(1, 0) / det;
    return true;
  } else {
    Eigen::FullPivLU<Mat> lu(m);
    if (!lu.isInvertible()) return false;
    out = lu.inverse();
    return true;
  }
}

// The propagation loop on a matrix type of fixed size where possible. F = (I - T) psi
// obeys F(x+h) = U(x) F(x) - F(x-h) with U = 12 (I - T)^-1 - 10 I; we carry the ratio
// R = F(x+h) F(x)^-1.
template <class Mat>
Propagation run_numerov(const ChannelModel& model, double eps, int l, const NumerovOptions& options, double x0,
                        double x_match, double h, double asymptotic) {
  const int n = model.channels();
  const Mat eye = Mat::Identity(n, n);
  auto w_at = [&](double x) -> Mat { return Mat(model.w_matrix(x, eps, l)); };
  auto scale_of = [&](const Mat& w) {
    double s = asymptotic;
    for (int i = 0; i < n; ++i) s = std::max(s, std::abs(w(i, i)));
    return 2.0 * constants::pi / std::sqrt(s) / options.steps_per_wavelength;
  };
  auto inverse = [&](const Mat& m, double x) -> Mat {
    Mat out(n, n);
    if (!invert(m, out)) throw NumericalError(at_radius(x));
    return out;
  };
  auto u_of = [&](const Mat& t, double x) -> Mat { return 12.0 * inverse(eye - t, x) - 10.0 * eye; };
  // Psi ratio Q = psi(x+h) psi(x)^-1 from R = F(x+h) F(x)^-1.
  auto psi_ratio = [&](const Mat& r, const Mat& t_next, const Mat& t_cur, double x) -> Mat {
    return inverse(eye - t_next, x) * r * (eye - t_cur);
  };

  Propagation out;
  double x = x0;
  // psi(x0) = 0, so F(x0) = 0 and R(x0)^-1 = 0.
  Mat r_inv = Mat::Zero(n, n);
  Mat r(n, n);
  Mat w_cur = w_at(x0);
  long since_change = 0;
  while (true) {
    const double xn = x + h;
    const Mat w_next = w_at(xn);
    const Mat t_next = (h * h / 12.0) * w_next;
    r = u_of(t_next, xn) - r_inv;
    ++out.steps;
    ++since_change;
    if (out.steps > options.max_steps) throw NumericalError("numerov: step budget exhausted");
    if (n == 1 && r(0, 0) < 0.0) ++out.nodes;
    x = xn;
    w_cur = w_next;
    // Now r = F(x + h) F(x)^-1.
    if (x + h >= x_match) break;
    r_inv = inverse(r, x);

    // Double the step when the doubled step still resolves the local wavelength here
    // and two doubled steps ahead, and stays below the relative cap.
    if (options.step_doubling && since_change >= 2) {
      const double h2 = 2.0 * h;
      if (h2 <= options.max_relative_step * x && x + 2.0 * h2 < x_match && h2 <= scale_of(w_cur) &&
          h2 <= scale_of(w_at(x + 2.0 * h2))) {
        // One more ordinary step gives F(x + 2h) F(x + h)^-1; combine the psi ratios
        // over [x, x + 2h] and re-express them on the doubled grid.
        const double x1 = x + h;
        const Mat w1 = w_at(x1);
        const Mat w2 = w_at(x1 + h);
        const double c1 = h * h / 12.0, c2 = h2 * h2 / 12.0;
        const Mat t_x = c1 * w_cur;
        const Mat t_x1 = c1 * w1;
        const Mat t_x2 = c1 * w2;
        const Mat q0 = psi_ratio(r, t_x1, t_x, x);
        const Mat r1 = u_of(t_x1, x1) - r_inv;
        ++out.steps;
        if (n == 1 && r1(0, 0) < 0.0) ++out.nodes;
        const Mat q = psi_ratio(r1, t_x2, t_x1, x1) * q0;
        r = (eye - c2 * w2) * q * inverse(eye - c2 * w_cur, x);
        h = h2;
        ++out.doublings;
        since_change = 0;
        r_inv = inverse(r, x);
      }
    }
  }
  const Mat t_a = (h * h / 12.0) * w_cur;
  const Mat t_b = (h * h / 12.0) * w_at(x + h);
  out.x_a = x;
  out.x_b = x + h;
  out.ratio = ChannelMatrix(psi_ratio(r, t_b, t_a, x));
  return out;
}

}  // namespace

double default_match_radius(const ChannelModel& model, double eps, int l) {
  if (model.kind() == PotentialKind::free) {
    // V = 0 beyond the wall: the asymptotic region starts right there.
    const double k = std::sqrt(std::max(eps, 1e-30));
    return std::max(model.wall(), 0.0) + std::max(4.0 * constants::pi / k, 3.0 * (l + 1.0) / k);
  }
  double emin = std::abs(eps);
  for (double t : model.thresholds()) {
    const double e = std::abs(eps - t);
    if (e > 0.0) emin = std::min(emin == 0.0 ? e : emin, e);
  }
  double x = 50.0;
  if (emin > 0.0) x = std::max(x, std::pow(1e6 / emin, 0.25));
  x = std::max(x, 2.0 * model.r_cut());
  // Well beyond the centrifugal turning point as well.
  if (l > 0 && emin > 0.0) x = std::max(x, 3.0 * std::sqrt(l * (l + 1.0) / emin));
  return x;
}

Propagation numerov_propagate(const ChannelModel& model, double eps, int l, const NumerovOptions& options) {
  const int n = model.channels();
  if (!(options.steps_per_wavelength >= 4.0)) throw DomainError("numerov: need at least 4 steps per wavelength");
  double asymptotic = 0.0;
  for (double t : model.thresholds()) asymptotic = std::max(asymptotic, std::abs(eps - t));
  const double x_match = options.x_match > 0.0 ? options.x_match : default_match_radius(model, eps, l);

  // Start radius: the wall, the origin for a regular free problem, or deep in the core.
  double x0 = options.x_start;
  if (x0 <= 0.0) {
    if (model.wall() > 0.0) {
      x0 = model.wall();
    } else if (model.kind() == PotentialKind::free) {
      x0 = 0.0;
      if (l > 0) {
        // u ~ x^(l+1): start where the regular solution is negligible.
        x0 = std::min(1e-3, 0.1 / std::sqrt(std::max(asymptotic, 1e-30))) *
             std::pow(1e-12, 1.0 / (l + 1.0));
      }
    } else {
      // Innermost classical turning point of the most attractive channel, then inward
      // until the WKB decay integral reaches the target.
      double xt = 1e-4;
      for (; xt < x_match; xt *= 1.001) {
        if (min_diag(model.w_matrix(xt, eps, l)) < 0.0) break;
      }
      double decay = 0.0;
      double x = xt;
      const double f = 0.999;
      while (decay < options.wkb_decay && x > 1e-6) {
        const double xn = x * f;
        const double w = min_diag(model.w_matrix(0.5 * (x + xn), eps, l));
        decay += std::sqrt(std::max(w, 0.0)) * (x - xn);
        x = xn;
      }
      x0 = x;
    }
  }
  if (!(x_match > x0)) throw DomainError("numerov: matching radius must exceed the start radius");

  // Base step: the smallest local wavelength along the path (the step only grows).
  auto wavelength_step = [&](double x) {
    return 2.0 * constants::pi / std::sqrt(local_scale(model, x, eps, l, asymptotic)) / options.steps_per_wavelength;
  };
  double h = HUGE_VAL;
  {
    // Scan to the outer edge of the well region for the smallest wavelength.
    const double scan_end = std::min(x_match, std::max(4.0 * model.r_cut(), 2.0));
    for (double x = std::max(x0, 1e-6); x < scan_end; x += std::max(1e-5, 0.002 * x)) {
      h = std::min(h, wavelength_step(x));
    }
    h = std::min(h, wavelength_step(x_match));
    if (x0 > 0.0) h = std::min(h, options.max_relative_step * x0 + 1e-300);
    h = std::min(h, (x_match - x0) / 16.0);
  }

  switch (n) {
    case 1:
      return run_numerov<Eigen::Matrix<double, 1, 1>>(model, eps, l, options, x0, x_match, h, asymptotic);
    case 2:
      return run_numerov<Eigen::Matrix2d>(model, eps, l, options, x0, x_match, h, asymptotic);
    default:
      return run_numerov<ChannelMatrix>(model, eps, l, options, x0, x_match, h, asymptotic);
  }
}

}  // namespace ionbath::scatter
