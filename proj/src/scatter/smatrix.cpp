#include "ionbath/scatter/smatrix.hpp"

#include <cmath>

#include <boost/math/special_functions/bessel.hpp>

#include "ionbath/core/errors.hpp"

namespace ionbath::scatter {

namespace {

// Coefficients (l + j)! / (j! (l - j)!) of the modified spherical Bessel closed forms.
double closed_form_coefficient(int l, int j) {
  double c = 1.0;
  for (int i = l - j + 1; i <= l + j; ++i) c *= i;
  for (int i = 2; i <= j; ++i) c /= i;
  return c;
}

// e^z * z k_l(z) (with the pi/2 prefactor dropped) is an exact polynomial in 1/z.
double scaled_decaying(int l, double z) {
  double s = 0.0;
  for (int j = 0; j <= l; ++j) s += closed_form_coefficient(l, j) * std::pow(2.0 * z, -j);
  return s;
}

// e^-z * z i_l(z).
double scaled_growing(int l, double z) {
  if (z > 2.0 * (l + 1.0) + 20.0) {
    double plus = 0.0, minus = 0.0;
    for (int j = 0; j <= l; ++j) {
      const double t = closed_form_coefficient(l, j) * std::pow(2.0 * z, -j);
      plus += (j % 2 == 0 ? t : -t);
      minus += t;
    }
    return 0.5 * (plus + ((l % 2 == 0) ? -1.0 : 1.0) * std::exp(-2.0 * z) * minus);
  }
  return std::exp(-z) * z * std::sqrt(constants::pi / (2.0 * z)) * boost::math::cyl_bessel_i(l + 0.5, z);
}

}  // namespace

RiccatiPair riccati_pair(int l, double e, double x) {
  if (l < 0) throw DomainError("partial wave must be >= 0");
  if (!(x > 0.0)) throw DomainError("matching radius must be positive");
  RiccatiPair p;
  if (e > 0.0) {
    const double k = std::sqrt(e);
    const double z = k * x;
    const double norm = 1.0 / std::sqrt(k);
    p.regular = norm * z * std::sph_bessel(static_cast<unsigned>(l), z);
    p.irregular = norm * z * std::sph_neumann(static_cast<unsigned>(l), z);
    return p;
  }
  if (e == 0.0) throw DomainError("matching exactly at a channel threshold");
  const double kappa = std::sqrt(-e);
  const double z = kappa * x;
  p.regular = scaled_growing(l, z);
  p.irregular = scaled_decaying(l, z);
  p.log_regular_scale = z;
  p.log_irregular_scale = -z;
  return p;
}

double ScatteringResult::phase_shift() const {
  if (K.rows() != 1) throw DomainError("phase shift is defined for a single open channel");
  return std::atan(K(0, 0));
}

double ScatteringResult::transition_probability(int i, int j) const {
  int a = -1, b = -1;
  for (std::size_t n = 0; n < open.size(); ++n) {
    if (open[n] == i) a = static_cast<int>(n);
    if (open[n] == j) b = static_cast<int>(n);
  }
  if (a < 0 || b < 0) return 0.0;
  return std::norm(S(a, b));
}

ScatteringResult extract_smatrix(const Propagation& prop, const ChannelModel& model, double eps, int l,
                                 double unitarity_tolerance) {
  const int n = model.channels();
  ScatteringResult res;
  res.eps = eps;
  res.l = l;
  res.propagation = prop;
  for (int i = 0; i < n; ++i) {
    if (eps - model.thresholds()[i] > 0.0) res.open.push_back(i);
  }
  if (res.open.empty()) throw DomainError("energy is below every channel threshold");

  // Diagonal matching functions at both radii; closed channels are normalized to their
  // value at x_a so that the growing/decaying exponentials never overflow.
  ChannelMatrix ja = ChannelMatrix::Zero(n, n), jb = ja, na = ja, nb = ja;
  for (int i = 0; i < n; ++i) {
    const double e = eps - model.thresholds()[i];
    const RiccatiPair a = riccati_pair(l, e, prop.x_a);
    const RiccatiPair b = riccati_pair(l, e, prop.x_b);
    if (e > 0.0) {
      ja(i, i) = a.regular;
      jb(i, i) = b.regular;
      na(i, i) = a.irregular;
      nb(i, i) = b.irregular;
    } else {
      ja(i, i) = 1.0;
      na(i, i) = 1.0;
      jb(i, i) = std::exp(b.log_regular_scale - a.log_regular_scale) * b.regular / a.regular;
      nb(i, i) = std::exp(b.log_irregular_scale - a.log_irregular_scale) * b.irregular / a.irregular;
    }
  }
  // psi = J - N Y with psi_b = Q psi_a.
  const ChannelMatrix lhs = nb - prop.ratio * na;
  const ChannelMatrix rhs = jb - prop.ratio * ja;
  Eigen::FullPivLU<ChannelMatrix> lu(lhs);
  if (!lu.isInvertible()) throw NumericalError("S-matrix extraction: singular matching matrix");
  const ChannelMatrix y = lu.solve(rhs);

  const int no = static_cast<int>(res.open.size());
  res.K.resize(no, no);
  for (int a = 0; a < no; ++a)
    for (int b = 0; b < no; ++b) res.K(a, b) = y(res.open[a], res.open[b]);
  res.k_asymmetry = (res.K - res.K.transpose()).cwiseAbs().maxCoeff();

  using Complex = std::complex<double>;
  const Eigen::MatrixXcd iK = Complex(0.0, 1.0) * res.K.cast<Complex>();
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(no, no);
  res.S = (eye + iK) * (eye - iK).inverse();
  res.unitarity_error = (res.S * res.S.adjoint() - eye).cwiseAbs().maxCoeff();
  if (!(res.unitarity_error <= unitarity_tolerance)) {
    throw NumericalError("S matrix is not unitary (error " + std::to_string(res.unitarity_error) + ")");
  }
  return res;
}

ScatteringResult solve_scattering(const ChannelModel& model, double eps, int l, const NumerovOptions& options,
                         double unitarity_tolerance) {
  return extract_smatrix(numerov_propagate(model, eps, l, options), model, eps, l, unitarity_tolerance);
}

}  // namespace ionbath::scatter
