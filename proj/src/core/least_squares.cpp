#include "ionbath/core/least_squares.hpp"

#include <cmath>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

namespace ionbath {

namespace {

struct Functor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const ResidualFunction* f;
  int n_params;
  int n_residuals;
  int* counter;

  int inputs() const { return n_params; }
  int values() const { return n_residuals; }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    ++*counter;
    (*f)(p, r);
    return r.allFinite() ? 0 : -1;
  }
};

Eigen::MatrixXd central_jacobian(const ResidualFunction& f, const Eigen::VectorXd& p, int m) {
  const int n = static_cast<int>(p.size());
  Eigen::MatrixXd jac(m, n);
  Eigen::VectorXd rp(m), rm(m);
  for (int j = 0; j < n; ++j) {
    const double h = 1e-6 * std::max(std::abs(p[j]), 1e-8);
    Eigen::VectorXd pp = p, pm = p;
    pp[j] += h;
    pm[j] -= h;
    f(pp, rp);
    f(pm, rm);
    jac.col(j) = (rp - rm) / (2.0 * h);
  }
  return jac;
}

}  // namespace

LeastSquaresResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& initial,
                                       int n_residuals, const LeastSquaresOptions& options) {
  int counter = 0;
  Functor functor{&f, static_cast<int>(initial.size()), n_residuals, &counter};
  Eigen::NumericalDiff<Functor> numdiff(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Functor>> lm(numdiff);
  lm.parameters.maxfev = options.max_evaluations;
  lm.parameters.xtol = options.tolerance;
  lm.parameters.ftol = options.tolerance;

  LeastSquaresResult out;
  out.params = initial;
  const auto status = lm.minimize(out.params);
  out.evaluations = counter;
  out.converged = status == Eigen::LevenbergMarquardtSpace::RelativeReductionTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::RelativeErrorTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::RelativeErrorAndReductionTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::CosinusTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::FtolTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::XtolTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::GtolTooSmall;

  Eigen::VectorXd r(n_residuals);
  f(out.params, r);
  out.chi2 = r.squaredNorm();
  out.dof = n_residuals - static_cast<int>(initial.size());
  if (!r.allFinite()) out.converged = false;

  const Eigen::MatrixXd jac = central_jacobian(f, out.params, n_residuals);
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    out.singular = true;
    out.covariance = Eigen::MatrixXd::Constant(jtj.rows(), jtj.cols(), std::nan(""));
  } else {
    out.covariance = lu.inverse();
    if (!options.weighted && out.dof > 0) out.covariance *= out.chi2 / out.dof;
  }
  return out;
}

}  // namespace ionbath
