#pragma once

#include <functional>

#include <Eigen/Dense>

namespace ionbath {

/// Fills `residuals` (already sized) for parameter vector `params`.
using ResidualFunction = std::function<void(const Eigen::VectorXd& params, Eigen::VectorXd& residuals)>;

struct LeastSquaresOptions {
  int max_evaluations = 4000;
  double tolerance = 1e-12;
  /// Residuals are already divided by per-point sigma; covariance is then (J^T J)^-1.
  /// Otherwise the covariance is scaled by chi2/dof.
  bool weighted = false;
};

struct LeastSquaresResult {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;
  double chi2 = 0.0;  // sum of squared residuals
  int dof = 0;
  int evaluations = 0;
  bool converged = false;
  bool singular = false;  // J^T J not invertible at the solution
};

/// Levenberg-Marquardt (Eigen's MINPACK port) with a forward-difference Jacobian
/// and a central-difference Jacobian for the final covariance.
LeastSquaresResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& initial,
                                       int n_residuals, const LeastSquaresOptions& options = {});

}  // namespace ionbath
