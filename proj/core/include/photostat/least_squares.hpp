#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace photostat {

struct ParameterBounds {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

/// Fills `residuals` (already sized) with weighted residuals (y - model)/sigma
/// for the parameter vector `params`.
using ResidualFunction =
    std::function<void(std::span<const double> params, std::span<double> residuals)>;

struct LeastSquaresOptions {
  int max_iterations = 200;
  double relative_tolerance = 1e-10;
};

struct LeastSquaresResult {
  std::vector<double> params;
  std::vector<double> sigmas;      // sqrt(diag(covariance))
  std::vector<double> covariance;  // row-major, params.size()^2
  std::vector<double> residuals;
  double chi2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Box-constrained Levenberg-Marquardt with a central-difference Jacobian.
/// Parameters are scaled by their starting magnitude internally. The
/// covariance is the inverse of J^T J at the optimum (pseudo-inverse when a
/// parameter is not identified by the data).
LeastSquaresResult levenberg_marquardt(const ResidualFunction& fn, std::size_t n_residuals,
                                       std::vector<double> start,
                                       std::span<const ParameterBounds> bounds,
                                       const LeastSquaresOptions& options = {});

}  // namespace photostat
