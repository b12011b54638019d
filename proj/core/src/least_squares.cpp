#include "photostat/least_squares.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "photostat/error.hpp"

namespace photostat {

namespace {

double clamp_to(double v, const ParameterBounds& b) { return std::clamp(v, b.lower, b.upper); }

}  // namespace

LeastSquaresResult levenberg_marquardt(const ResidualFunction& fn, std::size_t n_residuals,
                                       std::vector<double> start,
                                       std::span<const ParameterBounds> bounds,
                                       const LeastSquaresOptions& options) {
  const std::size_t np = start.size();
  require(bounds.size() == np, "one bound per parameter is required");
  require(n_residuals >= np, "fewer residuals than parameters");

  using Eigen::MatrixXd;
  using Eigen::VectorXd;

  std::vector<double> scale(np);
  for (std::size_t i = 0; i < np; ++i) {
    start[i] = clamp_to(start[i], bounds[i]);
    scale[i] = std::abs(start[i]) > 0.0 ? std::abs(start[i]) : 1.0;
  }

  std::vector<double> params = start;
  std::vector<double> trial(np);
  std::vector<double> r(n_residuals);
  std::vector<double> r_trial(n_residuals);
  std::vector<double> r_plus(n_residuals);
  std::vector<double> r_minus(n_residuals);

  auto chi2_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) s += x * x;
    return s;
  };

  MatrixXd jac(n_residuals, np);
  auto jacobian = [&](const std::vector<double>& p) {
    std::vector<double> q = p;
    for (std::size_t j = 0; j < np; ++j) {
      const double h = 1e-6 * scale[j];
      double up = std::min(p[j] + h, bounds[j].upper);
      double down = std::max(p[j] - h, bounds[j].lower);
      if (up == down) {
        jac.col(static_cast<Eigen::Index>(j)).setZero();
        continue;
      }
      q[j] = up;
      fn(q, r_plus);
      q[j] = down;
      fn(q, r_minus);
      q[j] = p[j];
      // Columns are with respect to the scaled parameter p_j / scale_j.
      const double denom = (up - down) / scale[j];
      for (std::size_t i = 0; i < n_residuals; ++i) {
        jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            (r_plus[i] - r_minus[i]) / denom;
      }
    }
  };

  fn(params, r);
  double chi2 = chi2_of(r);
  require(std::isfinite(chi2), "residuals are not finite at the starting point");

  LeastSquaresResult result;
  double lambda = 1e-3;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    jacobian(params);
    const Eigen::Map<const VectorXd> rv(r.data(), static_cast<Eigen::Index>(n_residuals));
    const MatrixXd jtj = jac.transpose() * jac;
    const VectorXd jtr = jac.transpose() * rv;

    bool improved = false;
    double new_chi2 = chi2;
    for (int attempt = 0; attempt < 30; ++attempt) {
      MatrixXd damped = jtj;
      for (Eigen::Index j = 0; j < damped.rows(); ++j) {
        damped(j, j) += lambda * std::max(jtj(j, j), 1e-12);
      }
      // r = y - model, J = dr/dq, so the Gauss-Newton step is -(J^T J)^-1 J^T r.
      const VectorXd step = damped.ldlt().solve(-jtr);
      for (std::size_t j = 0; j < np; ++j) {
        trial[j] = clamp_to(params[j] + step(static_cast<Eigen::Index>(j)) * scale[j], bounds[j]);
      }
      fn(trial, r_trial);
      new_chi2 = chi2_of(r_trial);
      if (std::isfinite(new_chi2) && new_chi2 <= chi2) {
        improved = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) {
      result.converged = true;  // no downhill step exists at any damping
      break;
    }
    const double change = chi2 - new_chi2;
    params.swap(trial);
    r.swap(r_trial);
    chi2 = new_chi2;
    lambda = std::max(lambda / 10.0, 1e-12);
    if (change <= options.relative_tolerance * std::max(chi2, 1e-300)) {
      result.converged = true;
      break;
    }
  }

  jacobian(params);
  const MatrixXd jtj = jac.transpose() * jac;
  const MatrixXd cov_scaled = jtj.completeOrthogonalDecomposition().pseudoInverse();

  result.params = params;
  result.sigmas.assign(np, 0.0);
  result.covariance.assign(np * np, 0.0);
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      result.covariance[i * np + j] =
          cov_scaled(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * scale[i] *
          scale[j];
    }
    result.sigmas[i] = std::sqrt(std::max(result.covariance[i * np + i], 0.0));
  }
  result.residuals = r;
  result.chi2 = chi2;
  result.iterations = iter;
  return result;
}

}  // namespace photostat
