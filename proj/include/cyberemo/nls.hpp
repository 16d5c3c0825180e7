#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "error.hpp"

namespace cyberemo::nls {

struct Options {
  int max_iterations = 200;
  int max_halvings = 40;
  double step_tolerance = 1e-12;  // relative to |theta|
  double rss_tolerance = 1e-15;   // relative RSS decrease
};

struct Result {
  Eigen::VectorXd theta;
  Eigen::VectorXd residuals;  // observed - predicted
  Eigen::MatrixXd jacobian;   // d predicted / d theta
  double rss = 0.0;
  int iterations = 0;
};

// Damped Gauss-Newton: the full Gauss-Newton step is computed by
// column-pivoted QR and halved until the residual sum of squares decreases.
//
// `model(theta, residuals, jacobian)` must fill residuals (observed minus
// predicted) and the Jacobian of the prediction.
template <class Model>
Result gauss_newton(Model&& model, Eigen::VectorXd theta, const std::vector<std::string>& names,
                    const Options& opt = {}) {
  Result res;
  model(theta, res.residuals, res.jacobian);
  res.rss = res.residuals.squaredNorm();

  for (int it = 1; it <= opt.max_iterations; ++it) {
    res.iterations = it;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(res.jacobian);
    if (qr.rank() < res.jacobian.cols()) {
      std::vector<std::string> collinear;
      for (Eigen::Index i = qr.rank(); i < res.jacobian.cols(); ++i)
        collinear.push_back(names[static_cast<std::size_t>(qr.colsPermutation().indices()(i))]);
      std::string msg = "rank-deficient Jacobian; collinear terms:";
      for (const auto& c : collinear) msg += " " + c;
      throw IdentifiabilityError(msg, collinear);
    }
    const Eigen::VectorXd delta = qr.solve(res.residuals);

    double scale = 1.0;
    Eigen::VectorXd trial_theta, trial_r;
    Eigen::MatrixXd trial_j;
    double trial_rss = res.rss;
    bool improved = false;
    for (int k = 0; k <= opt.max_halvings; ++k, scale *= 0.5) {
      trial_theta = theta + scale * delta;
      model(trial_theta, trial_r, trial_j);
      trial_rss = trial_r.squaredNorm();
      if (std::isfinite(trial_rss) && trial_rss <= res.rss) {
        improved = true;
        break;
      }
    }

    const double step = scale * delta.norm();
    if (!improved) {
      // No descent along the Gauss-Newton direction: stationary to machine
      // precision when the full step is already negligible.
      if (delta.norm() <= 1e3 * opt.step_tolerance * (1.0 + theta.norm())) {
        res.theta = theta;
        return res;
      }
      throw ConvergenceError("damped Gauss-Newton found no descent step",
                             std::vector<double>(theta.data(), theta.data() + theta.size()));
    }

    const double decrease = res.rss - trial_rss;
    theta = trial_theta;
    res.residuals = std::move(trial_r);
    res.jacobian = std::move(trial_j);
    res.rss = trial_rss;
    if (step <= opt.step_tolerance * (1.0 + theta.norm()) || decrease <= opt.rss_tolerance * res.rss) {
      res.theta = theta;
      return res;
    }
  }
  throw ConvergenceError("damped Gauss-Newton did not converge in " + std::to_string(opt.max_iterations) +
                             " iterations",
                         std::vector<double>(theta.data(), theta.data() + theta.size()));
}

}  // namespace cyberemo::nls
