#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "expression.hpp"
#include "fitted_model.hpp"
#include "observations.hpp"

namespace cyberemo {

struct LogisticOptions {
  int max_iterations = 50;
  double tolerance = 1e-8;
};

// Logistic regression logit P(y) = c0 + c1 x by iteratively reweighted
// least squares. Estimates are named {intercept_name, slope_name}.
inline FittedModel fit_logistic(std::span<const double> x, std::span<const int> y, const std::string& intercept_name,
                                const std::string& slope_name, const LogisticOptions& opt = {}) {
  if (x.size() != y.size()) throw ValidationError("regressor and outcome lengths differ");
  const auto n = static_cast<Eigen::Index>(x.size());
  std::size_t n_pos = 0;
  for (int b : y) {
    if (b != 0 && b != 1) throw ValidationError("logistic outcomes must be 0 or 1");
    n_pos += static_cast<std::size_t>(b);
  }
  if (n_pos == 0 || n_pos == y.size()) throw ValidationError("logistic fit needs both outcome classes present");

  // Complete separation by a threshold on x: the MLE does not exist.
  double min1 = INFINITY, max1 = -INFINITY, min0 = INFINITY, max0 = -INFINITY;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    if (!std::isfinite(xi)) throw ValidationError("non-finite regressor value");
    if (y[static_cast<std::size_t>(i)] == 1) {
      min1 = std::min(min1, xi);
      max1 = std::max(max1, xi);
    } else {
      min0 = std::min(min0, xi);
      max0 = std::max(max0, xi);
    }
  }
  if (max0 < min1 || max1 < min0) throw NumericalError("complete separation: coefficients diverge");

  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd Y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = x[static_cast<std::size_t>(i)];
    Y(i) = static_cast<double>(y[static_cast<std::size_t>(i)]);
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd p(n), w(n);
  Eigen::MatrixXd info(2, 2);
  bool converged = false;
  int it = 0;
  for (it = 1; it <= opt.max_iterations; ++it) {
    const Eigen::VectorXd eta = X * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      p(i) = logistic(eta(i));
      w(i) = p(i) * (1.0 - p(i));
    }
    info = X.transpose() * w.asDiagonal() * X;
    const Eigen::VectorXd score = X.transpose() * (Y - p);
    const Eigen::VectorXd delta = info.ldlt().solve(score);
    if (!delta.allFinite()) break;
    beta += delta;
    if (beta.cwiseAbs().maxCoeff() > 1e6) break;
    if (delta.cwiseAbs().maxCoeff() <= opt.tolerance * (1.0 + beta.cwiseAbs().maxCoeff())) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NumericalError("logistic IRLS did not converge (possible quasi-complete separation)");

  FittedModel fit;
  fit.included_terms = {intercept_name, slope_name};
  fit.estimates = beta;
  fit.n = static_cast<std::size_t>(n);
  fit.iterations = it;
  const Eigen::VectorXd eta = X * beta;
  double ll = 0.0;
  fit.residuals.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    // log p = -log(1 + e^-eta), log(1 - p) = -log(1 + e^eta)
    const double e = eta(i);
    ll += Y(i) > 0.5 ? -std::log1p(std::exp(-e)) : -std::log1p(std::exp(e));
    p(i) = logistic(e);
    w(i) = p(i) * (1.0 - p(i));
    fit.residuals[static_cast<std::size_t>(i)] = Y(i) - p(i);
  }
  info = X.transpose() * w.asDiagonal() * X;
  fit.covariance = info.ldlt().solve(Eigen::MatrixXd::Identity(2, 2));
  fit.covariance = 0.5 * (fit.covariance + fit.covariance.transpose());
  fit.loglik = ll;
  fit.deviance = -2.0 * ll;
  fit.aic = stats::aic(2, ll);

  const double pbar = static_cast<double>(n_pos) / static_cast<double>(n);
  const double ll_null = static_cast<double>(n) * (pbar * std::log(pbar) + (1.0 - pbar) * std::log(1.0 - pbar));
  fit.r_squared = std::clamp(1.0 - ll / ll_null, 0.0, 1.0);  // McFadden
  return fit;
}

enum class ExpressionRegressor { valence, arousal };

struct ExpressionFit {
  FittedModel pos;
  FittedModel neg;
};

// Post polarity against the state reported after writing (v_post or a_post),
// over the records that carry sentiment labels.
inline ExpressionFit fit_expression(std::span<const ObservationRecord> data, ExpressionRegressor regressor) {
  std::vector<double> x;
  std::vector<int> pos, neg;
  for (const auto& r : data) {
    if (!r.post_pos || !r.post_neg) continue;
    x.push_back(regressor == ExpressionRegressor::valence ? r.v_post : r.a_post);
    pos.push_back(*r.post_pos ? 1 : 0);
    neg.push_back(*r.post_neg ? 1 : 0);
  }
  if (x.empty()) throw ValidationError("no records with post_pos/post_neg labels");
  const std::string slope = regressor == ExpressionRegressor::valence ? "alpha_v" : "alpha_a";
  return {fit_logistic(x, pos, "p0", slope), fit_logistic(x, neg, "p0", slope)};
}

}  // namespace cyberemo
