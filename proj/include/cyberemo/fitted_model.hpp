#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "stats.hpp"

namespace cyberemo {

// Point estimates with their asymptotic covariance and fit diagnostics.
// `included_terms` names the entries of `estimates`, in order.
struct FittedModel {
  std::vector<std::string> included_terms;
  Eigen::VectorXd estimates;
  Eigen::MatrixXd covariance;
  double r_squared = 0.0;
  std::size_t n = 0;
  std::vector<double> residuals;
  double residual_normal_r2 = std::numeric_limits<double>::quiet_NaN();
  double loglik = 0.0;
  double deviance = std::numeric_limits<double>::quiet_NaN();  // logistic fits only
  double rss = std::numeric_limits<double>::quiet_NaN();       // least-squares fits only
  double aic = 0.0;
  int iterations = 0;

  std::size_t index_of(const std::string& term) const {
    for (std::size_t i = 0; i < included_terms.size(); ++i)
      if (included_terms[i] == term) return i;
    throw std::out_of_range("term '" + term + "' is not part of the fit");
  }
  bool has(const std::string& term) const {
    for (const auto& t : included_terms)
      if (t == term) return true;
    return false;
  }
  double estimate(const std::string& term) const { return estimates(static_cast<Eigen::Index>(index_of(term))); }
  double std_error(const std::string& term) const {
    const auto i = static_cast<Eigen::Index>(index_of(term));
    return std::sqrt(std::max(0.0, covariance(i, i)));
  }
  double p_value(const std::string& term) const { return stats::wald_p_value(estimate(term), std_error(term)); }
};

}  // namespace cyberemo
