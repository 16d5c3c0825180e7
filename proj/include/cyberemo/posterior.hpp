#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "fitted_model.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace cyberemo {

struct ParameterPosterior {
  std::string name;
  std::vector<double> samples;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  stats::Histogram histogram;  // Sturges bins
};

struct Posterior {
  std::vector<ParameterPosterior> parameters;
  std::size_t n_draws = 0;
};

inline double quantile_sorted(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Draws from N(estimates, covariance): the normal-prior posterior
// approximation around the least-squares optimum. The covariance square root
// comes from its eigendecomposition, so singular (and zero) covariances are
// accepted as long as no eigenvalue is materially negative.
inline Posterior simulate_posterior(const Eigen::VectorXd& estimates, const Eigen::MatrixXd& covariance,
                                    const std::vector<std::string>& names, std::size_t n_draws, std::uint64_t seed) {
  const Eigen::Index k = estimates.size();
  if (covariance.rows() != k || covariance.cols() != k || static_cast<Eigen::Index>(names.size()) != k)
    throw ValidationError("estimates, covariance and names disagree in dimension");
  if (n_draws == 0) throw ValidationError("n_draws must be positive");
  if (!covariance.allFinite()) throw NumericalError("covariance has non-finite entries");
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + covariance.cwiseAbs().maxCoeff()))
    throw NumericalError("covariance is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  if (lambda.minCoeff() < -1e-10 * scale) throw NumericalError("covariance is not positive semidefinite");
  const Eigen::MatrixXd root = eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();

  Posterior post;
  post.n_draws = n_draws;
  post.parameters.resize(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) {
    post.parameters[static_cast<std::size_t>(j)].name = names[static_cast<std::size_t>(j)];
    post.parameters[static_cast<std::size_t>(j)].samples.reserve(n_draws);
  }

  Rng rng = Rng::substream(seed, 0, 0, Channel::posterior);
  Eigen::VectorXd z(k);
  for (std::size_t draw = 0; draw < n_draws; ++draw) {
    for (Eigen::Index j = 0; j < k; ++j) z(j) = rng.normal();
    const Eigen::VectorXd x = estimates + root * z;
    for (Eigen::Index j = 0; j < k; ++j) post.parameters[static_cast<std::size_t>(j)].samples.push_back(x(j));
  }

  const std::size_t bins = stats::sturges_bins(n_draws);
  for (auto& p : post.parameters) {
    p.mean = stats::mean(p.samples);
    p.sd = n_draws > 1 ? std::sqrt(stats::sum_sq_dev(p.samples) / static_cast<double>(n_draws - 1)) : 0.0;
    std::vector<double> sorted = p.samples;
    std::sort(sorted.begin(), sorted.end());
    p.q025 = quantile_sorted(sorted, 0.025);
    p.q975 = quantile_sorted(sorted, 0.975);
    p.histogram = stats::histogram(p.samples, bins);
  }
  return post;
}

inline Posterior simulate_posterior(const FittedModel& fit, std::size_t n_draws = 10000, std::uint64_t seed = 0) {
  return simulate_posterior(fit.estimates, fit.covariance, fit.included_terms, n_draws, seed);
}

}  // namespace cyberemo
