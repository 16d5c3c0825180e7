#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace cyberemo::stats {

inline double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

// Two-sided p-value of a Wald z statistic.
inline double wald_p_value(double estimate, double std_error) {
  if (!(std_error > 0.0)) return estimate == 0.0 ? 1.0 : 0.0;
  return std::erfc(std::abs(estimate / std_error) / std::numbers::sqrt2);
}

// Significance marks at the 0.01 / 0.001 / 1e-10 levels.
inline std::string stars(double p) {
  if (p < 1e-10) return "***";
  if (p < 1e-3) return "**";
  if (p < 1e-2) return "*";
  return "";
}

// Sturges' rule: ceil(log2(n) + 1) bins.
inline std::size_t sturges_bins(std::size_t n) {
  if (n == 0) throw ValidationError("Sturges' rule needs at least one observation");
  return static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n)) + 1.0));
}

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;

  double width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width(); }
  // Normalized so that the histogram integrates to one.
  double density(std::size_t i, std::size_t n) const {
    return static_cast<double>(counts[i]) / (static_cast<double>(n) * width());
  }
};

// Equal-width bins over [min, max]; the maximum falls into the last bin.
inline Histogram histogram(std::span<const double> xs, std::size_t n_bins) {
  if (xs.empty() || n_bins == 0) throw ValidationError("histogram needs data and at least one bin");
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  Histogram h{*mn, *mx, std::vector<std::size_t>(n_bins, 0)};
  if (h.hi == h.lo) {
    h.counts[0] = xs.size();
    h.hi = h.lo + 1.0;
    return h;
  }
  const double w = h.width();
  for (double x : xs) {
    auto i = static_cast<std::size_t>((x - h.lo) / w);
    h.counts[std::min(i, n_bins - 1)]++;
  }
  return h;
}

inline double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Population (method-of-moments) standard deviation.
inline double sd_moments(std::span<const double> xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

inline double sum_sq_dev(std::span<const double> xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss;
}

// Gaussian log-likelihood at the ML variance RSS/n.
inline double gaussian_loglik(double rss, std::size_t n) {
  const double nn = static_cast<double>(n);
  return -0.5 * nn * (std::log(2.0 * std::numbers::pi * rss / nn) + 1.0);
}

inline double aic(std::size_t k, double loglik) { return 2.0 * static_cast<double>(k) - 2.0 * loglik; }

}  // namespace cyberemo::stats
