#pragma once

#include <algorithm>
#include <span>

#include "error.hpp"
#include "stats.hpp"

namespace cyberemo {

struct ResidualDiagnostics {
  double residual_normal_r2 = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  stats::Histogram histogram;
};

// Moment-matched normal against the Sturges-binned residual density; the
// score is the R^2 between empirical and normal densities at bin centers.
inline ResidualDiagnostics residual_diagnostics(std::span<const double> residuals) {
  if (residuals.size() < 8) throw ValidationError("residual diagnostics need at least 8 residuals");
  ResidualDiagnostics out;
  out.mean = stats::mean(residuals);
  out.sd = stats::sd_moments(residuals);
  const auto [lo, hi] = std::minmax_element(residuals.begin(), residuals.end());
  if (*lo == *hi || !(out.sd > 0.0)) throw NumericalError("residuals have zero variance");

  const std::size_t n = residuals.size();
  out.histogram = stats::histogram(residuals, stats::sturges_bins(n));
  const auto& hist = out.histogram;
  const std::size_t k = hist.counts.size();

  double dens_mean = 0.0;
  for (std::size_t i = 0; i < k; ++i) dens_mean += hist.density(i, n);
  dens_mean /= static_cast<double>(k);

  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double emp = hist.density(i, n);
    const double fit = stats::normal_pdf(hist.center(i), out.mean, out.sd);
    sse += (emp - fit) * (emp - fit);
    sst += (emp - dens_mean) * (emp - dens_mean);
  }
  out.residual_normal_r2 = sst > 0.0 ? 1.0 - sse / sst : 0.0;
  return out;
}

}  // namespace cyberemo
