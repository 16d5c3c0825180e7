#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "error.hpp"
#include "observations.hpp"
#include "stats.hpp"

namespace cyberemo {

struct ParticipationFit {
  double p0 = 0.0;
  double alpha = 0.0;
  double tau = 0.0;
  double r_squared = 0.0;
  double rss = 0.0;
  std::size_t n = 0;
};

// Single-knot hinge regression of participation intent on arousal with the
// MARS basis max(0, a - tau):
//   intent = p0 + alpha * max(0, a - tau).
// At tau = 0 this is the forward law p0 + alpha * a * H(a - tau). The knot is
// searched over every observed arousal value plus 0; for each candidate the
// remaining two coefficients are ordinary least squares. Ties in RSS go to
// the knot closest to zero.
inline ParticipationFit fit_participation(std::span<const double> arousal, std::span<const double> intent) {
  if (arousal.size() != intent.size()) throw ValidationError("arousal and intent lengths differ");
  if (arousal.size() < 20) throw ValidationError("participation fit needs at least 20 records with intent");
  for (std::size_t i = 0; i < arousal.size(); ++i)
    if (!std::isfinite(arousal[i]) || !std::isfinite(intent[i]))
      throw ValidationError("non-finite arousal or intent at record " + std::to_string(i));

  const auto [amin, amax] = std::minmax_element(arousal.begin(), arousal.end());
  if (*amin == *amax) throw NumericalError("degenerate knot grid: all arousal values are equal");

  const std::size_t n = arousal.size();
  const double nn = static_cast<double>(n);
  const double y_mean = stats::mean(intent);
  const double tss = stats::sum_sq_dev(intent);

  ParticipationFit best;
  best.n = n;
  const auto [ymin, ymax] = std::minmax_element(intent.begin(), intent.end());
  if (*ymin == *ymax) {
    best.p0 = *ymin;
    return best;
  }

  std::vector<double> knots(arousal.begin(), arousal.end());
  knots.push_back(0.0);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  const double tie_tol = 1e-12 * tss;
  bool have = false;
  for (double tau : knots) {
    double sx = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = std::max(0.0, arousal[i] - tau);
      sx += x;
      sxx += x * x;
      sxy += x * (intent[i] - y_mean);
    }
    const double x_mean = sx / nn;
    const double sxx_c = sxx - nn * x_mean * x_mean;
    double alpha = 0.0, p0 = y_mean;
    if (sxx_c > 1e-14 * std::max(1.0, sxx)) {
      alpha = sxy / sxx_c;
      p0 = y_mean - alpha * x_mean;
    }
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = std::max(0.0, arousal[i] - tau);
      const double r = intent[i] - p0 - alpha * x;
      rss += r * r;
    }
    const bool better = !have || rss < best.rss - tie_tol ||
                        (std::abs(rss - best.rss) <= tie_tol && std::abs(tau) < std::abs(best.tau));
    if (better) {
      have = true;
      best.p0 = p0;
      best.alpha = alpha;
      best.tau = tau;
      best.rss = rss;
    }
  }
  best.r_squared = std::clamp(1.0 - best.rss / tss, 0.0, 1.0);
  return best;
}

// Uses the records that carry an intent; arousal is the report given
// together with the intent (a_post).
inline ParticipationFit fit_participation(std::span<const ObservationRecord> data) {
  std::vector<double> a, y;
  for (const auto& r : data)
    if (r.participation_intent) {
      a.push_back(r.a_post);
      y.push_back(*r.participation_intent);
    }
  return fit_participation(a, y);
}

}  // namespace cyberemo
