#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "error.hpp"
#include "model.hpp"
#include "observations.hpp"
#include "rng.hpp"

namespace cyberemo::synthetic {

// Experiment-style observations generated from known parameters. Velocities
// follow the discrete per-event regression exactly, with Gaussian noise whose
// variance is set so that the population R^2 over the drawn design equals the
// requested value.
struct Options {
  std::size_t n = 1271;
  double valence_r2 = 0.52;
  double arousal_r2 = 0.28;
  double participation_r2 = 0.14;
  std::size_t n_expression = 182;
  // Short exposures keep post-exposure reports inside [-1, 1] without
  // clamping, which would bias the fit.
  double dt_minutes = 0.05;
  double state_range = 0.8;
  std::size_t threads_per_participant = 10;
  ModelParams truth;
};

struct Dataset {
  std::vector<ObservationRecord> records;
  double sigma_v = 0.0;  // velocity noise SD actually used
  double sigma_a = 0.0;
  double sigma_p = 0.0;  // intent noise SD before clipping to [0, 1]
};

namespace detail {

inline double poly3(double c0, double c1, double c2, double c3, double x) {
  return c0 + c1 * x + c2 * x * x + c3 * x * x * x;
}

inline double variance(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size());
}

inline double noise_sd_for_r2(const std::vector<double>& signal, double r2) {
  if (!(r2 > 0.0 && r2 <= 1.0)) throw ValidationError("target R^2 must lie in (0, 1]");
  return std::sqrt(variance(signal) * (1.0 / r2 - 1.0));
}

// R^2 of the simple regression of y on x.
inline double simple_r2(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  return (sxx > 0.0 && syy > 0.0) ? sxy * sxy / (sxx * syy) : 0.0;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace detail

inline Dataset generate(std::uint64_t seed, const Options& opt = {}) {
  using detail::poly3;
  const auto& V = opt.truth.valence;
  const auto& A = opt.truth.arousal;
  const auto& E = opt.truth.expression;
  Rng rng = Rng::substream(seed, 0, 0, Channel::synthetic);

  const std::size_t n = opt.n;
  std::vector<double> h(n), v0(n), a0(n), sig_v(n), sig_a(n), eps_v(n), eps_a(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = static_cast<double>(static_cast<int>(rng() % 3) - 1);
    v0[i] = opt.state_range * rng.uniform_pm1();
    a0[i] = opt.state_range * rng.uniform_pm1();
    eps_v[i] = rng.normal();
    eps_a[i] = rng.normal();
    sig_v[i] = -V.gamma_v * (v0[i] - V.b) + h[i] * poly3(V.b0, V.b1, V.b2, V.b3, v0[i]);
    sig_a[i] = -A.gamma_a * (a0[i] - A.d) + std::abs(h[i]) * poly3(A.d0, A.d1, A.d2, A.d3, a0[i]);
  }

  Dataset ds;
  ds.sigma_v = detail::noise_sd_for_r2(sig_v, opt.valence_r2);
  ds.sigma_a = detail::noise_sd_for_r2(sig_a, opt.arousal_r2);

  ds.records.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = ds.records[i];
    r.participant_id = "p" + std::to_string(i / opt.threads_per_participant);
    r.study_id = "synthetic";
    r.h = h[i];
    r.v_pre = v0[i];
    r.a_pre = a0[i];
    r.dt_minutes = opt.dt_minutes;
    r.v_post = v0[i] + opt.dt_minutes * (sig_v[i] + ds.sigma_v * eps_v[i]);
    r.a_post = a0[i] + opt.dt_minutes * (sig_a[i] + ds.sigma_a * eps_a[i]);
    if (!in_unit(r.v_post) || !in_unit(r.a_post))
      throw NumericalError("synthetic report left [-1, 1]; lower dt_minutes or state_range");
  }

  // Participation intent: hinge signal plus clipped noise, the noise level
  // found by bisection on the realized R^2 against the true regressor.
  std::vector<double> hinge(n), base(n), eps_p(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = ds.records[i].a_post;
    hinge[i] = a > E.tau ? a : 0.0;
    base[i] = E.p0 + E.alpha * hinge[i];
    eps_p[i] = rng.normal();
  }
  auto realized = [&](double sd) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::clamp(base[i] + sd * eps_p[i], 0.0, 1.0);
    return detail::simple_r2(hinge, y);
  };
  double lo = 0.0, hi = 2.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (realized(mid) > opt.participation_r2 ? lo : hi) = mid;
  }
  ds.sigma_p = 0.5 * (lo + hi);
  realized(ds.sigma_p);
  for (std::size_t i = 0; i < n; ++i) ds.records[i].participation_intent = y[i];

  for (std::size_t i = 0; i < std::min(opt.n_expression, n); ++i) {
    auto& r = ds.records[i];
    r.post_pos = rng.uniform() < detail::sigmoid(E.pos_intercept + E.pos_slope_v * r.v_post);
    r.post_neg = rng.uniform() < detail::sigmoid(E.neg_intercept + E.neg_slope_v * r.v_post);
    r.post_kind = i % 2 == 0 ? PostKind::first_post : PostKind::reply;
  }
  return ds;
}

}  // namespace cyberemo::synthetic
