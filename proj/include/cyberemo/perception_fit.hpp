#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "error.hpp"
#include "fitted_model.hpp"
#include "nls.hpp"
#include "observations.hpp"
#include "stats.hpp"

namespace cyberemo {

enum class Target { valence, arousal };

// Naming of the regression: relaxation rate, baseline and the polynomial
// coefficient prefix ("b" for valence, "d" for arousal).
struct TargetNames {
  const char* rate;
  const char* baseline;
  const char* poly;
};

inline TargetNames names_for(Target t) {
  return t == Target::valence ? TargetNames{"gamma_v", "b", "b"} : TargetNames{"gamma_a", "d", "d"};
}

inline std::string poly_term(Target t, int power) { return names_for(t).poly + std::to_string(power); }

// Subset of the perception polynomial coefficients, bit k <-> power k.
struct TermMask {
  unsigned bits = 0xF;

  bool has(int power) const { return (bits >> power) & 1u; }
  int count() const { return std::popcount(bits & 0xFu); }

  static TermMask from_names(Target t, std::span<const std::string> names) {
    TermMask m{0};
    for (const auto& n : names) {
      bool found = false;
      for (int k = 0; k < 4; ++k)
        if (n == poly_term(t, k)) {
          m.bits |= 1u << k;
          found = true;
        }
      if (!found) throw ValidationError("unknown perception term '" + n + "'");
    }
    return m;
  }

  std::vector<std::string> names(Target t) const {
    std::vector<std::string> out;
    for (int k = 0; k < 4; ++k)
      if (has(k)) out.push_back(poly_term(t, k));
    return out;
  }
};

namespace detail {

struct PerceptionData {
  Eigen::VectorXd x;  // pre-exposure state
  Eigen::VectorXd g;  // field regressor: h (valence) or |h| (arousal)
  Eigen::VectorXd y;  // velocity
  Eigen::VectorXd h;  // signed field
};

inline PerceptionData extract(std::span<const ObservationRecord> data, Target target) {
  const auto n = static_cast<Eigen::Index>(data.size());
  PerceptionData d{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = data[static_cast<std::size_t>(i)];
    if (auto err = check_record(r); !err.empty())
      throw ValidationError("record " + std::to_string(i) + ": " + err);
    d.h(i) = r.h;
    if (target == Target::valence) {
      d.x(i) = r.v_pre;
      d.g(i) = r.h;
      d.y(i) = r.valence_velocity();
    } else {
      d.x(i) = r.a_pre;
      d.g(i) = std::abs(r.h);
      d.y(i) = r.arousal_velocity();
    }
  }
  return d;
}

}  // namespace detail

// Non-linear least squares fit of
//   velocity = -rate * (x - baseline) + g * sum_{k in terms} c_k x^k
// with x the pre-exposure value and g = h for valence, |h| for arousal.
// Estimates are ordered rate, baseline, then the included c_k by power.
// `signed_field_term` appends a coefficient "h_signed" on the raw signed h,
// the extension used to test whether arousal depends on field polarity.
inline FittedModel fit_perception(std::span<const ObservationRecord> data, Target target, TermMask terms,
                                  bool signed_field_term = false, const nls::Options& opt = {}) {
  const auto tn = names_for(target);
  std::vector<std::string> names{tn.rate, tn.baseline};
  std::vector<int> powers;
  for (int k = 0; k < 4; ++k)
    if (terms.has(k)) {
      powers.push_back(k);
      names.push_back(poly_term(target, k));
    }
  if (signed_field_term) names.push_back("h_signed");
  const auto n_basis = static_cast<Eigen::Index>(names.size()) - 2;
  const auto k_params = static_cast<Eigen::Index>(names.size());
  if (data.size() < 2 * names.size())
    throw ValidationError("need at least " + std::to_string(2 * names.size()) + " records to fit " +
                          std::to_string(names.size()) + " parameters");

  const auto d = detail::extract(data, target);
  const Eigen::Index n = d.y.size();

  auto basis = [&](Eigen::Index i, Eigen::Index q) {
    return q < static_cast<Eigen::Index>(powers.size()) ? d.g(i) * std::pow(d.x(i), powers[static_cast<std::size_t>(q)])
                                                        : d.h(i);
  };

  if (!powers.empty()) {
    std::set<double> levels(d.g.data(), d.g.data() + n);
    if (levels.size() < 2) {
      std::vector<std::string> perception(names.begin() + 2, names.end());
      std::string msg = "perception terms are unidentifiable (field regressor takes a single value):";
      for (const auto& p : perception) msg += " " + p;
      throw IdentifiabilityError(msg, perception);
    }
  }

  // Start from the linear reparametrization intercept = rate*baseline,
  // slope = -rate.
  Eigen::MatrixXd lin(n, k_params);
  lin.col(0).setOnes();
  lin.col(1) = d.x;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index q = 0; q < n_basis; ++q) lin(i, q + 2) = basis(i, q);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(lin);
  if (qr.rank() < k_params) {
    std::vector<std::string> collinear;
    for (Eigen::Index i = qr.rank(); i < k_params; ++i)
      collinear.push_back(names[static_cast<std::size_t>(qr.colsPermutation().indices()(i))]);
    std::string msg = "rank-deficient design; collinear terms:";
    for (const auto& c : collinear) msg += " " + c;
    throw IdentifiabilityError(msg, collinear);
  }
  const Eigen::VectorXd lin_coef = qr.solve(d.y);
  Eigen::VectorXd theta(k_params);
  theta(0) = -lin_coef(1);
  theta(1) = std::abs(theta(0)) > 1e-12 ? lin_coef(0) / theta(0) : 0.0;
  theta.tail(k_params - 2) = lin_coef.tail(k_params - 2);

  auto model = [&](const Eigen::VectorXd& th, Eigen::VectorXd& r, Eigen::MatrixXd& j) {
    r.resize(n);
    j.resize(n, k_params);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = d.x(i);
      double pred = -th(0) * (x - th(1));
      j(i, 0) = -(x - th(1));
      j(i, 1) = th(0);
      for (Eigen::Index q = 0; q < n_basis; ++q) {
        const double bq = basis(i, q);
        pred += th(q + 2) * bq;
        j(i, q + 2) = bq;
      }
      r(i) = d.y(i) - pred;
    }
  };

  const nls::Result res = nls::gauss_newton(model, theta, names, opt);

  FittedModel fit;
  fit.included_terms = names;
  fit.estimates = res.theta;
  fit.n = static_cast<std::size_t>(n);
  fit.rss = res.rss;
  fit.iterations = res.iterations;
  fit.residuals.assign(res.residuals.data(), res.residuals.data() + n);

  const double tss = stats::sum_sq_dev(std::span<const double>(d.y.data(), static_cast<std::size_t>(n)));
  fit.r_squared = tss > 0.0 ? std::clamp(1.0 - res.rss / tss, 0.0, 1.0) : (res.rss == 0.0 ? 1.0 : 0.0);

  const Eigen::MatrixXd jtj = res.jacobian.transpose() * res.jacobian;
  const double sigma2 = n > k_params ? res.rss / static_cast<double>(n - k_params) : 0.0;
  fit.covariance = jtj.ldlt().solve(Eigen::MatrixXd::Identity(k_params, k_params)) * sigma2;
  fit.covariance = 0.5 * (fit.covariance + fit.covariance.transpose());

  fit.loglik = stats::gaussian_loglik(res.rss, fit.n);
  fit.aic = stats::aic(static_cast<std::size_t>(k_params), fit.loglik);
  try {
    fit.residual_normal_r2 = residual_diagnostics(fit.residuals).residual_normal_r2;
  } catch (const std::exception&) {
    fit.residual_normal_r2 = std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

inline FittedModel fit_valence(std::span<const ObservationRecord> data, std::span<const std::string> terms) {
  return fit_perception(data, Target::valence, TermMask::from_names(Target::valence, terms));
}

inline FittedModel fit_arousal(std::span<const ObservationRecord> data, std::span<const std::string> terms) {
  return fit_perception(data, Target::arousal, TermMask::from_names(Target::arousal, terms));
}

struct AicRow {
  std::vector<std::string> terms;  // perception terms only
  std::size_t k = 0;               // estimated coefficients incl. rate and baseline
  double aic = std::numeric_limits<double>::quiet_NaN();
  double loglik = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
  std::string message;
};

struct TermSelection {
  std::vector<std::string> terms;  // winning perception terms
  FittedModel fit;                 // refit of the winner
  std::vector<AicRow> table;       // one row per evaluated subset
  std::vector<std::string> warnings;
};

// Exhaustive AIC search over the 16 subsets of the four polynomial
// coefficients; rate and baseline are always kept. Ties go to the subset
// with fewer terms, then to the subset enumerated first (lower bit mask).
inline TermSelection select_terms(std::span<const ObservationRecord> data, Target target) {
  TermSelection out;
  int best = -1;
  double best_aic = std::numeric_limits<double>::infinity();
  std::vector<FittedModel> fits(16);

  for (unsigned mask = 0; mask < 16; ++mask) {
    const TermMask m{mask};
    AicRow row;
    row.terms = m.names(target);
    row.k = 2 + static_cast<std::size_t>(m.count());
    try {
      fits[mask] = fit_perception(data, target, m);
      row.aic = fits[mask].aic;
      row.loglik = fits[mask].loglik;
      row.ok = true;
    } catch (const NumericalError& e) {
      row.message = e.what();
      out.warnings.push_back("subset {" + [&] {
        std::string s;
        for (const auto& t : row.terms) s += (s.empty() ? "" : ",") + t;
        return s;
      }() + "} excluded: " + e.what());
    }
    out.table.push_back(row);
    if (!row.ok) continue;

    bool better = false;
    if (best < 0) {
      better = true;
    } else {
      const double tol = std::isfinite(best_aic) ? 1e-10 * std::max(1.0, std::abs(best_aic)) : 0.0;
      const int cnt = m.count(), best_cnt = TermMask{static_cast<unsigned>(best)}.count();
      if (row.aic < best_aic - tol) better = true;
      else if (std::abs(row.aic - best_aic) <= tol || row.aic == best_aic)
        better = cnt < best_cnt;
    }
    if (better) {
      best = static_cast<int>(mask);
      best_aic = row.aic;
    }
  }
  if (best < 0) throw NumericalError("every candidate subset failed to fit");
  out.terms = TermMask{static_cast<unsigned>(best)}.names(target);
  out.fit = std::move(fits[static_cast<std::size_t>(best)]);
  return out;
}

}  // namespace cyberemo
