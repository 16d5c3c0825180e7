#pragma once

#include <fstream>
#include <ostream>
#include <set>
#include <string>

#include "json.hpp"

#include "csv.hpp"
#include "error.hpp"
#include "fitted_model.hpp"
#include "integrator.hpp"
#include "logistic.hpp"
#include "model.hpp"
#include "participation_fit.hpp"
#include "perception_fit.hpp"
#include "posterior.hpp"
#include "simulation.hpp"

namespace cyberemo::io {

using nlohmann::json;

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
  std::set<std::string> k(known.begin(), known.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!k.contains(it.key())) throw ValidationError(where + ": unknown field '" + it.key() + "'");
}

template <class T>
void read(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline json to_json(const ModelParams& p) {
  const auto& v = p.valence;
  const auto& a = p.arousal;
  const auto& e = p.expression;
  return json{
      {"valence", {{"gamma_v", v.gamma_v}, {"b", v.b}, {"b0", v.b0}, {"b1", v.b1}, {"b2", v.b2}, {"b3", v.b3}, {"A_v", v.A_v}}},
      {"arousal", {{"gamma_a", a.gamma_a}, {"d", a.d}, {"d0", a.d0}, {"d1", a.d1}, {"d2", a.d2}, {"d3", a.d3}, {"A_a", a.A_a}}},
      {"expression",
       {{"p0", e.p0},
        {"alpha", e.alpha},
        {"tau", e.tau},
        {"pos_intercept", e.pos_intercept},
        {"pos_slope_v", e.pos_slope_v},
        {"neg_intercept", e.neg_intercept},
        {"neg_slope_v", e.neg_slope_v},
        {"feedback_mode", e.feedback_mode == FeedbackMode::reset_zero ? "reset_zero" : "proportional"},
        {"feedback_lambda", e.feedback_lambda}}},
      {"clamp_states", p.clamp_states}};
}

// Missing fields keep the published defaults.
inline ModelParams params_from_json(const json& j) {
  using detail::read;
  detail::reject_unknown(j, {"valence", "arousal", "expression", "clamp_states"}, "params");
  ModelParams p;
  if (j.contains("valence")) {
    const auto& v = j.at("valence");
    detail::reject_unknown(v, {"gamma_v", "b", "b0", "b1", "b2", "b3", "A_v"}, "params.valence");
    read(v, "gamma_v", p.valence.gamma_v);
    read(v, "b", p.valence.b);
    read(v, "b0", p.valence.b0);
    read(v, "b1", p.valence.b1);
    read(v, "b2", p.valence.b2);
    read(v, "b3", p.valence.b3);
    read(v, "A_v", p.valence.A_v);
  }
  if (j.contains("arousal")) {
    const auto& a = j.at("arousal");
    detail::reject_unknown(a, {"gamma_a", "d", "d0", "d1", "d2", "d3", "A_a"}, "params.arousal");
    read(a, "gamma_a", p.arousal.gamma_a);
    read(a, "d", p.arousal.d);
    read(a, "d0", p.arousal.d0);
    read(a, "d1", p.arousal.d1);
    read(a, "d2", p.arousal.d2);
    read(a, "d3", p.arousal.d3);
    read(a, "A_a", p.arousal.A_a);
  }
  if (j.contains("expression")) {
    const auto& e = j.at("expression");
    detail::reject_unknown(e, {"p0", "alpha", "tau", "pos_intercept", "pos_slope_v", "neg_intercept", "neg_slope_v",
                               "feedback_mode", "feedback_lambda"},
                           "params.expression");
    read(e, "p0", p.expression.p0);
    read(e, "alpha", p.expression.alpha);
    read(e, "tau", p.expression.tau);
    read(e, "pos_intercept", p.expression.pos_intercept);
    read(e, "pos_slope_v", p.expression.pos_slope_v);
    read(e, "neg_intercept", p.expression.neg_intercept);
    read(e, "neg_slope_v", p.expression.neg_slope_v);
    read(e, "feedback_lambda", p.expression.feedback_lambda);
    std::string mode;
    read(e, "feedback_mode", mode);
    if (mode == "reset_zero") p.expression.feedback_mode = FeedbackMode::reset_zero;
    else if (mode == "proportional") p.expression.feedback_mode = FeedbackMode::proportional;
    else if (!mode.empty()) throw ValidationError("feedback_mode must be reset_zero or proportional");
  }
  read(j, "clamp_states", p.clamp_states);
  if (!p.valid()) throw ValidationError("params violate invariants (gamma > 0, A >= 0, feedback_lambda in [0, 1])");
  return p;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline EmotionState state_from_json(const json& j) {
  detail::reject_unknown(j, {"valence", "arousal"}, "initial_state");
  EmotionState s;
  detail::read(j, "valence", s.valence);
  detail::read(j, "arousal", s.arousal);
  return s;
}

// Optional "integrator" block of a scenario file.
inline IntegratorConfig integrator_from_json(const json& scenario, std::uint64_t seed) {
  IntegratorConfig cfg;
  cfg.seed = seed;
  if (scenario.contains("integrator")) {
    const auto& j = scenario.at("integrator");
    detail::reject_unknown(j, {"dt", "noise_distribution"}, "integrator");
    detail::read(j, "dt", cfg.dt);
    std::string noise;
    detail::read(j, "noise_distribution", noise);
    if (noise == "uniform_pm1") cfg.noise_distribution = NoiseDistribution::uniform_pm1;
    else if (noise == "standard_normal" || noise.empty()) cfg.noise_distribution = NoiseDistribution::standard_normal;
    else throw ValidationError("noise_distribution must be standard_normal or uniform_pm1");
  }
  cfg.validate();
  return cfg;
}

inline ReplayScenario replay_from_json(const json& j) {
  detail::reject_unknown(j, {"initial_state", "threads", "integrator"}, "replay scenario");
  ReplayScenario s;
  if (j.contains("initial_state")) s.initial_state = state_from_json(j.at("initial_state"));
  if (!j.contains("threads") || !j.at("threads").is_array()) throw ValidationError("replay scenario needs a 'threads' array");
  for (const auto& t : j.at("threads")) {
    detail::reject_unknown(t, {"h", "exposure_minutes"}, "thread");
    ThreadExposure th;
    detail::read(t, "h", th.h);
    detail::read(t, "exposure_minutes", th.exposure_minutes);
    s.thread_sequence.push_back(th);
  }
  s.validate();
  return s;
}

inline ForumScenario forum_from_json(const json& j) {
  detail::reject_unknown(j, {"n_agents", "duration", "gamma_h", "impact", "initial_h", "initial_state", "expression",
                             "pulses", "integrator", "runs"},
                         "forum scenario");
  ForumScenario s;
  detail::read(j, "n_agents", s.n_agents);
  detail::read(j, "duration", s.duration);
  detail::read(j, "gamma_h", s.gamma_h);
  detail::read(j, "impact", s.impact);
  detail::read(j, "initial_h", s.initial_h);
  detail::read(j, "expression", s.expression);
  if (j.contains("initial_state")) s.initial_state = state_from_json(j.at("initial_state"));
  if (j.contains("pulses")) {
    for (const auto& p : j.at("pulses")) {
      detail::reject_unknown(p, {"start", "duration", "h"}, "pulse");
      FieldPulse fp;
      detail::read(p, "start", fp.start);
      detail::read(p, "duration", fp.duration);
      detail::read(p, "h", fp.h);
      s.pulses.push_back(fp);
    }
  }
  s.validate();
  return s;
}

inline void write_trace_csv(std::ostream& os, const SimulationTrace& trace) {
  using csv::format_double;
  os << "t_minutes,valence,arousal,h,expressed,s\n";
  for (const auto& r : trace) {
    os << format_double(r.t_minutes) << ',' << format_double(r.state.valence) << ',' << format_double(r.state.arousal)
       << ',' << format_double(r.h) << ',' << (r.expressed ? 1 : 0) << ',';
    if (r.s) os << *r.s;
    os << '\n';
  }
}

inline void write_field_csv(std::ostream& os, const std::vector<FieldRow>& field) {
  using csv::format_double;
  os << "t_minutes,h,n_expressions\n";
  for (const auto& r : field) os << format_double(r.t_minutes) << ',' << format_double(r.h) << ',' << r.n_expressions << '\n';
}

inline void write_boundaries_csv(std::ostream& os, const std::vector<ThreadBoundary>& b) {
  using csv::format_double;
  os << "thread,h,t_start,t_end,valence_before,arousal_before,valence_after,arousal_after\n";
  for (const auto& r : b)
    os << r.thread_index << ',' << format_double(r.h) << ',' << format_double(r.t_start) << ','
       << format_double(r.t_end) << ',' << format_double(r.before.valence) << ',' << format_double(r.before.arousal)
       << ',' << format_double(r.after.valence) << ',' << format_double(r.after.arousal) << '\n';
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline json parameters_to_json(const FittedModel& f) {
  json params = json::array();
  for (const auto& name : f.included_terms) {
    const double est = f.estimate(name), se = f.std_error(name);
    const double p = stats::wald_p_value(est, se);
    params.push_back({{"name", name},
                      {"estimate", est},
                      {"std_error", se},
                      {"z", se > 0.0 ? est / se : 0.0},
                      {"p_value", p},
                      {"stars", stats::stars(p)}});
  }
  return params;
}

inline json fit_to_json(const FittedModel& f) {
  json j{{"n", f.n},
         {"parameters", parameters_to_json(f)},
         {"covariance", matrix_to_json(f.covariance)},
         {"included_terms", f.included_terms},
         {"r_squared", f.r_squared},
         {"loglik", f.loglik},
         {"aic", f.aic},
         {"iterations", f.iterations}};
  if (std::isfinite(f.rss)) j["rss"] = f.rss;
  if (std::isfinite(f.deviance)) j["deviance"] = f.deviance;
  if (std::isfinite(f.residual_normal_r2)) j["residual_normal_r2"] = f.residual_normal_r2;
  return j;
}

inline json selection_to_json(const TermSelection& sel) {
  json table = json::array();
  for (const auto& row : sel.table) {
    json r{{"terms", row.terms}, {"k", row.k}, {"status", row.ok ? "ok" : "failed"}};
    if (row.ok) {
      r["aic"] = row.aic;
      r["loglik"] = row.loglik;
    } else {
      r["message"] = row.message;
    }
    table.push_back(r);
  }
  return json{{"criterion", "AIC"}, {"selected_terms", sel.terms}, {"table", table}, {"warnings", sel.warnings}};
}

inline json participation_to_json(const ParticipationFit& f) {
  return json{{"target", "participation"}, {"n", f.n},     {"p0", f.p0}, {"alpha", f.alpha},
              {"tau", f.tau},               {"rss", f.rss}, {"r_squared", f.r_squared}};
}

// Estimates, covariance and names of a fit report; `model` picks one of the
// entries of a multi-model report ("pos"/"neg" of an expression fit).
struct PosteriorInput {
  Eigen::VectorXd estimates;
  Eigen::MatrixXd covariance;
  std::vector<std::string> names;
};

inline PosteriorInput posterior_input_from_json(const json& report, const std::string& model) {
  const json* j = &report;
  if (report.contains("models")) {
    if (model.empty()) throw ValidationError("report holds several models; choose one with --model");
    if (!report.at("models").contains(model)) throw ValidationError("report has no model '" + model + "'");
    j = &report.at("models").at(model);
  }
  if (!j->contains("parameters") || !j->contains("covariance"))
    throw ValidationError("report lacks 'parameters' and 'covariance'; posterior needs a least-squares or logistic fit");
  PosteriorInput in;
  const auto& params = j->at("parameters");
  const auto k = static_cast<Eigen::Index>(params.size());
  in.estimates.resize(k);
  in.covariance.resize(k, k);
  try {
    for (Eigen::Index i = 0; i < k; ++i) {
      in.names.push_back(params[static_cast<std::size_t>(i)].at("name").get<std::string>());
      in.estimates(i) = params[static_cast<std::size_t>(i)].at("estimate").get<double>();
    }
    const auto& cov = j->at("covariance");
    if (static_cast<Eigen::Index>(cov.size()) != k) throw ValidationError("covariance dimension mismatch");
    for (Eigen::Index r = 0; r < k; ++r) {
      if (static_cast<Eigen::Index>(cov[static_cast<std::size_t>(r)].size()) != k)
        throw ValidationError("covariance dimension mismatch");
      for (Eigen::Index c = 0; c < k; ++c)
        in.covariance(r, c) = cov[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed fit report: ") + e.what());
  }
  return in;
}

inline void write_posterior_samples(std::ostream& os, const Posterior& post) {
  for (std::size_t j = 0; j < post.parameters.size(); ++j) os << (j ? "," : "") << post.parameters[j].name;
  os << '\n';
  for (std::size_t i = 0; i < post.n_draws; ++i) {
    for (std::size_t j = 0; j < post.parameters.size(); ++j)
      os << (j ? "," : "") << csv::format_double(post.parameters[j].samples[i]);
    os << '\n';
  }
}

inline void write_posterior_histograms(std::ostream& os, const Posterior& post) {
  using csv::format_double;
  os << "parameter,bin,lo,hi,count,density\n";
  for (const auto& p : post.parameters) {
    const auto& h = p.histogram;
    for (std::size_t b = 0; b < h.counts.size(); ++b)
      os << p.name << ',' << b << ',' << format_double(h.lo + static_cast<double>(b) * h.width()) << ','
         << format_double(h.lo + static_cast<double>(b + 1) * h.width()) << ',' << h.counts[b] << ','
         << format_double(h.density(b, post.n_draws)) << '\n';
  }
}

inline json posterior_summary_to_json(const Posterior& post) {
  json params = json::array();
  for (const auto& p : post.parameters)
    params.push_back({{"name", p.name},
                      {"mean", p.mean},
                      {"sd", p.sd},
                      {"q025", p.q025},
                      {"q975", p.q975},
                      {"bins", p.histogram.counts.size()}});
  return json{{"n_draws", post.n_draws}, {"parameters", params}};
}

}  // namespace cyberemo::io
