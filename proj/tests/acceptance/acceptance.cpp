// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cyberemo/cli.hpp"
#include "cyberemo/cyberemo.hpp"
#include "cyberemo/serialization.hpp"
#include "cyberemo/synthetic.hpp"

namespace fs = std::filesystem;
using namespace cyberemo;

namespace {

constexpr int kReplications = 100;
constexpr std::uint64_t kSeedBase = 1000;  // replication r uses kSeedBase + r

struct Outcome {
  enum { pass, fail, skip } status;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<ObservationRecord> load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  return read_observations(in).records;
}

bool within_2se(const FittedModel& fit, const std::string& term, double truth) {
  return std::abs(fit.estimate(term) - truth) <= 2.0 * fit.std_error(term);
}

std::string coverage_summary(const std::map<std::string, int>& hits) {
  std::string s;
  for (const auto& [name, n] : hits) s += (s.empty() ? "" : " ") + name + "=" + std::to_string(n);
  return s;
}

bool all_at_least(const std::map<std::string, int>& hits, int need) {
  for (const auto& [name, n] : hits)
    if (n < need) return false;
  return true;
}

Outcome fixed_points() {
  const ModelParams p;
  const double dv = drift_v({0.056, 0.0}, 0.0, p.valence);
  const double da = drift_a({0.0, -0.442}, 0.0, p.arousal);
  return verdict(std::abs(dv) <= 1e-12 && std::abs(da) <= 1e-12, fmt("drift_v=%.3g drift_a=%.3g", dv, da));
}

Outcome integrator_convergence() {
  ModelParams p;
  p.valence.A_v = 0.0;
  p.arousal.A_a = 0.0;
  const double exact = 0.056 + 0.944 * std::exp(-0.367);
  auto error_at = [&](double dt) {
    IntegratorConfig cfg;
    cfg.dt = dt;
    const std::vector<FieldSegment> schedule{{1.0, 0.0}};
    const auto trace = integrate({1.0, -0.442}, schedule, p, cfg);
    return std::abs(trace.back().state.valence - exact);
  };
  const double e1 = error_at(1e-3), e2 = error_at(5e-4);
  const double ratio = e1 / e2;
  return verdict(e1 < 5e-4 && ratio > 1.8 && ratio < 2.2,
                 fmt("err(1e-3)=%.3e err(5e-4)=%.3e ratio=%.3f", e1, e2, ratio));
}

synthetic::Dataset replicate(int r) { return synthetic::generate(kSeedBase + static_cast<std::uint64_t>(r)); }

Outcome valence_round_trip() {
  const ValenceParams t;
  const std::vector<std::pair<std::string, double>> truth{
      {"gamma_v", t.gamma_v}, {"b", t.b}, {"b0", t.b0}, {"b2", t.b2}, {"b3", t.b3}};
  const std::vector<std::string> terms{"b0", "b2", "b3"};
  std::map<std::string, int> hits;
  int r2_ok = 0;
  double r2_min = 1.0, r2_max = 0.0;
  for (int r = 0; r < kReplications; ++r) {
    const auto fit = fit_valence(replicate(r).records, terms);
    for (const auto& [name, value] : truth) hits[name] += within_2se(fit, name, value);
    r2_ok += fit.r_squared >= 0.45 && fit.r_squared <= 0.60;
    r2_min = std::min(r2_min, fit.r_squared);
    r2_max = std::max(r2_max, fit.r_squared);
  }
  return verdict(all_at_least(hits, 95) && r2_ok == kReplications,
                 "within 2 SE: " + coverage_summary(hits) + fmt("; R2 in [%.3f, %.3f]", r2_min, r2_max));
}

Outcome arousal_round_trip() {
  const ArousalParams t;
  const std::vector<std::pair<std::string, double>> truth{
      {"gamma_a", t.gamma_a}, {"d", t.d}, {"d0", t.d0}, {"d1", t.d1}};
  const std::vector<std::string> terms{"d0", "d1"};
  std::map<std::string, int> hits;
  int invariant = 0;
  for (int r = 0; r < kReplications; ++r) {
    auto records = replicate(r).records;
    const auto fit = fit_arousal(records, terms);
    for (const auto& [name, value] : truth) hits[name] += within_2se(fit, name, value);
    for (auto& rec : records) rec.h = -rec.h + 0.0;
    const auto flipped = fit_arousal(records, terms);
    invariant += fit.estimates.size() == flipped.estimates.size() && (fit.estimates.array() == flipped.estimates.array()).all();
  }
  return verdict(all_at_least(hits, 95) && invariant == kReplications,
                 "within 2 SE: " + coverage_summary(hits) + fmt("; h-relabel bitwise invariant %d/%d", invariant, kReplications));
}

Outcome aic_selection() {
  int v_ok = 0, a_ok = 0;
  for (int r = 0; r < kReplications; ++r) {
    const auto records = replicate(r).records;
    const auto sv = select_terms(records, Target::valence);
    const auto sa = select_terms(records, Target::arousal);
    auto has = [](const std::vector<std::string>& terms, const char* t) {
      return std::find(terms.begin(), terms.end(), t) != terms.end();
    };
    v_ok += !has(sv.terms, "b1");
    a_ok += !has(sa.terms, "d2") && !has(sa.terms, "d3");
  }
  return verdict(v_ok >= 90 && a_ok >= 90, fmt("b1 excluded %d/%d; d2,d3 excluded %d/%d", v_ok, kReplications, a_ok,
                                               kReplications));
}

Outcome posterior_simulation() {
  const auto records = load(std::string(CYBEREMO_DATA_DIR) + "/reference_observations.csv");
  const std::vector<std::string> terms{"b0", "b2", "b3"};
  const auto fit = fit_valence(records, terms);
  const auto post = simulate_posterior(fit, 10000, 1);
  bool ok = post.n_draws == 10000;
  double worst = 0.0;
  for (std::size_t j = 0; j < post.parameters.size(); ++j) {
    const auto& p = post.parameters[j];
    const double mcse = p.sd / std::sqrt(static_cast<double>(post.n_draws));
    const double z = std::abs(p.mean - fit.estimates(static_cast<Eigen::Index>(j))) / mcse;
    worst = std::max(worst, z);
    ok = ok && z <= 3.0 && p.histogram.counts.size() == 15;
  }
  return verdict(ok, fmt("max |mean - estimate| = %.2f MC SE; bins=%zu", worst,
                         post.parameters.front().histogram.counts.size()));
}

Outcome participation_hinge() {
  const ExpressionParams t;
  std::vector<double> a, y;
  for (int i = 0; i <= 400; ++i) {
    const double ai = -1.0 + i / 200.0;
    a.push_back(ai);
    y.push_back(t.p0 + t.alpha * ai * (ai > t.tau ? 1.0 : 0.0));
  }
  const auto exact = fit_participation(a, y);
  const bool exact_ok =
      std::abs(exact.p0 - t.p0) <= 1e-8 && std::abs(exact.alpha - t.alpha) <= 1e-8 && std::abs(exact.tau - t.tau) <= 1e-8;
  int tau_ok = 0;
  double r2_sum = 0.0;
  for (int r = 0; r < kReplications; ++r) {
    const auto fit = fit_participation(replicate(r).records);
    tau_ok += std::abs(fit.tau - t.tau) <= 0.1;
    r2_sum += fit.r_squared;
  }
  return verdict(exact_ok && tau_ok >= 80,
                 fmt("noiseless p0=%.10f alpha=%.10f tau=%.3g; tau within 0.1 in %d/%d (mean R2 %.3f)", exact.p0,
                     exact.alpha, exact.tau, tau_ok, kReplications, r2_sum / kReplications));
}

Outcome expression_logistic() {
  const ExpressionParams t;
  std::map<std::string, int> hits;
  int identity = 0;
  for (int r = 0; r < kReplications; ++r) {
    const auto records = replicate(r).records;
    const auto fit = fit_expression(records, ExpressionRegressor::valence);
    hits["pos.intercept"] += within_2se(fit.pos, "p0", t.pos_intercept);
    hits["pos.slope"] += within_2se(fit.pos, "alpha_v", t.pos_slope_v);
    hits["neg.intercept"] += within_2se(fit.neg, "p0", t.neg_intercept);
    hits["neg.slope"] += within_2se(fit.neg, "alpha_v", t.neg_slope_v);
    identity += fit.pos.deviance == -2.0 * fit.pos.loglik && fit.neg.deviance == -2.0 * fit.neg.loglik &&
                fit.pos.n == 182 && fit.neg.n == 182;
  }
  return verdict(all_at_least(hits, 95) && identity == kReplications,
                 "within 2 SE: " + coverage_summary(hits) + fmt("; deviance identity %d/%d", identity, kReplications));
}

Outcome replay_signs() {
  const auto scenario = io::replay_from_json(io::read_json_file(std::string(CYBEREMO_DATA_DIR) + "/study2_replay.json"));
  ModelParams p;
  p.valence.A_v = 0.0;
  p.arousal.A_a = 0.0;
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  const auto result = replay(scenario, p, cfg);
  int checked_v = 0, checked_a = 0, bad = 0;
  std::string where;
  for (const auto& b : result.boundaries) {
    if (b.h == 0.0) continue;
    const double dv = b.after.valence - b.before.valence;
    const double da = b.after.arousal - b.before.arousal;
    if (std::abs(b.before.valence) <= 0.5) {
      ++checked_v;
      if ((dv > 0.0 ? 1.0 : dv < 0.0 ? -1.0 : 0.0) != b.h) {
        ++bad;
        where += fmt(" v@thread%zu", b.thread_index);
      }
    }
    if (b.before.arousal <= -0.2) {
      ++checked_a;
      if (!(da > 0.0)) {
        ++bad;
        where += fmt(" a@thread%zu", b.thread_index);
      }
    }
  }
  return verdict(bad == 0 && checked_v > 0 && checked_a > 0,
                 fmt("%zu threads; valence checks %d, arousal checks %d, violations %d", result.boundaries.size(),
                     checked_v, checked_a, bad) + where);
}

Outcome feedback_contract() {
  Rng rng = Rng::substream(kSeedBase, 0, 0, Channel::expression);
  int violations = 0, reset_nonzero = 0;
  for (int i = 0; i < 10000; ++i) {
    const EmotionState s{rng.uniform_pm1(), rng.uniform_pm1()};
    const ExpressionEvent ev{0.0, rng.bernoulli(0.5) ? PostKind::reply : PostKind::first_post, rng.bernoulli(0.5),
                             rng.bernoulli(0.5)};
    ExpressionParams prop;
    prop.feedback_mode = FeedbackMode::proportional;
    prop.feedback_lambda = rng.uniform();
    const auto out = apply_feedback(s, ev, prop);
    violations += !(std::abs(out.arousal) <= std::abs(s.arousal));
    ExpressionParams reset;
    reset.feedback_mode = FeedbackMode::reset_zero;
    const auto zero = apply_feedback(s, ev, reset);
    reset_nonzero += zero.arousal != 0.0;
    violations += !(std::abs(zero.arousal) <= std::abs(s.arousal));
  }
  return verdict(violations == 0 && reset_nonzero == 0,
                 fmt("20000 feedback applications; |a| increases %d; reset non-zero %d", violations, reset_nonzero));
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(in), {}};
  }
  return files;
}

Outcome determinism() {
  const std::string data = CYBEREMO_DATA_DIR;
  const fs::path base = fs::temp_directory_path() / "cyberemo_acceptance_determinism";
  fs::remove_all(base);
  auto invoke = [](std::vector<std::string> args) {
    args.insert(args.begin(), "cyberemo");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  };
  bool all_zero = true;
  for (const char* pass : {"a", "b"}) {
    const std::string dir = (base / pass).string();
    all_zero &= invoke({"simulate", data + "/forum.json", "--runs", "3", "--seed", "11", "--out-dir", dir + "/sim"}) == 0;
    all_zero &= invoke({"replay", data + "/study2_replay.json", "--seed", "11", "--out-dir", dir + "/replay"}) == 0;
    all_zero &= invoke({"fit", data + "/reference_observations.csv", "--target", "valence", "--select", "--out-dir",
                        dir + "/fit"}) == 0;
    all_zero &= invoke({"fit", data + "/reference_observations.csv", "--target", "expression", "--out-dir",
                        dir + "/fit"}) == 0;
    all_zero &= invoke({"posterior", dir + "/fit/fit_valence.json", "--seed", "11", "--out-dir", dir + "/post"}) == 0;
  }
  const auto a = snapshot(base / "a"), b = snapshot(base / "b");
  fs::remove_all(base);
  return verdict(all_zero && !a.empty() && a == b, fmt("%zu output files compared, identical=%s", a.size(),
                                                       a == b ? "yes" : "no"));
}

Outcome real_data() {
  const fs::path path = fs::path(CYBEREMO_DATA_DIR) / "real_observations.csv";
  if (!fs::exists(path)) return {Outcome::skip, "data/real_observations.csv not present"};
  const auto records = load(path.string());
  const std::vector<std::string> vt{"b0", "b2", "b3"}, at{"d0", "d1"};
  const auto fv = fit_valence(records, vt);
  const auto fa = fit_arousal(records, at);
  const std::vector<std::pair<std::string, double>> v_ref{
      {"gamma_v", 0.367}, {"b", 0.056}, {"b0", 0.14}, {"b2", 0.057}, {"b3", -0.047}};
  const std::vector<std::pair<std::string, double>> a_ref{
      {"gamma_a", 0.414}, {"d", -0.442}, {"d0", 0.178}, {"d1", 0.14469}};
  bool ok = std::abs(fv.r_squared - 0.52) <= 0.03 && std::abs(fa.r_squared - 0.28) <= 0.03;
  for (const auto& [n, v] : v_ref) ok = ok && std::abs(fv.estimate(n) - v) <= 0.01;
  for (const auto& [n, v] : a_ref) ok = ok && std::abs(fa.estimate(n) - v) <= 0.01;
  return verdict(ok, fmt("valence R2=%.3f arousal R2=%.3f", fv.r_squared, fa.r_squared));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1  fixed points", fixed_points},
      {"2  integrator convergence", integrator_convergence},
      {"3  valence round trip", valence_round_trip},
      {"4  arousal round trip", arousal_round_trip},
      {"5  AIC term selection", aic_selection},
      {"6  posterior simulation", posterior_simulation},
      {"7  participation hinge", participation_hinge},
      {"8  expression logistic", expression_logistic},
      {"9  replay signs", replay_signs},
      {"10 feedback contract", feedback_contract},
      {"11 determinism", determinism},
      {"12 real data", real_data},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {Outcome::fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = o.status == Outcome::pass ? "PASS" : o.status == Outcome::fail ? "FAIL" : "SKIP";
    failures += o.status == Outcome::fail;
    std::printf("[%s] %-28s %s (%.2fs)\n", tag, name.c_str(), o.detail.c_str(), secs);
  }
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
