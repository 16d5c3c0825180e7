#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "expression.hpp"
#include "integrator.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace cyberemo {

struct ThreadExposure {
  double h = 0.0;  // -1, 0 or +1
  double exposure_minutes = 1.0;
};

// Single agent reading a fixed sequence of threads, as in a reading study.
struct ReplayScenario {
  std::vector<ThreadExposure> thread_sequence;
  EmotionState initial_state;

  void validate() const {
    if (thread_sequence.empty()) throw ValidationError("replay scenario has no threads");
    for (std::size_t i = 0; i < thread_sequence.size(); ++i) {
      const auto& th = thread_sequence[i];
      if (th.h != -1.0 && th.h != 0.0 && th.h != 1.0)
        throw ValidationError("thread " + std::to_string(i) + ": h must be -1, 0 or +1");
      if (!(th.exposure_minutes > 0.0)) throw ValidationError("thread " + std::to_string(i) + ": exposure must be > 0");
    }
    if (!initial_state.finite()) throw ValidationError("initial state is not finite");
  }
};

// State before and after one thread: the replay analogue of the reports a
// participant gives between threads.
struct ThreadBoundary {
  std::size_t thread_index = 0;
  double h = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  EmotionState before;
  EmotionState after;
};

struct ReplayResult {
  SimulationTrace trace;
  std::vector<ThreadBoundary> boundaries;
};

inline ReplayResult replay(const ReplayScenario& scenario, const ModelParams& params, const IntegratorConfig& cfg) {
  scenario.validate();
  std::vector<FieldSegment> schedule;
  schedule.reserve(scenario.thread_sequence.size());
  for (const auto& th : scenario.thread_sequence) schedule.push_back({th.exposure_minutes, th.h});

  ReplayResult out;
  out.trace = integrate(scenario.initial_state, schedule, params, cfg);

  std::size_t row = 0;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto n = static_cast<std::size_t>(steps_for(schedule[i].duration, cfg.dt));
    const auto& a = out.trace[row];
    const auto& b = out.trace[row + n];
    out.boundaries.push_back({i, schedule[i].h, a.t_minutes, b.t_minutes, a.state, b.state});
    row += n;
  }
  return out;
}

// Exogenous override of the field over [start, start + duration).
struct FieldPulse {
  double start = 0.0;
  double duration = 1.0;
  double h = 1.0;
};

// Many agents sharing one field. The field decays at rate gamma_h and each
// post adds impact * s to it.
struct ForumScenario {
  int n_agents = 1;
  double duration = 10.0;  // minutes
  double gamma_h = 0.0;
  double impact = 0.0;
  double initial_h = 0.0;
  // Defaults to the eigendynamics baselines (b, d) when absent.
  std::optional<EmotionState> initial_state;
  bool expression = true;
  std::vector<FieldPulse> pulses;

  void validate() const {
    if (n_agents < 1) throw ValidationError("n_agents must be >= 1");
    if (!(duration > 0.0) || !std::isfinite(duration)) throw ValidationError("duration must be positive");
    if (!(gamma_h >= 0.0) || !std::isfinite(gamma_h)) throw ValidationError("gamma_h must be >= 0");
    if (!(impact >= 0.0) || !std::isfinite(impact)) throw ValidationError("impact must be >= 0");
    if (!(initial_h >= -1.0 && initial_h <= 1.0)) throw ValidationError("initial_h must lie in [-1, 1]");
    if (initial_state && !initial_state->finite()) throw ValidationError("initial state is not finite");
    for (const auto& p : pulses) {
      if (!(p.duration > 0.0) || !(p.start >= 0.0)) throw ValidationError("pulse windows must have start >= 0, duration > 0");
      if (!(p.h >= -1.0 && p.h <= 1.0)) throw ValidationError("pulse h must lie in [-1, 1]");
    }
  }
};

struct FieldRow {
  double t_minutes = 0.0;
  double h = 0.0;
  int n_expressions = 0;
};

struct ForumResult {
  std::vector<SimulationTrace> agents;
  std::vector<FieldRow> field;
};

// Synchronous update: every agent integrates one step against the same h,
// then posts are sampled, feedback is applied to the posters and the
// aggregated polarity updates the field for the next step. An agent's first
// post is a first_post, later ones are replies.
inline ForumResult run_forum(const ForumScenario& scenario, const ModelParams& params, const IntegratorConfig& cfg,
                             std::uint64_t run_id = 0) {
  scenario.validate();
  cfg.validate();
  if (!params.valid()) throw ValidationError("model parameters violate their invariants");

  const auto n_steps = steps_for(scenario.duration, cfg.dt);
  const auto n_agents = static_cast<std::size_t>(scenario.n_agents);
  const EmotionState start = scenario.initial_state.value_or(EmotionState{params.valence.b, params.arousal.d});

  struct PulseSteps {
    std::int64_t first, last;  // [first, last) in step indices
    double h;
  };
  std::vector<PulseSteps> pulses;
  for (const auto& p : scenario.pulses) {
    const auto first = static_cast<std::int64_t>(std::llround(p.start / cfg.dt));
    pulses.push_back({first, first + static_cast<std::int64_t>(std::llround(p.duration / cfg.dt)), p.h});
  }

  std::vector<Rng> dyn_rng, expr_rng;
  dyn_rng.reserve(n_agents);
  expr_rng.reserve(n_agents);
  for (std::size_t i = 0; i < n_agents; ++i) {
    dyn_rng.push_back(Rng::substream(cfg.seed, i, run_id, Channel::dynamics));
    expr_rng.push_back(Rng::substream(cfg.seed, i, run_id, Channel::expression));
  }

  ForumResult out;
  out.agents.assign(n_agents, {});
  for (auto& tr : out.agents) {
    tr.reserve(static_cast<std::size_t>(n_steps) + 1);
    tr.push_back({0.0, start, scenario.initial_h, false, std::nullopt});
  }
  out.field.reserve(static_cast<std::size_t>(n_steps) + 1);
  out.field.push_back({0.0, scenario.initial_h, 0});

  std::vector<EmotionState> states(n_agents, start);
  std::vector<bool> has_posted(n_agents, false);
  double h = scenario.initial_h;

  for (std::int64_t k = 0; k < n_steps; ++k) {
    for (const auto& p : pulses)
      if (k >= p.first && k < p.last) h = p.h;
    const double t = static_cast<double>(k + 1) * cfg.dt;

    int polarity_sum = 0;
    int n_expr = 0;
    for (std::size_t i = 0; i < n_agents; ++i) {
      states[i] = step(states[i], h, params, cfg, dyn_rng[i]);
      TraceRow row{t, states[i], h, false, std::nullopt};
      if (scenario.expression) {
        const PostKind kind = has_posted[i] ? PostKind::reply : PostKind::first_post;
        if (auto ev = sample_expression(states[i], params.expression, expr_rng[i], cfg.dt, t, kind)) {
          states[i] = apply_feedback(states[i], *ev, params.expression);
          has_posted[i] = true;
          row.state = states[i];
          row.expressed = true;
          row.s = ev->polarity();
          polarity_sum += ev->polarity();
          ++n_expr;
        }
      }
      out.agents[i].push_back(row);
    }
    out.field.push_back({t, h, n_expr});
    h = clamp_unit(h * (1.0 - scenario.gamma_h * cfg.dt) + scenario.impact * polarity_sum);
  }
  return out;
}

}  // namespace cyberemo
