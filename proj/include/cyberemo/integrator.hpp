#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace cyberemo {

enum class NoiseDistribution { standard_normal, uniform_pm1 };

struct IntegratorConfig {
  double dt = 0.01;  // minutes
  std::uint64_t seed = 0;
  NoiseDistribution noise_distribution = NoiseDistribution::standard_normal;

  void validate() const {
    if (!(dt > 0.0 && dt <= 1.0)) throw ValidationError("integrator dt must lie in (0, 1] minutes");
  }
};

// One row of a trace: the state at time t and the field in force over the
// step that ended at t. `s` is +1 (positive only), -1 (negative only) or 0
// (mixed or neutral) when the agent expressed itself at this step.
struct TraceRow {
  double t_minutes = 0.0;
  EmotionState state;
  double h = 0.0;
  bool expressed = false;
  std::optional<int> s;
};

using SimulationTrace = std::vector<TraceRow>;

struct FieldSegment {
  double duration = 1.0;  // minutes
  double h = 0.0;
};

inline double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

inline double draw_noise(Rng& rng, NoiseDistribution dist) {
  return dist == NoiseDistribution::standard_normal ? rng.normal() : rng.uniform_pm1();
}

// One explicit Euler-Maruyama step. Draws the valence noise first, then the
// arousal noise, on every call (also when the amplitudes are zero) so that
// stream positions do not depend on parameter values.
inline EmotionState step(const EmotionState& state, double h, const ModelParams& params,
                         const IntegratorConfig& cfg, Rng& rng) {
  const double xi_v = draw_noise(rng, cfg.noise_distribution);
  const double xi_a = draw_noise(rng, cfg.noise_distribution);
  const double sqrt_dt = std::sqrt(cfg.dt);

  EmotionState next;
  next.valence = state.valence + drift_v(state, h, params.valence) * cfg.dt + params.valence.A_v * xi_v * sqrt_dt;
  next.arousal = state.arousal + drift_a(state, h, params.arousal) * cfg.dt + params.arousal.A_a * xi_a * sqrt_dt;
  if (params.clamp_states) {
    next.valence = clamp_unit(next.valence);
    next.arousal = clamp_unit(next.arousal);
  }
  assert(next.finite());
  return next;
}

// Number of dt steps that tile `duration`; rejects durations that are not a
// whole multiple of dt.
inline std::int64_t steps_for(double duration, double dt) {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ValidationError("segment durations must be positive");
  const double ratio = duration / dt;
  const auto n = static_cast<std::int64_t>(std::llround(ratio));
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio))
    throw ValidationError("segment duration " + std::to_string(duration) + " is not a multiple of dt " +
                          std::to_string(dt));
  return n;
}

inline SimulationTrace integrate(const EmotionState& state0, std::span<const FieldSegment> schedule,
                                 const ModelParams& params, const IntegratorConfig& cfg, Rng& rng) {
  if (schedule.empty()) throw ValidationError("field schedule is empty");
  cfg.validate();
  if (!params.valid()) throw ValidationError("model parameters violate their invariants");
  if (!state0.finite()) throw ValidationError("initial state is not finite");

  std::size_t total = 1;
  for (const auto& seg : schedule) total += static_cast<std::size_t>(steps_for(seg.duration, cfg.dt));

  SimulationTrace trace;
  trace.reserve(total);
  trace.push_back({0.0, state0, schedule.front().h, false, std::nullopt});

  EmotionState state = state0;
  double t0 = 0.0;
  for (const auto& seg : schedule) {
    const auto n = steps_for(seg.duration, cfg.dt);
    for (std::int64_t k = 1; k <= n; ++k) {
      state = step(state, seg.h, params, cfg, rng);
      trace.push_back({t0 + static_cast<double>(k) * cfg.dt, state, seg.h, false, std::nullopt});
    }
    t0 += static_cast<double>(n) * cfg.dt;
  }
  return trace;
}

// Uses the dynamics substream of agent 0, run 0 for cfg.seed.
inline SimulationTrace integrate(const EmotionState& state0, std::span<const FieldSegment> schedule,
                                 const ModelParams& params, const IntegratorConfig& cfg) {
  Rng rng = Rng::substream(cfg.seed, 0, 0, Channel::dynamics);
  return integrate(state0, schedule, params, cfg, rng);
}

}  // namespace cyberemo
