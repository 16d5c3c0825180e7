#pragma once

#include <cassert>
#include <cmath>

namespace cyberemo {

// Instantaneous core affect of one agent. Both coordinates live on [-1, 1].
struct EmotionState {
  double valence = 0.0;
  double arousal = 0.0;

  bool finite() const { return std::isfinite(valence) && std::isfinite(arousal); }
  friend bool operator==(const EmotionState&, const EmotionState&) = default;
};

// Valence dynamics: relaxation towards `b` at rate `gamma_v`, a cubic response
// to the signed field, and white noise of amplitude `A_v` (per minute).
struct ValenceParams {
  double gamma_v = 0.367;
  double b = 0.056;
  double b0 = 0.14;
  double b1 = 0.0;
  double b2 = 0.057;
  double b3 = -0.047;
  // Calibration constant: residual SD of data/reference_observations.csv.
  double A_v = 0.2048;

  bool valid() const { return gamma_v > 0.0 && A_v >= 0.0; }
};

// Arousal dynamics: same shape as valence but driven by |h|.
struct ArousalParams {
  double gamma_a = 0.414;
  double d = -0.442;
  double d0 = 0.178;
  double d1 = 0.14469;
  double d2 = 0.0;
  double d3 = 0.0;
  // Calibration constant: residual SD of data/reference_observations.csv.
  double A_a = 0.2673;

  bool valid() const { return gamma_a > 0.0 && A_a >= 0.0; }
};

enum class FeedbackMode { reset_zero, proportional };

// Participation hinge, post polarity logits and post-expression feedback.
struct ExpressionParams {
  double p0 = 0.199;
  double alpha = 0.438;
  double tau = 0.0;
  double pos_intercept = -0.4203;
  double pos_slope_v = 0.9462;
  double neg_intercept = 0.2194;
  double neg_slope_v = -0.9777;
  FeedbackMode feedback_mode = FeedbackMode::proportional;
  // Placeholder: the proportional decrease is established but its size is not.
  double feedback_lambda = 0.5;

  bool valid() const { return feedback_lambda >= 0.0 && feedback_lambda <= 1.0; }
};

struct ModelParams {
  ValenceParams valence;
  ArousalParams arousal;
  ExpressionParams expression;
  bool clamp_states = true;

  bool valid() const { return valence.valid() && arousal.valid() && expression.valid(); }
};

inline double cubic(double c0, double c1, double c2, double c3, double x) {
  return c0 + x * (c1 + x * (c2 + x * c3));
}

// Field-driven force on valence: polarity of h matters.
inline double perception_force_v(double h, double v, const ValenceParams& p) {
  return h * cubic(p.b0, p.b1, p.b2, p.b3, v);
}

// Field-driven force on arousal: only the magnitude of h matters.
inline double perception_force_a(double h, double a, const ArousalParams& p) {
  return std::abs(h) * cubic(p.d0, p.d1, p.d2, p.d3, a);
}

inline double drift_v(const EmotionState& s, double h, const ValenceParams& p) {
  return -p.gamma_v * (s.valence - p.b) + perception_force_v(h, s.valence, p);
}

inline double drift_a(const EmotionState& s, double h, const ArousalParams& p) {
  return -p.gamma_a * (s.arousal - p.d) + perception_force_a(h, s.arousal, p);
}

}  // namespace cyberemo
