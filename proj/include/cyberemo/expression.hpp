#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "model.hpp"
#include "rng.hpp"

namespace cyberemo {

enum class PostKind { first_post, reply };

// A produced post. Sentiment channels are independent, so a post can carry
// positive and negative content at once.
struct ExpressionEvent {
  double time = 0.0;  // minutes
  PostKind kind = PostKind::first_post;
  bool has_positive = false;
  bool has_negative = false;

  // +1 positive only, -1 negative only, 0 mixed or neutral.
  int polarity() const {
    if (has_positive == has_negative) return 0;
    return has_positive ? 1 : -1;
  }
};

inline double logistic(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

// Heaviside with H(0) = 0: the hinge only switches on strictly above tau.
inline double participation_probability(double a, const ExpressionParams& p) {
  const double active = a > p.tau ? 1.0 : 0.0;
  return std::clamp(p.p0 + p.alpha * a * active, 0.0, 1.0);
}

inline double positive_probability(double v, const ExpressionParams& p) {
  return logistic(p.pos_intercept + p.pos_slope_v * v);
}

inline double negative_probability(double v, const ExpressionParams& p) {
  return logistic(p.neg_intercept + p.neg_slope_v * v);
}

// Draws whether the agent posts and, if so, the post's polarity flags.
// `exposure` is the length of the opportunity window in units of the window
// the participation probability refers to; with exposure = 1 the posting
// probability is participation_probability(a) itself, otherwise
// 1 - (1 - p)^exposure. Always consumes exactly three uniforms.
inline std::optional<ExpressionEvent> sample_expression(const EmotionState& state, const ExpressionParams& p, Rng& rng,
                                                        double exposure = 1.0, double time = 0.0,
                                                        PostKind kind = PostKind::first_post) {
  const double p_window = participation_probability(state.arousal, p);
  const double p_post = exposure == 1.0 ? p_window : 1.0 - std::pow(1.0 - p_window, exposure);
  const double u_post = rng.uniform();
  const double u_pos = rng.uniform();
  const double u_neg = rng.uniform();
  if (!(u_post < p_post)) return std::nullopt;
  return ExpressionEvent{time, kind, u_pos < positive_probability(state.valence, p),
                         u_neg < negative_probability(state.valence, p)};
}

// Regulation after posting: arousal is pulled towards zero, and a reply lifts
// negative valence by the same factor.
inline EmotionState apply_feedback(const EmotionState& state, const ExpressionEvent& event,
                                   const ExpressionParams& p) {
  EmotionState out = state;
  switch (p.feedback_mode) {
    case FeedbackMode::reset_zero:
      out.arousal = 0.0;
      break;
    case FeedbackMode::proportional:
      out.arousal = p.feedback_lambda * state.arousal;
      break;
  }
  if (event.kind == PostKind::reply && state.valence < 0.0) out.valence = p.feedback_lambda * state.valence;
  return out;
}

}  // namespace cyberemo
