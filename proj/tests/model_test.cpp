#include <gtest/gtest.h>

#include <cmath>

#include "cyberemo/model.hpp"
#include "cyberemo/rng.hpp"

using namespace cyberemo;

namespace {

const ValenceParams kV{};
const ArousalParams kA{};

TEST(Params, DefaultsArePublishedEstimates) {
  EXPECT_DOUBLE_EQ(kV.gamma_v, 0.367);
  EXPECT_DOUBLE_EQ(kV.b, 0.056);
  EXPECT_DOUBLE_EQ(kV.b0, 0.14);
  EXPECT_DOUBLE_EQ(kV.b1, 0.0);
  EXPECT_DOUBLE_EQ(kV.b2, 0.057);
  EXPECT_DOUBLE_EQ(kV.b3, -0.047);
  EXPECT_DOUBLE_EQ(kA.gamma_a, 0.414);
  EXPECT_DOUBLE_EQ(kA.d, -0.442);
  EXPECT_DOUBLE_EQ(kA.d0, 0.178);
  EXPECT_DOUBLE_EQ(kA.d1, 0.14469);
  EXPECT_DOUBLE_EQ(kA.d2, 0.0);
  EXPECT_DOUBLE_EQ(kA.d3, 0.0);
  EXPECT_TRUE(ModelParams{}.valid());
  EXPECT_TRUE(ModelParams{}.clamp_states);
}

TEST(Params, InvalidRatesAndAmplitudes) {
  ValenceParams v;
  v.gamma_v = 0.0;
  EXPECT_FALSE(v.valid());
  ArousalParams a;
  a.A_a = -0.1;
  EXPECT_FALSE(a.valid());
  ExpressionParams e;
  e.feedback_lambda = 1.5;
  EXPECT_FALSE(e.valid());
}

TEST(PerceptionForce, Valence) {
  EXPECT_EQ(perception_force_v(0.0, 0.7, kV), 0.0);
  EXPECT_NEAR(perception_force_v(1.0, 0.0, kV), 0.14, 1e-15);
  EXPECT_NEAR(perception_force_v(-1.0, 1.0, kV), -0.15, 1e-15);
}

TEST(PerceptionForce, Arousal) {
  EXPECT_EQ(perception_force_a(0.0, 0.5, kA), 0.0);
  EXPECT_NEAR(perception_force_a(1.0, 0.0, kA), 0.178, 1e-15);
  EXPECT_NEAR(perception_force_a(-1.0, 0.0, kA), 0.178, 1e-15);
}

TEST(Drift, Valence) {
  EXPECT_NEAR(drift_v({0.056, 0.0}, 0.0, kV), 0.0, 1e-15);
  EXPECT_NEAR(drift_v({0.0, 0.0}, 1.0, kV), 0.160552, 1e-12);
  EXPECT_NEAR(drift_v({1.0, 0.0}, -1.0, kV), -0.496448, 1e-12);
}

TEST(Drift, Arousal) {
  EXPECT_NEAR(drift_a({0.0, -0.442}, 0.0, kA), 0.0, 1e-15);
  EXPECT_NEAR(drift_a({0.0, 0.0}, 1.0, kA), -0.004988, 1e-12);
  EXPECT_NEAR(drift_a({0.0, 0.0}, -1.0, kA), -0.004988, 1e-12);
}

TEST(DriftProperties, FixedPointsExact) {
  EXPECT_EQ(drift_v({kV.b, 0.3}, 0.0, kV), 0.0);
  EXPECT_EQ(drift_a({0.3, kA.d}, 0.0, kA), 0.0);
}

TEST(DriftProperties, RandomizedInvariants) {
  Rng rng(17);
  for (int i = 0; i < 2000; ++i) {
    const double v = rng.uniform_pm1(), a = rng.uniform_pm1(), h = rng.uniform_pm1();
    // Arousal force is blind to field polarity.
    EXPECT_EQ(drift_a({v, a}, h, kA), drift_a({v, a}, -h, kA));
    // Field enters valence linearly.
    const double poly = kV.b0 + kV.b1 * v + kV.b2 * v * v + kV.b3 * v * v * v;
    EXPECT_NEAR(drift_v({v, a}, 1.0, kV) - drift_v({v, a}, -1.0, kV), 2.0 * poly, 1e-14);
    // Monotone relaxation without field.
    if (std::abs(v - kV.b) > 1e-12) {
      EXPECT_EQ(std::signbit(drift_v({v, a}, 0.0, kV)), std::signbit(kV.b - v));
    }
    if (std::abs(a - kA.d) > 1e-12) {
      EXPECT_EQ(std::signbit(drift_a({v, a}, 0.0, kA)), std::signbit(kA.d - a));
    }
  }
}

}  // namespace
