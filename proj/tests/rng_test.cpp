#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cyberemo/rng.hpp"

using namespace cyberemo;

TEST(Rng, SameSeedSameSequence) {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Rng, SubstreamsAreKeyedAndDistinct) {
  auto s1 = Rng::substream(7, 0, 0, Channel::dynamics);
  auto s2 = Rng::substream(7, 0, 0, Channel::dynamics);
  auto s3 = Rng::substream(7, 1, 0, Channel::dynamics);
  auto s4 = Rng::substream(7, 0, 1, Channel::dynamics);
  auto s5 = Rng::substream(7, 0, 0, Channel::expression);
  const auto x1 = s1();
  EXPECT_EQ(x1, s2());
  EXPECT_NE(x1, s3());
  EXPECT_NE(x1, s4());
  EXPECT_NE(x1, s5());
}

TEST(Rng, UniformRange) {
  Rng r(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double w = r.uniform_pm1();
    ASSERT_GE(w, -1.0);
    ASSERT_LT(w, 1.0);
  }
}

TEST(Rng, NormalMoments) {
  Rng r(99);
  const int n = 200000;
  double s = 0.0, ss = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    ASSERT_TRUE(std::isfinite(z));
    s += z;
    ss += z * z;
    s4 += z * z * z * z;
  }
  const double mean = s / n, var = ss / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(var, 1.0, 4.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s4 / n, 3.0, 0.1);
}
