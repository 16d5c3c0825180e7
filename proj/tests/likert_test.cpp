#include <gtest/gtest.h>

#include <sstream>

#include "cyberemo/likert.hpp"

using namespace cyberemo;

namespace {

RawLikertRow row(int pos, int neg, int ar, ThreadPolarity pol = ThreadPolarity::neu) {
  RawLikertRow r;
  r.likert_pos = pos;
  r.likert_neg = neg;
  r.likert_arousal = ar;
  r.thread_polarity = pol;
  return r;
}

TEST(Rescale, Extremes) {
  const auto s = rescale(row(7, 1, 7));
  EXPECT_EQ(s.valence, 1.0);
  EXPECT_EQ(s.arousal, 1.0);
  const auto t = rescale(row(1, 7, 1));
  EXPECT_EQ(t.valence, -1.0);
  EXPECT_EQ(t.arousal, -1.0);
}

TEST(Rescale, Midpoints) {
  const auto s = rescale(row(4, 4, 4));
  EXPECT_EQ(s.valence, 0.0);
  EXPECT_EQ(s.arousal, 0.0);
}

TEST(Rescale, Interior) {
  const auto s = rescale(row(6, 2, 1, ThreadPolarity::neg));
  EXPECT_NEAR(s.valence, 4.0 / 6.0, 1e-15);
  EXPECT_EQ(s.arousal, -1.0);
  EXPECT_EQ(s.h, -1.0);
  EXPECT_EQ(rescale(row(4, 4, 4, ThreadPolarity::pos)).h, 1.0);
}

TEST(Rescale, RejectsOutOfRange) { EXPECT_THROW(rescale(row(9, 1, 4)), ValidationError); }

TEST(Ingest, PairsConsecutiveReportsPerParticipant) {
  std::istringstream in(
      "participant_id,study_id,thread_index,thread_polarity,likert_pos,likert_neg,likert_arousal,exposure_minutes\n"
      "A,s2,0,neu,4,4,4,\n"
      "B,s2,0,neu,5,3,2,\n"
      "A,s2,1,pos,6,2,5,1.5\n"
      "B,s2,1,neg,3,5,4,\n"
      "A,s2,2,neg,4,4,3,\n");
  const auto res = ingest(in);
  ASSERT_TRUE(res.errors.empty());
  ASSERT_EQ(res.reports.size(), 5u);
  ASSERT_EQ(res.observations.size(), 3u);
  const auto& a1 = res.observations[0];
  EXPECT_EQ(a1.participant_id, "A");
  EXPECT_EQ(a1.h, 1.0);
  EXPECT_EQ(a1.v_pre, 0.0);
  EXPECT_NEAR(a1.v_post, 4.0 / 6.0, 1e-15);
  EXPECT_NEAR(a1.a_post, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(a1.dt_minutes, 1.5);
  EXPECT_EQ(res.observations[1].participant_id, "B");
  EXPECT_EQ(res.observations[1].dt_minutes, 1.0);
}

TEST(Ingest, ReportsEveryBadRowWithLineNumber) {
  std::istringstream in(
      "participant_id,study_id,thread_index,thread_polarity,likert_pos,likert_neg,likert_arousal\n"
      "A,s1,0,neu,4,4,4\n"
      "A,s1,1,pos,9,4,4\n"
      "A,s1,2,xyz,4,4,4\n"
      "A,s1,3,neg,4,4,0\n");
  const auto res = ingest(in);
  ASSERT_EQ(res.errors.size(), 3u);
  EXPECT_TRUE(res.errors[0].starts_with("line 3:"));
  EXPECT_TRUE(res.errors[1].starts_with("line 4:"));
  EXPECT_TRUE(res.errors[2].starts_with("line 5:"));
  // Total and order-preserving: every input row is a report or an error.
  EXPECT_EQ(res.reports.size() + res.errors.size(), 4u);
}

}  // namespace
