#include <gtest/gtest.h>

#include "stratvar/theorems.hpp"

using namespace stratvar;

namespace {

SweepRanges small(Count max_N, std::size_t max_m = 3) {
  SweepRanges r;
  r.max_N = max_N;
  r.max_m = max_m;
  return r;
}

}  // namespace

TEST(CheckTheorem, ParsesIds) {
  EXPECT_EQ(parse_theorem_id("2"), TheoremId::Two);
  EXPECT_EQ(parse_theorem_id("e2"), TheoremId::ProportionalIdentity);
  EXPECT_EQ(parse_theorem_id("INC"), TheoremId::IncreaseByOne);
  try {
    parse_theorem_id("6");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownTheoremId);
  }
}

TEST(CheckTheorem, OneHoldsWithEqualityAtProportional) {
  const auto r = check_theorem(TheoremId::One, small(9));
  EXPECT_TRUE(r.holds()) << r.failure_detail;
  EXPECT_GT(r.instances, 0u);
  ASSERT_FALSE(r.equality_witnesses.empty());
  for (const auto& s : r.equality_witnesses) EXPECT_TRUE(is_proportional(s.population(), s.allocation()));
}

TEST(CheckTheorem, TwoHolds) {
  const auto r = check_theorem(TheoremId::Two, small(10));
  EXPECT_TRUE(r.holds()) << r.failure_detail;
  EXPECT_FALSE(r.counterexample);
}

TEST(CheckTheorem, ThreeEqualityCasesMatchCharacterisation) {
  const auto r = check_theorem(TheoremId::Three, small(10));
  EXPECT_TRUE(r.holds()) << r.failure_detail;
  ASSERT_FALSE(r.equality_witnesses.empty());
  for (const auto& s : r.equality_witnesses) {
    const auto m = static_cast<Count>(s.m());
    for (std::size_t j = 0; j < s.m(); ++j) {
      EXPECT_EQ(s.population().size(j) * m, s.N());
      EXPECT_EQ(s.allocation().count(j) * m, s.n());
    }
  }
  EXPECT_TRUE(r.probes.empty());
}

TEST(CheckTheorem, ThreeAdversarialFindsTheCounterexample) {
  auto ranges = small(7, 2);
  ranges.min_N = 7;
  ranges.fractions = {Ratio(1, 2)};
  ranges.adversarial = true;
  const auto r = check_theorem(TheoremId::Three, ranges);
  EXPECT_TRUE(r.holds());
  const auto target = build_scenario({2, 5}, std::vector<Ratio>{Ratio(1, 2), Ratio(1, 2)}, {2, 4});
  bool found = false;
  for (const auto& p : r.probes) {
    if (p.scenario == target) {
      found = true;
      EXPECT_EQ(p.value, Ratio(25, 3136));
      EXPECT_EQ(p.bound, Ratio(1, 120));
    }
  }
  EXPECT_TRUE(found);
}

TEST(CheckTheorem, FourAndIncreaseByOne) {
  auto ranges = small(16, 4);
  ranges.max_stratum = 5;
  const auto four = check_theorem(TheoremId::Four, ranges);
  EXPECT_TRUE(four.holds()) << four.failure_detail;
  EXPECT_FALSE(four.equality_witnesses.empty());
  const auto inc = check_theorem(TheoremId::IncreaseByOne, ranges);
  EXPECT_TRUE(inc.holds()) << inc.failure_detail;
}

TEST(CheckTheorem, FiveAndProportionalIdentity) {
  const auto five = check_theorem(TheoremId::Five, small(10, 5));
  EXPECT_TRUE(five.holds()) << five.failure_detail;
  EXPECT_GT(five.instances, 0u);
  const auto e2 = check_theorem(TheoremId::ProportionalIdentity, small(10));
  EXPECT_TRUE(e2.holds()) << e2.failure_detail;
  EXPECT_GT(e2.instances, 0u);
}

TEST(CheckTheorem, FirstFailureIsKeptAsCounterexample) {
  TheoremReport report;
  report.id = TheoremId::Two;
  detail::Tally tally(report);
  const auto good = build_scenario({2, 2}, std::vector<Count>{1, 1}, {1, 1});
  const auto bad = build_scenario({2, 3}, std::vector<Count>{1, 1}, {1, 2});
  const auto later = build_scenario({3, 3}, std::vector<Count>{1, 1}, {1, 2});
  tally.check(true, good, "unused");
  tally.check(false, bad, "first");
  tally.check(false, later, "second");
  EXPECT_EQ(report.instances, 3u);
  EXPECT_EQ(report.failures, 2u);
  EXPECT_FALSE(report.holds());
  EXPECT_EQ(*report.counterexample, bad);
  EXPECT_EQ(report.failure_detail, "first");
}
