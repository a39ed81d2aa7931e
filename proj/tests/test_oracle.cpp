#include <gtest/gtest.h>

#include "brute_force.hpp"
#include "stratvar/oracle.hpp"

using namespace stratvar;

namespace {

std::vector<Count> counts(std::span<const Count> c) { return {c.begin(), c.end()}; }

/// Straight maximum over the box, through the variance module.
Ratio brute_worst(const StratifiedPopulation& pop, const Allocation& alloc, Count R) {
  std::vector<Count> sizes(pop.sizes().begin(), pop.sizes().end());
  Ratio best = -1;
  for (const auto& reds : brute::box_tuples_with_sum(brute::Tuple(pop.m(), 0), sizes, R))
    best = std::max(best, var_strat_without(Scenario(pop, RedDistribution::from_counts(pop, reds), alloc)));
  return best;
}

}  // namespace

TEST(WorstNature, EqualStrata) {
  StratifiedPopulation pop({5, 5});
  Allocation alloc(pop, {2, 2});
  const auto r = worst_nature(pop, alloc, 4);
  EXPECT_EQ(counts(r.distribution->counts()), (std::vector<Count>{2, 2}));
  EXPECT_EQ(r.value, Ratio(9, 200));
  EXPECT_EQ(r.value, bound_B(10, 2, 4, Ratio(2, 5)));
  EXPECT_EQ(r.examined, 5u);

  const auto none = worst_nature(pop, alloc, 0);
  EXPECT_EQ(counts(none.distribution->counts()), (std::vector<Count>{0, 0}));
  EXPECT_EQ(none.value, 0);
}

TEST(WorstNature, WithinClosedFormBound) {
  StratifiedPopulation pop({4, 6});
  const auto r = worst_nature(pop, Allocation(pop, {2, 3}), 5);
  EXPECT_LE(r.value, minimax_upper_bound(pop, 5, Ratio(1, 2)));
  EXPECT_LE(r.value, Ratio(47, 1500));
}

TEST(WorstNature, AgreesWithBruteForceAndRelaxation) {
  brute::Gen gen(21);
  for (int trial = 0; trial < 120; ++trial) {
    const auto m = static_cast<std::size_t>(gen.uniform(2, 4));
    StratifiedPopulation pop(gen.sizes(m, 7));
    std::vector<Count> a;
    for (auto s : pop.sizes()) a.push_back(gen.uniform(1, s));
    Allocation alloc(pop, a);
    const Count R = gen.uniform(0, pop.N());
    const auto r = worst_nature(pop, alloc, R);
    EXPECT_EQ(r.value, brute_worst(pop, alloc, R));
    EXPECT_EQ(r.value, var_strat_without(Scenario(pop, *r.distribution, alloc)));
    EXPECT_EQ(r.examined, count_distributions(pop, R));

    // lexicographically smallest maximiser
    const auto all = nature_maximizers(pop, alloc, R);
    EXPECT_EQ(all.front(), *r.distribution);
    for (const auto& d : all) EXPECT_EQ(var_strat_without(Scenario(pop, d, alloc)), r.value);

    // relaxation dominance
    if (std::ranges::all_of(a, [&, j = std::size_t{0}](Count nj) mutable { return nj < pop.size(j++); })) {
      EXPECT_LE(r.value, nature_relaxed_max(pop, alloc, ratio(R, pop.N())).value);
    }

    // thread count does not change the answer
    const auto parallel = worst_nature(pop, alloc, R, {SearchLimits{}, 4});
    EXPECT_EQ(parallel.value, r.value);
    EXPECT_EQ(parallel.distribution, r.distribution);
  }
}

TEST(WorstNature, EqualSplitIsTheOnlyMaximiser) {
  StratifiedPopulation pop({4, 4, 4});
  Allocation alloc(pop, {2, 2, 2});
  const auto all = nature_maximizers(pop, alloc, 6);
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(counts(all.front().counts()), (std::vector<Count>{2, 2, 2}));
}

TEST(WorstNature, CapExceeded) {
  StratifiedPopulation pop({10, 10, 10});
  EXPECT_THROW(worst_nature(pop, Allocation(pop, {1, 1, 1}), 15, {SearchLimits{5}, 1}), Error);
}

TEST(BestAllocation, Examples) {
  StratifiedPopulation pop({5, 5});
  const auto even = best_allocation(pop, RedDistribution::from_counts(pop, {2, 2}), 4, AllocationClass::All);
  EXPECT_EQ(counts(even.allocation->counts()), (std::vector<Count>{2, 2}));
  EXPECT_EQ(even.value, Ratio(9, 200));

  const auto skew = best_allocation(pop, RedDistribution::from_counts(pop, {0, 4}), 4, AllocationClass::All);
  EXPECT_EQ(counts(skew.allocation->counts()), (std::vector<Count>{1, 3}));
  EXPECT_EQ(skew.value, Ratio(1, 150));

  StratifiedPopulation tiny({2, 2});
  const auto only = best_allocation(tiny, RedDistribution::from_counts(tiny, {1, 1}), 2, AllocationClass::All);
  EXPECT_EQ(counts(only.allocation->counts()), (std::vector<Count>{1, 1}));
  EXPECT_EQ(only.examined, 1u);
}

TEST(BestAllocation, EmptyClass) {
  StratifiedPopulation pop({2, 5});
  try {
    best_allocation(pop, RedDistribution::from_counts(pop, {1, 2}), 6, AllocationClass::ThreeQuarters);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyClass);
  }
}

TEST(MinimaxValue, EqualStrataBoundsCoincide) {
  StratifiedPopulation pop({5, 5});
  const auto r = minimax_value(pop, 4, 4);
  EXPECT_EQ(r.value, Ratio(9, 200));
  EXPECT_EQ(*r.lower_bound, Ratio(9, 200));
  EXPECT_EQ(*r.upper_bound, Ratio(9, 200));
  EXPECT_TRUE(*r.sandwich_holds);
}

TEST(MinimaxValue, Sandwich) {
  StratifiedPopulation pop({4, 6});
  const auto r = minimax_value(pop, 5, 5);
  EXPECT_EQ(*r.lower_bound, Ratio(1, 32));
  EXPECT_EQ(*r.upper_bound, Ratio(47, 1500));
  EXPECT_LE(Ratio(1, 32), r.value);
  EXPECT_LE(r.value, Ratio(47, 1500));
  EXPECT_TRUE(*r.sandwich_holds);
  // frozen from exhaustive enumeration of the three admissible allocations
  EXPECT_EQ(r.value, Ratio(47, 1500));
  EXPECT_EQ(counts(r.allocation.counts()), (std::vector<Count>{2, 3}));
}

TEST(MinimaxValue, SingleAllocation) {
  StratifiedPopulation pop({2, 2});
  const auto r = minimax_value(pop, 2, 2, AllocationClass::All);
  EXPECT_EQ(counts(r.allocation.counts()), (std::vector<Count>{1, 1}));
  EXPECT_EQ(counts(r.distribution.counts()), (std::vector<Count>{1, 1}));
  // (1/2)^2 * (1/2)(1/2) * (1/1) per stratum, two strata
  EXPECT_EQ(r.value, Ratio(1, 8));
  EXPECT_EQ(r.examined, 3u);
  // hypotheses hold, equal strata make both bounds B, but the sandwich is
  // only asserted for the admissible class
  EXPECT_EQ(*r.lower_bound, Ratio(1, 8));
  EXPECT_EQ(*r.upper_bound, Ratio(1, 8));
  EXPECT_FALSE(r.sandwich_holds);
}

TEST(MinimaxValue, LargerClassNeverIncreasesValue) {
  brute::Gen gen(9);
  for (int trial = 0; trial < 40; ++trial) {
    StratifiedPopulation pop(gen.sizes(static_cast<std::size_t>(gen.uniform(2, 3)), 6));
    const Count n = gen.uniform(static_cast<Count>(pop.m()), pop.N() - 1);
    const Count R = gen.uniform(0, pop.N());
    std::optional<Ratio> tq, adm;
    try {
      tq = minimax_value(pop, n, R, AllocationClass::ThreeQuarters).value;
    } catch (const Error&) {
    }
    try {
      adm = minimax_value(pop, n, R, AllocationClass::Admissible).value;
    } catch (const Error&) {
    }
    const Ratio all = minimax_value(pop, n, R, AllocationClass::All).value;
    if (tq) {
      EXPECT_LE(*adm, *tq);
    }
    if (adm) {
      EXPECT_LE(all, *adm);
    }
    const auto serial = minimax_value(pop, n, R, AllocationClass::All);
    const auto threaded = minimax_value(pop, n, R, AllocationClass::All, {SearchLimits{}, 3});
    EXPECT_EQ(serial.allocation, threaded.allocation);
    EXPECT_EQ(serial.distribution, threaded.distribution);
  }
}

TEST(ExhaustiveVarianceY, Examples) {
  EXPECT_EQ(exhaustive_variance_Y(7, 3, 6), Ratio(1, 147));
  EXPECT_EQ(exhaustive_variance_Y(10, 5, 10), 0);
  EXPECT_EQ(exhaustive_variance_Y(4, 2, 2), Ratio(1, 12));
  EXPECT_EQ(exhaustive_variance_Y(4, 2, 2), var_simple_without(4, 2, 2));
  EXPECT_THROW(exhaustive_variance_Y(30, 10, 15, SearchLimits{1000}), Error);
}

TEST(ExhaustiveVarianceY, MatchesHypergeometricPmf) {
  for (Count N = 1; N <= 10; ++N)
    for (Count red = 0; red <= N; ++red)
      for (Count n = 1; n <= N; ++n) ASSERT_EQ(exhaustive_variance_Y(N, red, n), brute::hypergeometric_variance(N, red, n));
}
