#include <gtest/gtest.h>

#include "gtsel/apx_rank.hpp"

using namespace gtsel;

TEST(CeilLog2, SmallValues) {
  EXPECT_EQ(ceil_log2(1), 0u);
  EXPECT_EQ(ceil_log2(2), 1u);
  EXPECT_EQ(ceil_log2(3), 2u);
  EXPECT_EQ(ceil_log2(1024), 10u);
  EXPECT_EQ(ceil_log2(1025), 11u);
}

TEST(IsRankApproximation, Band) {
  EXPECT_TRUE(is_rank_approximation(100, 100, 1000, 0.1));
  EXPECT_TRUE(is_rank_approximation(110, 100, 1000, 0.1));
  EXPECT_FALSE(is_rank_approximation(111, 100, 1000, 0.1));
  EXPECT_TRUE(is_rank_approximation(990, 1000, 1000, 0.1) == false);
}

TEST(ApxRank, SingleElement) {
  const auto inst = make_instance(1, 1);
  Rng gen(1);
  const auto out = apx_rank(InstanceOracle(inst), 0, 0.5, 0.1, gen);
  EXPECT_EQ(out.estimate, 1u);
  EXPECT_EQ(out.calls, 0u);
  EXPECT_EQ(out.ledger.total(), 0u);
}

TEST(ApxRank, FailureRateWithinBudget) {
  constexpr std::size_t n = 1000;
  constexpr int kRuns = 300;
  int failures = 0;
  for (int run = 0; run < kRuns; ++run) {
    const auto inst = make_instance(n, stream_seed(3, run, 1));
    Rng gen = make_rng(3, run, 2);
    const auto x = static_cast<ElementId>(uniform_below(gen, n));
    const auto out = apx_rank(InstanceOracle(inst), x, 0.5, 0.1, gen);
    failures += is_rank_approximation(inst.rank_of(x), out.estimate, n, 0.5) ? 0 : 1;
  }
  EXPECT_LE(static_cast<double>(failures) / kRuns, 0.164);
}

TEST(ApxRank, ExtremeElementsLandNearTheEnds) {
  constexpr std::size_t n = 256;
  const auto inst = make_instance(n, 4);
  Rng gen(4);
  const auto lo = apx_rank(InstanceOracle(inst), inst.element_with_rank(1), 0.5, 0.1, gen);
  EXPECT_LE(lo.estimate, 2u);
  const auto hi = apx_rank(InstanceOracle(inst), inst.element_with_rank(n), 0.5, 0.1, gen);
  EXPECT_GE(hi.estimate, n - 1);
}

TEST(ApxRank, LedgerIsCallsTimesTrialCount) {
  constexpr std::size_t n = 1000;
  const auto inst = make_instance(n, 5);
  Rng gen(5);
  const auto out = apx_rank(InstanceOracle(inst), 17, 0.5, 0.1, gen);
  // Bisection over 1..1000 takes 9 or 10 probes depending on the path.
  EXPECT_GE(out.calls, ceil_log2(n) - 1);
  EXPECT_LE(out.calls, ceil_log2(n));
  EXPECT_EQ(out.steps.size(), out.calls);
  EXPECT_EQ(out.ledger.total(), out.calls * trial_count(0.5, 0.1 / ceil_log2(n)));
}

TEST(ApxRank, ReplayIsDeterministic) {
  const auto inst = make_instance(500, 6);
  Rng a(77), b(77);
  const auto x = apx_rank(InstanceOracle(inst), 9, 0.3, 0.1, a);
  const auto y = apx_rank(InstanceOracle(inst), 9, 0.3, 0.1, b);
  EXPECT_EQ(x.estimate, y.estimate);
  EXPECT_EQ(x.ledger, y.ledger);
  ASSERT_EQ(x.steps.size(), y.steps.size());
  for (std::size_t i = 0; i < x.steps.size(); ++i) EXPECT_EQ(x.steps[i].mid, y.steps[i].mid);
}

TEST(ApxRank, IntervalShrinksAroundMidpoint) {
  const auto inst = make_instance(777, 7);
  Rng gen(7);
  const auto out = apx_rank(InstanceOracle(inst), 100, 0.5, 0.1, gen);
  for (std::size_t i = 0; i < out.steps.size(); ++i) {
    const auto& s = out.steps[i];
    ASSERT_LE(s.lo, s.mid);
    ASSERT_LT(s.mid, s.hi);
    EXPECT_EQ(s.mid, s.lo + (s.hi - s.lo) / 2);
    if (i + 1 < out.steps.size()) {
      const auto& next = out.steps[i + 1];
      EXPECT_EQ(next.lo, s.at_most ? s.lo : s.mid + 1);
      EXPECT_EQ(next.hi, s.at_most ? s.mid : s.hi);
    }
  }
  EXPECT_GE(out.estimate, 1u);
  EXPECT_LE(out.estimate, 777u);
}

TEST(ApxRank, RejectsOutOfRangeElement) {
  const auto inst = make_instance(10, 1);
  Rng gen(1);
  EXPECT_THROW(apx_rank(InstanceOracle(inst), 10, 0.5, 0.1, gen), InvalidParameter);
}
