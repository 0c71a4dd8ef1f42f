#include <cmath>

#include <gtest/gtest.h>

#include "gtsel/selection.hpp"
#include "gtsel/stats.hpp"

using namespace gtsel;

TEST(SelectParams, DerivedValues) {
  const auto p = derive_select_params(100, 0.4, 0.1);
  EXPECT_NEAR(p.delta_upper, 0.1 / 1.3, 1e-12);
  EXPECT_NEAR(p.delta_lower, 0.1 / 0.7, 1e-12);
  EXPECT_EQ(p.max_rounds, 200u);
  EXPECT_NEAR(p.epsilon_check, 0.1 / 201, 1e-15);
  const auto q = derive_select_params(10, 0.5, 0.1);
  EXPECT_EQ(q.max_rounds, 128u);
  EXPECT_NEAR(q.epsilon_check, 0.1 / 129, 1e-15);
}

TEST(SelectParams, NonIntegralRoundsStayWithinBudget) {
  const auto p = derive_select_params(10, 0.3, 0.1);
  EXPECT_EQ(p.max_rounds, 356u);
  EXPECT_LE(p.epsilon_check * (p.max_rounds + 1), 0.1 + 1e-15);
}

TEST(SelectParams, RejectsBadArguments) {
  EXPECT_THROW(derive_select_params(0, 0.5, 0.1), InvalidParameter);
  EXPECT_THROW(derive_select_params(10, 0.0, 0.1), InvalidParameter);
  EXPECT_THROW(derive_select_params(10, 0.5, 1.0), InvalidParameter);
}

TEST(SampleMinThreshold, Value) {
  EXPECT_NEAR(sample_min_threshold(1000, 0.5), (1 - std::exp(-1.0)) * 500, 1e-9);
  EXPECT_NEAR(sample_min_threshold(1, 0.5) / 1.0, 0.31606, 1e-5);
}

TEST(GetCandidate, SmallTargetUsesSampleMinimum) {
  const auto inst = make_instance(1000, 1);
  Rng gen(1);
  const auto c = get_candidate(InstanceOracle(inst), 10, 0.25, gen);
  EXPECT_TRUE(c.from_sample_min);
  EXPECT_GT(c.ledger.total(), 0u);
  EXPECT_LT(c.element, 1000u);
}

TEST(GetCandidate, LargeTargetDrawsUniformly) {
  const auto inst = make_instance(1000, 1);
  Rng gen(1);
  const auto c = get_candidate(InstanceOracle(inst), 400, 0.25, gen);
  EXPECT_FALSE(c.from_sample_min);
  EXPECT_EQ(c.ledger.total(), 0u);
}

TEST(GetCandidate, NeverReturnsPaddingDummy) {
  // n=5, k=2: one dummy slot, samples of 3; all-dummy draws are redrawn.
  const auto inst = make_instance(5, 2);
  Rng gen(2);
  for (int i = 0; i < 2000; ++i) {
    const auto c = get_candidate(InstanceOracle(inst), 2, 0.99, gen);
    ASSERT_TRUE(c.from_sample_min);
    ASSERT_LT(c.element, 5u);
  }
}

TEST(GetCandidate, HitRateAtLeastQuarterDeltaSquared) {
  constexpr std::size_t n = 1000;
  for (std::size_t k : {10u, 100u, 400u}) {
    const double delta = 0.25;
    constexpr int kRuns = 2000;
    int hits = 0;
    for (int run = 0; run < kRuns; ++run) {
      const auto inst = make_instance(n, stream_seed(k, run, 1));
      Rng gen = make_rng(k, run, 2);
      const auto c = get_candidate(InstanceOracle(inst), k, delta, gen);
      const double rk = inst.rank_of(c.element);
      const double kd = static_cast<double>(k);
      hits += (rk > kd - delta * kd && rk <= kd + delta * kd) ? 1 : 0;
    }
    const auto check = stats::at_least(hits, kRuns, delta * delta / 4);
    EXPECT_TRUE(check.passed()) << "k=" << k << " observed " << check.observed();
  }
}

TEST(GetCandidate, RejectsUpperHalfTarget) {
  const auto inst = make_instance(10, 1);
  Rng gen(1);
  EXPECT_THROW(get_candidate(InstanceOracle(inst), 6, 0.5, gen), InvalidParameter);
  EXPECT_THROW(get_candidate(InstanceOracle(inst), 0, 0.5, gen), InvalidParameter);
}

TEST(IsSelectionApproximation, TwoElements) {
  EXPECT_TRUE(is_selection_approximation(1, 1, 2, 0.5));
  EXPECT_FALSE(is_selection_approximation(2, 1, 2, 0.5));
}

TEST(ApxSelect, NotFoundMeansEveryRoundRan) {
  constexpr std::size_t n = 300;
  for (int run = 0; run < 40; ++run) {
    const auto inst = make_instance(n, run);
    Rng gen(run);
    const auto out = apx_select(InstanceOracle(inst), 30, 0.5, 0.1, gen);
    const auto params = derive_select_params(30, 0.5, 0.1);
    if (out.found) {
      ASSERT_TRUE(out.element);
      EXPECT_LE(out.rounds_used, params.max_rounds);
    } else {
      EXPECT_FALSE(out.element);
      EXPECT_EQ(out.rounds_used, params.max_rounds);
    }
  }
}

TEST(ApxSelect, LedgerMatchesOuterCounter) {
  constexpr std::size_t n = 400;
  for (std::size_t k : {20u, 390u}) {
    const auto inst = make_instance(n, k);
    const InstanceOracle base(inst);
    const CountingOracle<InstanceOracle> counted(base);
    Rng gen(k);
    const auto out = apx_select(counted, k, 0.5, 0.1, gen);
    EXPECT_EQ(out.ledger, counted.ledger());
    EXPECT_EQ(out.ledger, out.candidate_ledger + out.check_ledger);
  }
}

TEST(ApxSelect, ReturnedElementsAreAccurate) {
  constexpr std::size_t n = 1000;
  constexpr int kRuns = 60;
  int returned = 0, accurate = 0;
  for (int run = 0; run < kRuns; ++run) {
    const auto inst = make_instance(n, stream_seed(11, run, 1));
    Rng gen = make_rng(11, run, 2);
    const auto out = apx_select(InstanceOracle(inst), 100, 0.4, 0.1, gen);
    if (!out.element) continue;
    ++returned;
    accurate += is_selection_approximation(inst.rank_of(*out.element), 100, n, 0.4) ? 1 : 0;
  }
  EXPECT_GE(returned, kRuns / 2);
  ASSERT_GT(returned, 0);
  EXPECT_GE(static_cast<double>(accurate) / returned, 0.85);
}

TEST(ApxSelect, AcceptanceChecksRejectFarCandidates) {
  // The two rank checks used for acceptance, run on candidates whose ranks
  // are far outside the target window.
  constexpr std::size_t n = 1000;
  const std::size_t k = 100;
  const auto params = derive_select_params(k, 0.4, 0.1);
  const double kd = static_cast<double>(k);
  int accepted_far = 0;
  for (int run = 0; run < 100; ++run) {
    const auto inst = make_instance(n, run);
    Rng gen(run);
    for (Rank rk : {Rank{40}, Rank{160}}) {
      const ElementId x = inst.element_with_rank(rk);
      const bool upper =
          test_le(InstanceOracle(inst), x, kd + 0.75 * 0.4 * kd, params.delta_upper, params.epsilon_check, gen).at_most;
      const bool lower =
          upper && test_le(InstanceOracle(inst), x, kd - 0.75 * 0.4 * kd, params.delta_lower, params.epsilon_check, gen)
                       .at_most;
      accepted_far += (upper && !lower) ? 1 : 0;
    }
  }
  EXPECT_LE(accepted_far, 2);
}

TEST(ApxSelect, MirroredTargetsBehaveAlike) {
  constexpr std::size_t n = 500;
  constexpr int kRuns = 40;
  std::uint64_t low_ok = 0, high_ok = 0;
  for (int run = 0; run < kRuns; ++run) {
    const auto inst = make_instance(n, stream_seed(12, run, 1));
    Rng g1 = make_rng(12, run, 2), g2 = make_rng(12, run, 3);
    const auto low = apx_select(InstanceOracle(inst), 100, 0.5, 0.1, g1);
    const auto high = apx_select(InstanceOracle(inst), 401, 0.5, 0.1, g2);
    EXPECT_FALSE(low.reversed);
    EXPECT_TRUE(high.reversed);
    low_ok += low.element && is_selection_approximation(inst.rank_of(*low.element), 100, n, 0.5) ? 1 : 0;
    high_ok += high.element && is_selection_approximation(inst.rank_of(*high.element), 401, n, 0.5) ? 1 : 0;
  }
  EXPECT_LT(std::abs(stats::two_proportion_z(low_ok, kRuns, high_ok, kRuns)), 3.29);
}

TEST(ApxSelect, RejectsOutOfRangeTarget) {
  const auto inst = make_instance(10, 1);
  Rng gen(1);
  EXPECT_THROW(apx_select(InstanceOracle(inst), 0, 0.5, 0.1, gen), InvalidParameter);
  EXPECT_THROW(apx_select(InstanceOracle(inst), 11, 0.5, 0.1, gen), InvalidParameter);
}
