#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "gtsel/rank_test.hpp"
#include "gtsel/stats.hpp"

using namespace gtsel;

namespace {

// Fraction of `runs` independent instances on which test_le says "<= r" for
// the element of the given true rank.
double at_most_rate(std::size_t n, Rank rank, double r, double delta, double epsilon, int runs,
                    std::uint64_t seed) {
  int yes = 0;
  for (int run = 0; run < runs; ++run) {
    const auto inst = make_instance(n, stream_seed(seed, run, 1));
    Rng gen = make_rng(seed, run, 2);
    yes += test_le(InstanceOracle(inst), inst.element_with_rank(rank), r, delta, epsilon, gen).at_most ? 1 : 0;
  }
  return static_cast<double>(yes) / runs;
}

}  // namespace

TEST(DeriveParams, SmallExample) {
  const auto p = derive_params(100, 10, 0.5, 0.1);
  EXPECT_EQ(p.divisor, 10u);
  EXPECT_EQ(p.n_eff, 100u);
  EXPECT_EQ(p.sample_size, 10u);
  EXPECT_NEAR(p.p_left, 0.4012630607616213, 1e-12);
  EXPECT_NEAR(p.p_right, 0.8031255956592774, 1e-12);
  EXPECT_NEAR(p.p_star, 0.6021943282104493, 1e-12);
  EXPECT_LT(p.p_left, p.p_star);
  EXPECT_LT(p.p_star, p.p_right);
}

TEST(DeriveParams, TrialCount) {
  EXPECT_EQ(trial_count(0.5, 0.1), 545u);
  EXPECT_EQ(trial_count(0.5, 0.2), 381u);
  EXPECT_EQ(trial_count(0.999999, 0.999999), 1u);
}

TEST(DeriveParams, PaddingRoundsUpToMultipleOfCeilR) {
  const auto p = derive_params(1000, 99.5, 0.5, 0.1);
  EXPECT_EQ(p.divisor, 100u);
  EXPECT_EQ(p.n_eff, 1000u);
  const auto q = derive_params(1000, 7, 0.5, 0.1);
  EXPECT_EQ(q.n_eff, 1001u);
  EXPECT_EQ(q.sample_size, 143u);
}

TEST(DeriveParams, SampleSizeNeverBelowTwo) {
  const auto p = derive_params(2, 1, 0.5, 0.1);
  EXPECT_EQ(p.sample_size, 2u);
}

TEST(DeriveParams, RejectsBadArguments) {
  EXPECT_THROW(derive_params(100, 10, 0.0, 0.1), InvalidParameter);
  EXPECT_THROW(derive_params(100, 10, 1.0, 0.1), InvalidParameter);
  EXPECT_THROW(derive_params(100, 10, 0.5, 0.0), InvalidParameter);
  EXPECT_THROW(derive_params(100, 10, 0.5, 1.0), InvalidParameter);
  EXPECT_THROW(derive_params(100, 0.5, 0.5, 0.1), InvalidParameter);
  EXPECT_THROW(derive_params(100, 51, 0.5, 0.1), InvalidParameter);
  EXPECT_THROW(derive_params(0, 1, 0.5, 0.1), InvalidParameter);
}

TEST(DeriveParams, SeparationAcrossGrid) {
  for (std::size_t n : {10u, 100u, 1000u, 100000u}) {
    for (double frac : {0.001, 0.01, 0.1, 0.5}) {
      const double r = std::max(1.0, std::floor(frac * static_cast<double>(n)));
      for (double delta : {0.1, 0.3, 0.5, 0.9}) {
        const auto p = derive_params(n, r, delta, 0.1);
        EXPECT_GT(p.p_right - p.p_left, delta / (2 * std::numbers::e * 2)) << n << ' ' << r << ' ' << delta;
      }
    }
  }
}

TEST(TestLe, LowRankSaysAtMost) {
  EXPECT_GE(at_most_rate(1000, 40, 100, 0.5, 0.2, 500, 1), 0.8);
}

TEST(TestLe, HighRankSaysAbove) {
  EXPECT_LE(at_most_rate(1000, 170, 100, 0.5, 0.2, 500, 2), 0.2);
}

TEST(TestLe, MinimumIsAlwaysAtMost) {
  EXPECT_EQ(at_most_rate(1000, 1, 100, 0.5, 0.2, 100, 3), 1.0);
}

TEST(TestLe, UsesExactlyTrialCountRightTests) {
  const auto inst = make_instance(1000, 5);
  Rng gen(5);
  for (Rank rk : {Rank{1}, Rank{100}, Rank{500}, Rank{1000}}) {
    const auto out = test_le(InstanceOracle(inst), inst.element_with_rank(rk), 100, 0.5, 0.2, gen);
    EXPECT_EQ(out.ledger.total(), 381u);
    EXPECT_EQ(out.ledger.right, 381u);
    EXPECT_EQ(out.trials, 381u);
    EXPECT_FALSE(out.reversed);
  }
}

TEST(TestLe, TrialPositiveRateMatchesClosedForm) {
  constexpr std::size_t n = 1000;
  const auto inst = make_instance(n, 6);
  const InstanceOracle base(inst);
  const auto params = derive_params(n, 100, 0.5, 0.2);
  const PaddedView<InstanceOracle> padded(base, params.divisor);
  std::vector<ElementId> sample(params.sample_size);
  Rng gen(6);
  for (Rank rk : {Rank{50}, Rank{100}, Rank{150}}) {
    constexpr std::uint64_t kTrials = 20000;
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < kTrials; ++t) {
      hits += sample_trial(padded, inst.element_with_rank(rk), std::span<ElementId>(sample), gen) ? 1 : 0;
    }
    const double p = positive_probability(params.n_eff, params.sample_size, rk);
    const double observed = static_cast<double>(hits) / kTrials;
    EXPECT_NEAR(observed, p, stats::binomial_margin(kTrials, p, 4.0)) << "rank " << rk;
  }
}

TEST(TestLe, AtMostRateDecreasesWithRank) {
  double previous = 1.0;
  for (Rank rk : {Rank{20}, Rank{60}, Rank{100}, Rank{140}, Rank{200}}) {
    const double rate = at_most_rate(1000, rk, 100, 0.5, 0.3, 200, 40 + rk);
    EXPECT_LE(rate, previous + 0.1) << "rank " << rk;
    previous = rate;
  }
}

TEST(TestLe, UpperHalfRunsOnReversedOrder) {
  const auto inst = make_instance(1000, 8);
  Rng gen(8);
  const auto low = test_le(InstanceOracle(inst), inst.element_with_rank(700), 900, 0.5, 0.05, gen);
  EXPECT_TRUE(low.reversed);
  EXPECT_EQ(low.ledger.left, trial_count(0.5, 0.05));
  EXPECT_EQ(low.ledger.right, 0u);
  EXPECT_GE(at_most_rate(1000, 700, 900, 0.5, 0.2, 200, 9), 0.8);
  EXPECT_LE(at_most_rate(1000, 990, 900, 0.5, 0.2, 200, 10), 0.2);
}

TEST(TestLe, TrivialThresholdsNeedNoQueries) {
  const auto inst = make_instance(50, 1);
  Rng gen(1);
  const auto below = test_le(InstanceOracle(inst), 3, 0.5, 0.5, 0.1, gen);
  EXPECT_FALSE(below.at_most);
  EXPECT_EQ(below.ledger.total(), 0u);
  const auto above = test_le(InstanceOracle(inst), 3, 50, 0.5, 0.1, gen);
  EXPECT_TRUE(above.at_most);
  EXPECT_EQ(above.ledger.total(), 0u);
}

TEST(TestLe, RejectsDummyOrOutOfRangeElement) {
  const auto inst = make_instance(50, 1);
  Rng gen(1);
  EXPECT_THROW(test_le(InstanceOracle(inst), 50, 10, 0.5, 0.1, gen), InvalidParameter);
}
