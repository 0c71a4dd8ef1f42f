#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "gtsel/order.hpp"
#include "gtsel/rank_test.hpp"

namespace gtsel {

// ceil(log2(n)) for n >= 1.
constexpr std::uint32_t ceil_log2(std::uint64_t n) noexcept {
  std::uint32_t bits = 0;
  while ((std::uint64_t{1} << bits) < n) ++bits;
  return bits;
}

// One bisection step: the interval [lo, hi] before the step, the probed
// midpoint and the rank test's decision.
struct SearchStep {
  Rank lo = 1;
  Rank hi = 1;
  Rank mid = 1;
  bool at_most = false;
};

struct ApxRankOutcome {
  Rank estimate = 1;
  std::uint32_t calls = 0;
  QueryLedger ledger;
  std::vector<SearchStep> steps;
};

// Definition of a delta-approximate rank: |RK(x) - r| <= delta * min(r, n - r).
inline bool is_rank_approximation(Rank true_rank, Rank estimate, std::size_t n, double delta) {
  const double diff = std::abs(static_cast<double>(true_rank) - static_cast<double>(estimate));
  const double room = std::min<double>(estimate, static_cast<double>(n) - estimate);
  return diff <= delta * room;
}

// Binary search over rank thresholds; each probe is a test_le call with failure
// budget epsilon / ceil(log2 n), so the whole search fails with probability at
// most epsilon.
template <GroupTestOracle O, FullRange64Generator G>
ApxRankOutcome apx_rank(const O& oracle, ElementId x, double delta, double epsilon, G& gen) {
  check_accuracy(delta, epsilon);
  const std::size_t n = oracle.size();
  if (x >= n) throw InvalidParameter("apx_rank: element id " + std::to_string(x) + " is not a real element");

  ApxRankOutcome out;
  const std::uint32_t depth = ceil_log2(n);
  const double per_call = depth == 0 ? epsilon : epsilon / depth;
  Rank lo = 1;
  auto hi = static_cast<Rank>(n);
  while (lo < hi) {
    const Rank mid = lo + (hi - lo) / 2;
    const TestLeResult probe = test_le(oracle, x, static_cast<double>(mid), delta, per_call, gen);
    out.steps.push_back({lo, hi, mid, probe.at_most});
    out.ledger += probe.ledger;
    ++out.calls;
    if (probe.at_most) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  out.estimate = lo;
  return out;
}

}  // namespace gtsel
