#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "gtsel/order.hpp"
#include "gtsel/random.hpp"

namespace gtsel {

struct MinFindOutcome {
  ElementId element = 0;
  // Number of Swap invocations.
  std::uint64_t iterations = 0;
  // Ledger relative to the oracle handed to min_find/max_find.
  QueryLedger ledger;
  // Group tests spent inside each Swap call, in order.
  std::vector<std::uint32_t> swap_costs;
};

// Returns an element a of `pool` with a <= x, uniformly among all such
// elements. `pool` is scrambled in place. Requires that pool holds at least
// one element <= x; otherwise the returned element is arbitrary.
//
// A uniform shuffle followed by repeated halving realizes the random balanced
// partition at every level: the first ceil(|A|/2) positions form A0, the rest
// A1, and the surviving half is again a uniformly ordered set.
template <GroupTestOracle O, FullRange64Generator G>
ElementId swap(const O& oracle, std::span<ElementId> pool, ElementId x, G& gen) {
  if (pool.empty()) throw InvalidParameter("swap needs a nonempty candidate set");
  shuffle(pool, gen);
  std::span<ElementId> a = pool;
  while (a.size() > 1) {
    const std::size_t half = (a.size() + 1) / 2;
    if (oracle.right_test(x, a.first(half))) {
      a = a.first(half);
    } else {
      a = a.subspan(half);
    }
  }
  return a.front();
}

namespace detail {

template <GroupTestOracle O, FullRange64Generator G>
MinFindOutcome min_find_distinct(const O& oracle, std::vector<ElementId> set, G& gen) {
  if (set.empty()) throw InvalidParameter("min_find needs at least one element");
  CountingOracle<O> counted(oracle);
  MinFindOutcome out;

  const auto pick = static_cast<std::size_t>(uniform_below(gen, set.size()));
  ElementId x = set[pick];
  // `others` is always set \ {x}.
  std::vector<ElementId> others = std::move(set);
  others.erase(others.begin() + static_cast<std::ptrdiff_t>(pick));
  std::vector<ElementId> scratch;

  while (!others.empty() && counted.right_test(x, others)) {
    scratch = others;
    const std::uint64_t before = counted.ledger().total();
    const ElementId next = swap(counted, std::span<ElementId>(scratch), x, gen);
    out.swap_costs.push_back(static_cast<std::uint32_t>(counted.ledger().total() - before));
    ++out.iterations;
    *std::find(others.begin(), others.end(), next) = x;
    x = next;
  }
  out.element = x;
  out.ledger = counted.ledger();
  return out;
}

}  // namespace detail

// Las Vegas minimum: the result always has rank 1; only the number of
// queries is random.
template <GroupTestOracle O, FullRange64Generator G>
MinFindOutcome min_find(const O& oracle, G& gen) {
  std::vector<ElementId> all(oracle.size());
  std::iota(all.begin(), all.end(), ElementId{0});
  return detail::min_find_distinct(oracle, std::move(all), gen);
}

// Minimum of a subset of the universe. Repeated ids are collapsed first.
template <GroupTestOracle O, FullRange64Generator G>
MinFindOutcome min_find(const O& oracle, std::span<const ElementId> candidates, G& gen) {
  std::vector<ElementId> set(candidates.begin(), candidates.end());
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return detail::min_find_distinct(oracle, std::move(set), gen);
}

template <GroupTestOracle O, FullRange64Generator G>
MinFindOutcome max_find(const O& oracle, G& gen) {
  const auto reversed = reversed_view(oracle);
  MinFindOutcome out = min_find(reversed, gen);
  out.ledger = out.ledger.swapped();
  return out;
}

}  // namespace gtsel
