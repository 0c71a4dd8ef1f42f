#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gtsel/minfind.hpp"
#include "gtsel/order.hpp"
#include "gtsel/random.hpp"
#include "gtsel/rank_test.hpp"

namespace gtsel {

struct SelectParams {
  std::size_t k = 1;
  double delta = 0;
  double epsilon = 0;
  // Accuracy of the upper check TestLE(x, k + 3/4 delta k, ...): (delta/4) / (1 + 3/4 delta).
  double delta_upper = 0;
  // Accuracy of the lower check TestLE(x, k - 3/4 delta k, ...): (delta/4) / (1 - 3/4 delta).
  double delta_lower = 0;
  // Per-check failure budget, union-bounded over every round plus the final accept.
  double epsilon_check = 0;
  std::uint32_t max_rounds = 0;  // ceil(32 / delta^2)
};

inline SelectParams derive_select_params(std::size_t k, double delta, double epsilon) {
  check_accuracy(delta, epsilon);
  if (k < 1) throw InvalidParameter("selection target k must be at least 1");
  SelectParams p;
  p.k = k;
  p.delta = delta;
  p.epsilon = epsilon;
  const double quarter = delta / 4.0;
  const double lower_denominator = 1.0 - 0.75 * delta;
  if (!(lower_denominator > 0)) throw InvalidParameter("delta too large for the lower rank check");
  p.delta_upper = quarter / (1.0 + 0.75 * delta);
  p.delta_lower = quarter / lower_denominator;
  // 32/delta^2 is frequently integral in exact arithmetic (delta = 0.4, 0.5);
  // absorb the representation error before taking the ceiling.
  const double rounds = 32.0 / (delta * delta);
  p.max_rounds = static_cast<std::uint32_t>(std::ceil(rounds * (1.0 - 1e-12)));
  p.epsilon_check = epsilon / (static_cast<double>(p.max_rounds) + 1.0);
  return p;
}

// |RK(x) - k| <= delta * min(k, n - k).
inline bool is_selection_approximation(Rank true_rank, std::size_t k, std::size_t n, double delta) {
  const double diff = std::abs(static_cast<double>(true_rank) - static_cast<double>(k));
  const double room = std::min<double>(static_cast<double>(k), static_cast<double>(n - k));
  return diff <= delta * room;
}

// k at or below this uses the minimum-of-sample branch of get_candidate.
inline double sample_min_threshold(std::size_t n, double delta) {
  return (1.0 - std::exp(-2.0 * delta)) * static_cast<double>(n) / 2.0;
}

struct CandidateDraw {
  ElementId element = 0;
  bool from_sample_min = false;
  // Samples discarded because every draw landed on a padding dummy.
  std::uint32_t redraws = 0;
  QueryLedger ledger;
};

// Draws an element whose rank falls in (k - delta k, k + delta k] with
// probability at least delta^2 / 4. For small k this is the minimum of
// ceil(n/k) samples taken with replacement from the universe padded to a
// multiple of k; otherwise a single uniform element.
template <GroupTestOracle O, FullRange64Generator G>
CandidateDraw get_candidate(const O& oracle, std::size_t k, double delta, G& gen) {
  if (!(delta > 0 && delta < 1)) throw InvalidParameter("delta must lie in (0,1)");
  const std::size_t n = oracle.size();
  if (k < 1 || k > (n + 1) / 2) {
    throw InvalidParameter("get_candidate needs 1 <= k <= ceil(n/2) (got k=" + std::to_string(k) +
                           ", n=" + std::to_string(n) + ")");
  }
  CandidateDraw out;
  if (static_cast<double>(k) > sample_min_threshold(n, delta)) {
    out.element = static_cast<ElementId>(uniform_below(gen, n));
    return out;
  }

  out.from_sample_min = true;
  const PaddedView<O> padded(oracle, k);
  const std::size_t draws = padded.size() / k;
  std::vector<ElementId> sample(draws);
  for (;;) {
    bool any_real = false;
    for (ElementId& s : sample) {
      s = static_cast<ElementId>(uniform_below(gen, padded.size()));
      any_real = any_real || !padded.is_dummy(s);
    }
    if (any_real) break;
    ++out.redraws;
  }
  const MinFindOutcome m = min_find(padded, std::span<const ElementId>(sample), gen);
  out.element = m.element;
  out.ledger = m.ledger;
  return out;
}

struct SelectOutcome {
  bool found = false;
  std::optional<ElementId> element;
  std::uint32_t rounds_used = 0;
  // Set when k > ceil(n/2) and the search ran for n - k + 1 on the reversed order.
  bool reversed = false;
  QueryLedger ledger;
  // Per-component breakdown; sums to `ledger`.
  QueryLedger candidate_ledger;
  QueryLedger check_ledger;
};

namespace detail {

template <GroupTestOracle O, FullRange64Generator G>
SelectOutcome apx_select_lower_half(const O& oracle, std::size_t k, const SelectParams& params, G& gen) {
  SelectOutcome out;
  const double kd = static_cast<double>(k);
  const double upper_rank = kd + 0.75 * params.delta * kd;
  const double lower_rank = kd - 0.75 * params.delta * kd;
  for (std::uint32_t round = 1; round <= params.max_rounds; ++round) {
    out.rounds_used = round;
    const CandidateDraw cand = get_candidate(oracle, k, params.delta / 2.0, gen);
    out.candidate_ledger += cand.ledger;

    const TestLeResult upper =
        test_le(oracle, cand.element, upper_rank, params.delta_upper, params.epsilon_check, gen);
    out.check_ledger += upper.ledger;
    if (!upper.at_most) continue;
    const TestLeResult lower =
        test_le(oracle, cand.element, lower_rank, params.delta_lower, params.epsilon_check, gen);
    out.check_ledger += lower.ledger;
    if (lower.at_most) continue;

    out.found = true;
    out.element = cand.element;
    break;
  }
  out.ledger = out.candidate_ledger + out.check_ledger;
  return out;
}

}  // namespace detail

// Approximate selection. Returns an element with probability at least 1/2;
// a returned element satisfies |RK(x) - k| <= delta * min(k, n - k) with
// probability at least 1 - epsilon. "Not found" is an ordinary outcome.
template <GroupTestOracle O, FullRange64Generator G>
SelectOutcome apx_select(const O& oracle, std::size_t k, double delta, double epsilon, G& gen) {
  const std::size_t n = oracle.size();
  if (k < 1 || k > n) {
    throw InvalidParameter("selection target k=" + std::to_string(k) + " outside 1.." + std::to_string(n));
  }
  if (k <= (n + 1) / 2) {
    return detail::apx_select_lower_half(oracle, k, derive_select_params(k, delta, epsilon), gen);
  }
  const std::size_t mirrored = n - k + 1;
  const auto reversed = reversed_view(oracle);
  SelectOutcome out =
      detail::apx_select_lower_half(reversed, mirrored, derive_select_params(mirrored, delta, epsilon), gen);
  out.reversed = true;
  out.ledger = out.ledger.swapped();
  out.candidate_ledger = out.candidate_ledger.swapped();
  out.check_ledger = out.check_ledger.swapped();
  return out;
}

}  // namespace gtsel
