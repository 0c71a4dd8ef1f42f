#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gtsel/error.hpp"
#include "gtsel/random.hpp"

namespace gtsel {

// Index into the element universe (real elements first, padding dummies after).
using ElementId = std::uint32_t;
// 1-based order position: the number of elements y with y <= x.
using Rank = std::uint32_t;

// Hidden ground truth the oracles answer about: a bijection from ids to ranks.
class TotalOrderInstance {
 public:
  explicit TotalOrderInstance(std::vector<Rank> rank_of) : rank_of_(std::move(rank_of)) {
    if (rank_of_.empty()) throw InvalidParameter("instance must contain at least one element");
    element_of_rank_.assign(rank_of_.size(), 0);
    std::vector<bool> seen(rank_of_.size(), false);
    for (std::size_t id = 0; id < rank_of_.size(); ++id) {
      const Rank r = rank_of_[id];
      if (r < 1 || r > rank_of_.size() || seen[r - 1]) {
        throw InvalidParameter("rank assignment is not a bijection onto 1..n");
      }
      seen[r - 1] = true;
      element_of_rank_[r - 1] = static_cast<ElementId>(id);
    }
  }

  std::size_t size() const noexcept { return rank_of_.size(); }

  Rank rank_of(ElementId x) const {
    if (x >= rank_of_.size()) {
      throw InvalidParameter("element id " + std::to_string(x) + " outside universe of size " +
                             std::to_string(rank_of_.size()));
    }
    return rank_of_[x];
  }

  ElementId element_with_rank(Rank r) const {
    if (r < 1 || r > rank_of_.size()) {
      throw InvalidParameter("rank " + std::to_string(r) + " outside 1.." +
                             std::to_string(rank_of_.size()));
    }
    return element_of_rank_[r - 1];
  }

  std::span<const Rank> ranks() const noexcept { return rank_of_; }

 private:
  std::vector<Rank> rank_of_;
  std::vector<ElementId> element_of_rank_;
};

// Uniformly random instance of n elements; identical for identical seeds.
inline TotalOrderInstance make_instance(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidParameter("instance size must be at least 1");
  if (n > 0xffffffffULL) throw InvalidParameter("instance size exceeds 32-bit id space");
  std::vector<Rank> ranks(n);
  std::iota(ranks.begin(), ranks.end(), Rank{1});
  Rng gen{splitmix64(seed)};
  shuffle(std::span<Rank>(ranks), gen);
  return TotalOrderInstance(std::move(ranks));
}

// Brute-force verification oracle for real elements.
inline Rank exact_rank(const TotalOrderInstance& instance, ElementId x) {
  if (x >= instance.size()) {
    throw InvalidParameter("exact_rank is defined for real elements only (id " +
                           std::to_string(x) + ")");
  }
  return instance.rank_of(x);
}

struct QueryLedger {
  std::uint64_t left = 0;
  std::uint64_t right = 0;

  std::uint64_t total() const noexcept { return left + right; }
  // Same queries seen through a reversed view.
  QueryLedger swapped() const noexcept { return {right, left}; }

  QueryLedger& operator+=(const QueryLedger& other) noexcept {
    left += other.left;
    right += other.right;
    return *this;
  }
  friend QueryLedger operator+(QueryLedger a, const QueryLedger& b) noexcept { return a += b; }
  friend bool operator==(const QueryLedger&, const QueryLedger&) = default;
};

// left_test(u, V):  some v in V with u <= v.
// right_test(u, V): some v in V with v <= u.
// size() is the universe size, dummies included.
template <class O>
concept GroupTestOracle = requires(const O& o, ElementId u, std::span<const ElementId> v) {
  { o.size() } -> std::convertible_to<std::size_t>;
  { o.left_test(u, v) } -> std::same_as<bool>;
  { o.right_test(u, v) } -> std::same_as<bool>;
};

// Answers group tests directly from a TotalOrderInstance. Immutable, so safe
// for concurrent queries as long as the instance outlives it.
class InstanceOracle {
 public:
  explicit InstanceOracle(const TotalOrderInstance& instance) : instance_(&instance) {}

  std::size_t size() const noexcept { return instance_->size(); }
  const TotalOrderInstance& instance() const noexcept { return *instance_; }

  bool left_test(ElementId u, std::span<const ElementId> v) const {
    const auto ranks = instance_->ranks();
    const Rank ru = checked_rank(u);
    check_ids(v);
    return std::any_of(v.begin(), v.end(), [&](ElementId e) { return ru <= ranks[e]; });
  }

  bool right_test(ElementId u, std::span<const ElementId> v) const {
    const auto ranks = instance_->ranks();
    const Rank ru = checked_rank(u);
    check_ids(v);
    return std::any_of(v.begin(), v.end(), [&](ElementId e) { return ranks[e] <= ru; });
  }

 private:
  Rank checked_rank(ElementId u) const { return instance_->rank_of(u); }

  void check_ids(std::span<const ElementId> v) const {
    const std::size_t n = instance_->size();
    for (ElementId e : v) {
      if (e >= n) {
        throw InvalidParameter("element id " + std::to_string(e) + " outside universe of size " +
                               std::to_string(n));
      }
    }
  }

  const TotalOrderInstance* instance_;
};

// Counts the queries forwarded through it. The counter is the only mutable
// state, so one CountingOracle belongs to one run.
template <GroupTestOracle O>
class CountingOracle {
 public:
  explicit CountingOracle(const O& inner) : inner_(&inner) {}

  std::size_t size() const { return inner_->size(); }

  bool left_test(ElementId u, std::span<const ElementId> v) const {
    ++ledger_.left;
    return inner_->left_test(u, v);
  }
  bool right_test(ElementId u, std::span<const ElementId> v) const {
    ++ledger_.right;
    return inner_->right_test(u, v);
  }

  const QueryLedger& ledger() const noexcept { return ledger_; }
  void reset() noexcept { ledger_ = {}; }

 private:
  const O* inner_;
  mutable QueryLedger ledger_;
};

// The order read backwards: left and right tests trade places, so the rank of
// x becomes size() - RK(x) + 1.
template <GroupTestOracle O>
class ReversedView {
 public:
  explicit ReversedView(const O& inner) : inner_(&inner) {}

  std::size_t size() const { return inner_->size(); }
  bool left_test(ElementId u, std::span<const ElementId> v) const { return inner_->right_test(u, v); }
  bool right_test(ElementId u, std::span<const ElementId> v) const { return inner_->left_test(u, v); }

  const O& base() const noexcept { return *inner_; }

 private:
  const O* inner_;
};

template <GroupTestOracle O>
ReversedView<O> reversed_view(const O& oracle) {
  return ReversedView<O>(oracle);
}

// Extends the universe to the next multiple of `divisor` with dummy elements
// greater than every real element. Dummies take ids n..n'-1 and are ordered
// among themselves by id, so dummy id d has rank d + 1. Tests touching only
// real elements are forwarded unchanged.
template <GroupTestOracle O>
class PaddedView {
 public:
  PaddedView(const O& inner, std::size_t divisor) : inner_(&inner), real_(inner.size()) {
    if (divisor == 0) throw InvalidParameter("padding divisor must be positive");
    padded_ = divisor * ((real_ + divisor - 1) / divisor);
  }

  std::size_t size() const noexcept { return padded_; }
  std::size_t real_size() const noexcept { return real_; }
  std::size_t dummy_count() const noexcept { return padded_ - real_; }
  bool is_dummy(ElementId e) const noexcept { return e >= real_; }

  bool left_test(ElementId u, std::span<const ElementId> v) const {
    check(u);
    for (ElementId e : v) check(e);
    if (is_dummy(u)) {
      return std::any_of(v.begin(), v.end(), [&](ElementId e) { return e >= u; });
    }
    if (std::any_of(v.begin(), v.end(), [&](ElementId e) { return is_dummy(e); })) return true;
    return !v.empty() && inner_->left_test(u, v);
  }

  bool right_test(ElementId u, std::span<const ElementId> v) const {
    check(u);
    for (ElementId e : v) check(e);
    if (is_dummy(u)) {
      return std::any_of(v.begin(), v.end(), [&](ElementId e) { return !is_dummy(e) || e <= u; });
    }
    if (std::none_of(v.begin(), v.end(), [&](ElementId e) { return is_dummy(e); })) {
      return !v.empty() && inner_->right_test(u, v);
    }
    std::vector<ElementId> real;
    real.reserve(v.size());
    std::copy_if(v.begin(), v.end(), std::back_inserter(real), [&](ElementId e) { return !is_dummy(e); });
    return !real.empty() && inner_->right_test(u, real);
  }

 private:
  void check(ElementId e) const {
    if (e >= padded_) {
      throw InvalidParameter("element id " + std::to_string(e) + " outside padded universe of size " +
                             std::to_string(padded_));
    }
  }

  const O* inner_;
  std::size_t real_;
  std::size_t padded_;
};

template <GroupTestOracle O>
PaddedView<O> padded_view(const O& oracle, std::size_t divisor) {
  return PaddedView<O>(oracle, divisor);
}

// Rank of x as observed through any oracle: one singleton right test per
// element. Used only for verification; never part of an algorithm's ledger.
template <GroupTestOracle O>
Rank oracle_rank(const O& oracle, ElementId x) {
  Rank r = 0;
  for (ElementId y = 0; y < oracle.size(); ++y) {
    const ElementId single[] = {y};
    if (oracle.right_test(x, single)) ++r;
  }
  return r;
}

}  // namespace gtsel
