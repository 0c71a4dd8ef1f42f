// Approximate median of 100000 hidden values using only group tests, then
// compare against the truth.

#include <iostream>

#include "gtsel/gtsel.hpp"

int main() {
  constexpr std::size_t n = 100000;
  const auto instance = gtsel::make_instance(n, 42);
  const gtsel::InstanceOracle oracle(instance);
  gtsel::Rng gen = gtsel::make_rng(42, 0, 1);

  const auto smallest = gtsel::min_find(oracle, gen);
  std::cout << "min: id " << smallest.element << " rank " << gtsel::exact_rank(instance, smallest.element)
            << " after " << smallest.ledger.total() << " group tests\n";

  const auto picked = gtsel::apx_select(oracle, n / 2, 0.3, 0.05, gen);
  if (!picked.found) {
    std::cout << "median: not found after " << picked.rounds_used << " rounds\n";
    return 0;
  }
  std::cout << "median: id " << *picked.element << " rank " << gtsel::exact_rank(instance, *picked.element)
            << " (target " << n / 2 << ") after " << picked.ledger.total() << " group tests, "
            << picked.rounds_used << " rounds\n";

  const auto estimate = gtsel::apx_rank(oracle, *picked.element, 0.1, 0.05, gen);
  std::cout << "its estimated rank: " << estimate.estimate << " using " << estimate.ledger.total()
            << " group tests\n";
  return 0;
}
