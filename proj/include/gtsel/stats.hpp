#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>

#include "gtsel/error.hpp"

namespace gtsel::stats {

// sigmas * sqrt(rate (1 - rate) / trials)
inline double binomial_margin(std::uint64_t trials, double rate, double sigmas) {
  if (trials == 0) throw InvalidParameter("binomial_margin needs at least one trial");
  if (!(rate >= 0 && rate <= 1)) throw InvalidParameter("rate must lie in [0,1]");
  return sigmas * std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
}

// One "at least / at most this rate" claim checked against observed counts.
struct FrequencyCheck {
  enum class Bound { AtLeast, AtMost };

  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double claimed_rate = 0;
  double margin = 0;
  Bound bound = Bound::AtLeast;

  double observed() const { return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials); }
  double threshold() const { return bound == Bound::AtLeast ? claimed_rate - margin : claimed_rate + margin; }
  bool passed() const {
    return bound == Bound::AtLeast ? observed() >= threshold() : observed() <= threshold();
  }
};

inline FrequencyCheck at_least(std::uint64_t successes, std::uint64_t trials, double rate, double sigmas = 3.0) {
  return {successes, trials, rate, binomial_margin(trials, rate, sigmas), FrequencyCheck::Bound::AtLeast};
}

inline FrequencyCheck at_most(std::uint64_t successes, std::uint64_t trials, double rate, double sigmas = 3.0) {
  return {successes, trials, rate, binomial_margin(trials, rate, sigmas), FrequencyCheck::Bound::AtMost};
}

// Upper 0.001 quantiles of chi-square, pinned for the degrees of freedom the
// suites use.
inline constexpr std::array<std::pair<unsigned, double>, 21> kChiSquareCritical001{{
    {1, 10.8276},   {2, 13.8155},   {3, 16.2662},   {4, 18.4668},   {5, 20.5150},
    {6, 22.4577},   {7, 24.3219},   {8, 26.1245},   {9, 27.8772},   {10, 29.5883},
    {11, 31.2641},  {15, 37.6973},  {19, 43.8202},  {31, 61.0983},  {63, 103.4424},
    {99, 148.2304}, {127, 181.9930}, {255, 330.5197}, {511, 615.5149}, {999, 1142.8480},
    {1023, 1168.4972},
}};

// Table lookup; other df above 30 fall back to the Wilson-Hilferty cube-root
// normal approximation (relative error well under 0.5% there).
inline double chi_square_critical_001(unsigned df) {
  if (df == 0) throw InvalidParameter("chi-square needs at least one degree of freedom");
  for (const auto& [d, value] : kChiSquareCritical001) {
    if (d == df) return value;
  }
  if (df < 30) throw InvalidParameter("no pinned chi-square critical value for df=" + std::to_string(df));
  constexpr double z = 3.090232306167813;  // upper 0.001 normal quantile
  const double k = df;
  const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  return k * t * t * t;
}

struct ChiSquareResult {
  double statistic = 0;
  unsigned degrees_of_freedom = 0;
  double critical = 0;
  bool passed = false;
};

// Pearson goodness of fit of `counts` against the uniform distribution over
// its categories, at significance 0.001.
inline ChiSquareResult chi_square_uniformity(std::span<const std::uint64_t> counts) {
  if (counts.size() < 2) throw InvalidParameter("chi-square uniformity needs at least two categories");
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  if (expected < 5.0) {
    throw InvalidParameter("histogram underpowered: expected count per category " + std::to_string(expected) +
                           " < 5");
  }
  ChiSquareResult out;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    out.statistic += d * d / expected;
  }
  out.degrees_of_freedom = static_cast<unsigned>(counts.size() - 1);
  out.critical = chi_square_critical_001(out.degrees_of_freedom);
  out.passed = out.statistic < out.critical;
  return out;
}

// Two-sided two-proportion z statistic with pooled variance.
inline double two_proportion_z(std::uint64_t s1, std::uint64_t n1, std::uint64_t s2, std::uint64_t n2) {
  if (n1 == 0 || n2 == 0) throw InvalidParameter("two_proportion_z needs nonempty samples");
  const double p1 = static_cast<double>(s1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(s2) / static_cast<double>(n2);
  const double pooled = static_cast<double>(s1 + s2) / static_cast<double>(n1 + n2);
  const double se = std::sqrt(pooled * (1 - pooled) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
  return se == 0 ? 0.0 : (p1 - p2) / se;
}

}  // namespace gtsel::stats
