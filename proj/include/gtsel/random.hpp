#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <utility>

namespace gtsel {

// Every randomized routine takes its generator explicitly. Experiments derive
// one independent stream per (seed, trial, purpose) with stream_seed().
using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t purpose = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ (purpose * 0xd1b54a32d192ed03ULL));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t purpose = 0) {
  return Rng{stream_seed(seed, stream, purpose)};
}

template <class G>
concept FullRange64Generator =
    std::uniform_random_bit_generator<G> && (G::min() == 0) &&
    (G::max() == std::numeric_limits<std::uint64_t>::max());

// Uniform integer in [0, bound). Lemire's multiply-shift with rejection; unlike
// std::uniform_int_distribution the output sequence is fixed across standard
// libraries, which the byte-identical report contract relies on.
template <FullRange64Generator G>
std::uint64_t uniform_below(G& gen, std::uint64_t bound) {
  __extension__ using u128 = unsigned __int128;
  std::uint64_t x = gen();
  u128 m = static_cast<u128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = gen();
      m = static_cast<u128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Fisher-Yates; every permutation equally likely.
template <FullRange64Generator G, class T>
void shuffle(std::span<T> items, G& gen) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(gen, i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace gtsel
