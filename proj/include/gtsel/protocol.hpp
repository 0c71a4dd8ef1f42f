#pragma once

// Newline-delimited ASCII protocol spoken between ExternalOracle and an
// oracle process over the child's stdin/stdout:
//
//   client: INIT <n>                 server: OK
//   client: L <u> <m> <v1> ... <vm>  server: Y | N     (u <= some v?)
//   client: R <u> <m> <v1> ... <vm>  server: Y | N     (some v <= u?)
//   server: ERR <message>            on any invalid request
//
// Ids are 0-based decimal. One request is in flight at a time.

#include <charconv>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gtsel/order.hpp"

namespace gtsel::protocol {

enum class TestKind : char { Left = 'L', Right = 'R' };

inline std::string format_init(std::size_t n) { return "INIT " + std::to_string(n) + "\n"; }

inline std::string format_query(TestKind kind, ElementId u, std::span<const ElementId> v) {
  std::string line;
  line.reserve(16 + v.size() * 8);
  line.push_back(static_cast<char>(kind));
  line.push_back(' ');
  line += std::to_string(u);
  line.push_back(' ');
  line += std::to_string(v.size());
  for (ElementId e : v) {
    line.push_back(' ');
    line += std::to_string(e);
  }
  line.push_back('\n');
  return line;
}

// Whitespace tokenizer that keeps views into the line.
inline std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) words.push_back(line.substr(start, i - start));
  }
  return words;
}

inline std::optional<std::uint64_t> parse_u64(std::string_view word) {
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc{} || end != word.data() + word.size()) return std::nullopt;
  return value;
}

// Server side of the protocol. The order is supplied by `make_order`, called
// once per INIT with the announced size.
class ServerSession {
 public:
  using OrderFactory = std::function<TotalOrderInstance(std::size_t)>;

  explicit ServerSession(OrderFactory make_order) : make_order_(std::move(make_order)) {}

  // One request line (without the newline) in, one reply line (with it) out.
  std::string handle(std::string_view line) {
    const auto words = split_words(line);
    if (words.empty()) return "ERR empty request\n";
    if (words[0] == "INIT") {
      if (words.size() != 2) return "ERR INIT takes exactly one argument\n";
      const auto n = parse_u64(words[1]);
      if (!n || *n == 0 || *n > 0xffffffffULL) return "ERR bad universe size\n";
      instance_.emplace(make_order_(static_cast<std::size_t>(*n)));
      if (instance_->size() != *n) return "ERR order factory returned the wrong size\n";
      return "OK\n";
    }
    if (words[0] != "L" && words[0] != "R") return "ERR unknown command\n";
    if (!instance_) return "ERR INIT required before queries\n";
    if (words.size() < 3) return "ERR truncated query\n";
    const auto u = parse_u64(words[1]);
    const auto m = parse_u64(words[2]);
    if (!u || !m) return "ERR malformed number\n";
    if (words.size() != 3 + *m) return "ERR set size does not match element count\n";
    const std::size_t n = instance_->size();
    if (*u >= n) return "ERR id out of range\n";
    v_.clear();
    for (std::size_t i = 0; i < *m; ++i) {
      const auto e = parse_u64(words[3 + i]);
      if (!e) return "ERR malformed number\n";
      if (*e >= n) return "ERR id out of range\n";
      v_.push_back(static_cast<ElementId>(*e));
    }
    const InstanceOracle oracle(*instance_);
    const bool yes = words[0] == "L" ? oracle.left_test(static_cast<ElementId>(*u), v_)
                                     : oracle.right_test(static_cast<ElementId>(*u), v_);
    return yes ? "Y\n" : "N\n";
  }

  const TotalOrderInstance* instance() const noexcept { return instance_ ? &*instance_ : nullptr; }

 private:
  OrderFactory make_order_;
  std::optional<TotalOrderInstance> instance_;
  std::vector<ElementId> v_;
};

}  // namespace gtsel::protocol
