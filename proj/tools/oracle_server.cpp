// Reference group-test oracle server. Speaks the line protocol from
// gtsel/protocol.hpp on stdin/stdout; the hidden order for INIT <n> is
// make_instance(n, seed).

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gtsel/order.hpp"
#include "gtsel/protocol.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Reference group-test oracle server"};
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Seed of the hidden order (same as make_instance)");
  CLI11_PARSE(app, argc, argv);

  std::ios::sync_with_stdio(false);
  gtsel::protocol::ServerSession session([seed](std::size_t n) { return gtsel::make_instance(n, seed); });
  std::string line;
  while (std::getline(std::cin, line)) {
    std::cout << session.handle(line) << std::flush;
  }
  return 0;
}
