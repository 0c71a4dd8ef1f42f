// gtsel: run group-testing order-statistics experiments and the verification
// suite from the command line.
//
//   gtsel minfind --n 1024 --trials 100 --seed 7 --out runs.csv
//   gtsel testle --n 1000 --r 100 --delta 0.5 --epsilon 0.2 --x-rank 170 --trials 500
//   gtsel select --n 1000 --k 100 --delta 0.4 --epsilon 0.1 --format json
//   gtsel verify --oracle "cmd:gtsel-oracle-server"
//
// Exit codes: 0 success, 1 verification failure (or failed trials), 2 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gtsel/harness.hpp"
#include "gtsel/verify.hpp"

namespace {

using gtsel::harness::Algorithm;
using gtsel::harness::ExperimentConfig;
using gtsel::harness::Format;

constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

struct Flags {
  std::size_t n = 16;
  std::optional<double> r;
  std::optional<std::size_t> k;
  std::optional<gtsel::Rank> x_rank;
  double delta = 0.5;
  double epsilon = 0.1;
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  std::string oracle = "builtin";
  bool fixed_instance = false;
  bool reentrant = false;
  unsigned jobs = 0;
  std::string out;
  std::string format = "csv";
  std::vector<std::size_t> sizes{64, 256, 1024, 4096};
};

// "builtin" -> empty; "cmd:<path> [args]" -> argv.
std::vector<std::string> parse_oracle(const std::string& value) {
  if (value == "builtin") return {};
  if (value.rfind("cmd:", 0) == 0) {
    auto argv = gtsel::split_command(value.substr(4));
    if (argv.empty()) throw gtsel::InvalidParameter("--oracle cmd: needs a command");
    return argv;
  }
  throw gtsel::InvalidParameter("--oracle must be 'builtin' or 'cmd:<path>'");
}

void add_common(CLI::App& cmd, Flags& f) {
  cmd.add_option("--n", f.n, "Number of elements")->check(CLI::PositiveNumber);
  cmd.add_option("--trials", f.trials, "Independent trials");
  cmd.add_option("--seed", f.seed, "Master seed");
  cmd.add_option("--oracle", f.oracle, "builtin | cmd:<path> [args]");
  cmd.add_flag("--fixed-instance", f.fixed_instance, "Use one instance for every trial");
  cmd.add_flag("--reentrant-oracle", f.reentrant, "External oracle command may run once per worker");
  cmd.add_option("--jobs", f.jobs, "Worker threads (0 = all cores)");
  cmd.add_option("--out", f.out, "Report path (default: stdout)");
  cmd.add_option("--format", f.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
}

void add_accuracy(CLI::App& cmd, Flags& f) {
  cmd.add_option("--delta", f.delta, "Approximation parameter in (0,1)");
  cmd.add_option("--epsilon", f.epsilon, "Failure probability in (0,1)");
}

ExperimentConfig to_config(Algorithm algo, const Flags& f) {
  ExperimentConfig c;
  c.algorithm = algo;
  c.n = f.n;
  c.delta = f.delta;
  c.epsilon = f.epsilon;
  c.trials = f.trials;
  c.seed = f.seed;
  c.fixed_instance = f.fixed_instance;
  c.oracle_command = parse_oracle(f.oracle);
  c.oracle_reentrant = f.reentrant;
  c.jobs = f.jobs;
  c.probe_rank = f.x_rank;
  if (algo == Algorithm::TestLe) {
    if (!f.r) throw gtsel::InvalidParameter("testle requires --r");
    c.target = *f.r;
  }
  if (algo == Algorithm::Select) {
    if (!f.k) throw gtsel::InvalidParameter("select requires --k");
    c.target = static_cast<double>(*f.k);
  }
  return c;
}

Format to_format(const std::string& s) { return s == "json" ? Format::Json : Format::Csv; }

void print_summary(const gtsel::harness::ExperimentResult& r) {
  const auto& s = r.summary;
  std::cerr << gtsel::harness::algorithm_name(r.config.algorithm) << ": trials=" << s.trials
            << " success_rate=" << s.success_rate << " mean_queries=" << s.mean_queries
            << " max_queries=" << s.max_queries;
  if (s.return_rate) std::cerr << " return_rate=" << *s.return_rate;
  if (s.errors) std::cerr << " errors=" << s.errors;
  std::cerr << '\n';
}

int run_one(Algorithm algo, const Flags& f) {
  const auto result = gtsel::harness::run_experiment(to_config(algo, f));
  if (f.out.empty()) {
    gtsel::harness::write_report(result, to_format(f.format), std::cout);
  } else {
    gtsel::harness::write_report(result, to_format(f.format), f.out);
  }
  print_summary(result);
  return result.summary.errors == 0 ? 0 : kExitVerifyFailed;
}

// Mean query cost of each algorithm across universe sizes.
int run_bench(const Flags& f) {
  std::ostringstream table;
  table << "algo,n,trials,mean_queries,max_queries,success_rate,return_rate\n";
  for (const std::size_t n : f.sizes) {
    for (const Algorithm algo :
         {Algorithm::MinFind, Algorithm::MaxFind, Algorithm::TestLe, Algorithm::Rank, Algorithm::Select}) {
      Flags g = f;
      g.n = n;
      g.r = std::max(1.0, static_cast<double>(n) / 10.0);
      g.k = std::max<std::size_t>(1, n / 10);
      const auto result = gtsel::harness::run_experiment(to_config(algo, g));
      const auto& s = result.summary;
      table << gtsel::harness::algorithm_name(algo) << ',' << n << ',' << s.trials << ','
            << gtsel::harness::format_double(s.mean_queries) << ',' << s.max_queries << ','
            << gtsel::harness::format_double(s.success_rate) << ','
            << (s.return_rate ? gtsel::harness::format_double(*s.return_rate) : "") << '\n';
    }
  }
  if (f.out.empty()) {
    std::cout << table.str();
  } else {
    std::ofstream file(f.out, std::ios::binary | std::ios::trunc);
    if (!(file << table.str())) throw std::runtime_error("cannot write '" + f.out + "'");
  }
  return 0;
}

int run_verify(const Flags& f) {
  gtsel::verify::SuiteOptions opt;
  opt.seed = f.seed;
  opt.server_command = parse_oracle(f.oracle);
  opt.jobs = f.jobs;
  return gtsel::verify::run_suite(opt, std::cout) ? 0 : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group-testing min/max finding, approximate rank and approximate selection"};
  app.require_subcommand(1);
  Flags f;

  auto* minfind = app.add_subcommand("minfind", "Las Vegas minimum finding");
  auto* maxfind = app.add_subcommand("maxfind", "Maximum finding via reversed group tests");
  auto* testle = app.add_subcommand("testle", "Monte Carlo test of RK(x) <= r");
  auto* rank = app.add_subcommand("rank", "Approximate rank of an element");
  auto* select = app.add_subcommand("select", "Approximate selection of the k-th element");
  auto* verify = app.add_subcommand("verify", "Run the statistical verification suite");
  auto* bench = app.add_subcommand("bench", "Mean query cost across universe sizes");

  for (auto* cmd : {minfind, maxfind, testle, rank, select, bench}) add_common(*cmd, f);
  for (auto* cmd : {testle, rank, select, bench}) add_accuracy(*cmd, f);
  testle->add_option("--r", f.r, "Target rank threshold");
  select->add_option("--k", f.k, "Target rank")->check(CLI::PositiveNumber);
  for (auto* cmd : {testle, rank}) cmd->add_option("--x-rank", f.x_rank, "Probe the element of this true rank");
  bench->add_option("--ns", f.sizes, "Universe sizes")->delimiter(',');
  verify->add_option("--seed", f.seed, "Master seed");
  verify->add_option("--oracle", f.oracle, "cmd:<reference server> to include external conformance");
  verify->add_option("--jobs", f.jobs, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*minfind) return run_one(Algorithm::MinFind, f);
    if (*maxfind) return run_one(Algorithm::MaxFind, f);
    if (*testle) return run_one(Algorithm::TestLe, f);
    if (*rank) return run_one(Algorithm::Rank, f);
    if (*select) return run_one(Algorithm::Select, f);
    if (*bench) return run_bench(f);
    if (*verify) return run_verify(f);
  } catch (const gtsel::InvalidParameter& e) {
    std::cerr << "gtsel: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "gtsel: " << e.what() << '\n';
    return kExitVerifyFailed;
  }
  return kExitUsage;
}
