#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "gtsel/apx_rank.hpp"
#include "gtsel/error.hpp"
#include "gtsel/external_oracle.hpp"
#include "gtsel/minfind.hpp"
#include "gtsel/order.hpp"
#include "gtsel/random.hpp"
#include "gtsel/rank_test.hpp"
#include "gtsel/selection.hpp"

namespace gtsel::harness {

enum class Algorithm { MinFind, MaxFind, TestLe, Rank, Select };

inline std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::MinFind: return "minfind";
    case Algorithm::MaxFind: return "maxfind";
    case Algorithm::TestLe: return "testle";
    case Algorithm::Rank: return "rank";
    case Algorithm::Select: return "select";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::MinFind, Algorithm::MaxFind, Algorithm::TestLe, Algorithm::Rank, Algorithm::Select}) {
    if (algorithm_name(a) == name) return a;
  }
  return std::nullopt;
}

enum class Format { Csv, Json };

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::MinFind;
  std::size_t n = 16;
  // r for testle, k for select; unused otherwise.
  double target = 0;
  // testle/rank: probe the element of this true rank instead of a random one.
  std::optional<Rank> probe_rank;
  double delta = 0.5;
  double epsilon = 0.1;
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  bool fixed_instance = false;
  // Empty: builtin oracle. Otherwise argv of an external oracle process.
  std::vector<std::string> oracle_command;
  bool oracle_reentrant = false;
  unsigned jobs = 0;  // 0 = hardware concurrency
};

struct TrialReport {
  std::uint64_t trial = 0;
  std::optional<ElementId> result_id;
  std::optional<Rank> est_rank;
  std::optional<Rank> true_rank;
  bool success = false;
  std::uint64_t queries_left = 0;
  std::uint64_t queries_right = 0;
  std::optional<std::uint32_t> rounds;
  std::string error;

  std::uint64_t queries() const { return queries_left + queries_right; }
};

struct Summary {
  std::uint64_t trials = 0;
  std::uint64_t errors = 0;
  std::uint64_t successes = 0;
  double success_rate = 0;
  std::uint64_t total_queries = 0;
  double mean_queries = 0;
  std::uint64_t max_queries = 0;
  // Selection only: fraction of trials that returned an element.
  std::optional<double> return_rate;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialReport> rows;
  Summary summary;
};

// Stream purposes for stream_seed(seed, trial, purpose).
inline constexpr std::uint64_t kInstanceStream = 1;
inline constexpr std::uint64_t kProbeStream = 2;
inline constexpr std::uint64_t kAlgorithmStream = 3;

inline bool uses_accuracy(Algorithm a) { return a == Algorithm::TestLe || a == Algorithm::Rank || a == Algorithm::Select; }

inline void validate(const ExperimentConfig& c) {
  if (c.n == 0) throw InvalidParameter("--n must be at least 1");
  if (c.n > 0xffffffffULL) throw InvalidParameter("--n exceeds the 32-bit id space");
  if (uses_accuracy(c.algorithm)) check_accuracy(c.delta, c.epsilon);
  if (c.algorithm == Algorithm::TestLe && !(c.target > 0)) throw InvalidParameter("testle needs --r > 0");
  if (c.algorithm == Algorithm::Select) {
    if (c.target < 1 || c.target > static_cast<double>(c.n) || c.target != std::floor(c.target)) {
      throw InvalidParameter("select needs an integer --k in 1..n");
    }
  }
  if (c.probe_rank && (*c.probe_rank < 1 || *c.probe_rank > c.n)) {
    throw InvalidParameter("--x-rank must lie in 1..n");
  }
}

inline Summary summarize(const ExperimentConfig& config, const std::vector<TrialReport>& rows) {
  Summary s;
  s.trials = rows.size();
  std::uint64_t returned = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) ++s.errors;
    if (r.success) ++s.successes;
    if (r.result_id) ++returned;
    s.total_queries += r.queries();
    s.max_queries = std::max(s.max_queries, r.queries());
  }
  if (s.trials > 0) {
    s.success_rate = static_cast<double>(s.successes) / static_cast<double>(s.trials);
    s.mean_queries = static_cast<double>(s.total_queries) / static_cast<double>(s.trials);
  }
  if (config.algorithm == Algorithm::Select) {
    s.return_rate = s.trials > 0 ? static_cast<double>(returned) / static_cast<double>(s.trials) : 0.0;
  }
  return s;
}

namespace detail {

// |RK(x) - r| >= delta * min(r, n - r): outside the band the rank test owes a
// specific answer.
inline std::optional<bool> owed_answer(Rank true_rank, double r, std::size_t n, double delta) {
  const double band = delta * std::min(r, static_cast<double>(n) - r);
  const double rk = true_rank;
  if (rk <= r && r - rk >= band) return true;
  if (rk > r && rk - r >= band) return false;
  return std::nullopt;
}

template <GroupTestOracle O>
TrialReport run_trial(const ExperimentConfig& c, const O& oracle, const TotalOrderInstance& truth,
                      std::uint64_t trial) {
  TrialReport row;
  row.trial = trial;
  Rng gen = make_rng(c.seed, trial, kAlgorithmStream);
  auto probe = [&]() -> ElementId {
    if (c.probe_rank) return truth.element_with_rank(*c.probe_rank);
    Rng pick = make_rng(c.seed, trial, kProbeStream);
    return static_cast<ElementId>(uniform_below(pick, c.n));
  };

  switch (c.algorithm) {
    case Algorithm::MinFind:
    case Algorithm::MaxFind: {
      const MinFindOutcome out = c.algorithm == Algorithm::MinFind ? min_find(oracle, gen) : max_find(oracle, gen);
      row.result_id = out.element;
      row.true_rank = exact_rank(truth, out.element);
      row.success = *row.true_rank == (c.algorithm == Algorithm::MinFind ? 1 : truth.size());
      row.queries_left = out.ledger.left;
      row.queries_right = out.ledger.right;
      break;
    }
    case Algorithm::TestLe: {
      const ElementId x = probe();
      const TestLeResult out = test_le(oracle, x, c.target, c.delta, c.epsilon, gen);
      row.result_id = x;
      row.true_rank = exact_rank(truth, x);
      const auto owed = owed_answer(*row.true_rank, c.target, c.n, c.delta);
      row.success = !owed || *owed == out.at_most;
      row.queries_left = out.ledger.left;
      row.queries_right = out.ledger.right;
      break;
    }
    case Algorithm::Rank: {
      const ElementId x = probe();
      const ApxRankOutcome out = apx_rank(oracle, x, c.delta, c.epsilon, gen);
      row.result_id = x;
      row.est_rank = out.estimate;
      row.true_rank = exact_rank(truth, x);
      row.success = is_rank_approximation(*row.true_rank, out.estimate, c.n, c.delta);
      row.queries_left = out.ledger.left;
      row.queries_right = out.ledger.right;
      break;
    }
    case Algorithm::Select: {
      const auto k = static_cast<std::size_t>(c.target);
      const SelectOutcome out = apx_select(oracle, k, c.delta, c.epsilon, gen);
      row.rounds = out.rounds_used;
      row.queries_left = out.ledger.left;
      row.queries_right = out.ledger.right;
      if (out.element) {
        row.result_id = *out.element;
        row.true_rank = exact_rank(truth, *out.element);
        row.success = is_selection_approximation(*row.true_rank, k, c.n, c.delta);
      }
      break;
    }
  }
  return row;
}

// Ground truth behind an external oracle, recovered by singleton tests.
inline TotalOrderInstance learn_instance(const ExternalOracle& oracle) {
  std::vector<Rank> ranks(oracle.size());
  for (ElementId x = 0; x < oracle.size(); ++x) ranks[x] = oracle_rank(oracle, x);
  return TotalOrderInstance(std::move(ranks));
}

class Worker {
 public:
  explicit Worker(const ExperimentConfig& c) : config_(c) {
    if (c.fixed_instance && c.oracle_command.empty()) {
      fixed_.emplace(make_instance(c.n, stream_seed(c.seed, 0, kInstanceStream)));
    }
  }

  TrialReport run(std::uint64_t trial) {
    try {
      if (config_.oracle_command.empty()) {
        if (fixed_) return run_trial(config_, InstanceOracle(*fixed_), *fixed_, trial);
        const TotalOrderInstance inst = make_instance(config_.n, stream_seed(config_.seed, trial, kInstanceStream));
        return run_trial(config_, InstanceOracle(inst), inst, trial);
      }
      if (!external_) {
        external_ = std::make_unique<ExternalOracle>(config_.oracle_command, config_.n);
        if (!external_truth_) external_truth_.emplace(learn_instance(*external_));
      }
      return run_trial(config_, *external_, *external_truth_, trial);
    } catch (const std::exception& e) {
      // The process may be wedged; start a fresh one for the next trial.
      external_.reset();
      TrialReport row;
      row.trial = trial;
      row.error = e.what();
      return row;
    }
  }

 private:
  const ExperimentConfig& config_;
  std::optional<TotalOrderInstance> fixed_;
  std::unique_ptr<ExternalOracle> external_;
  std::optional<TotalOrderInstance> external_truth_;
};

}  // namespace detail

// Runs config.trials independent trials on a worker pool. Trial t draws all of
// its randomness from streams derived from (seed, t), so rows are identical
// whatever the worker count or completion order.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  ExperimentResult result;
  result.config = config;
  result.rows.resize(config.trials);

  unsigned jobs = config.jobs != 0 ? config.jobs : std::max(1u, std::thread::hardware_concurrency());
  if (!config.oracle_command.empty() && !config.oracle_reentrant) jobs = 1;
  jobs = static_cast<unsigned>(std::min<std::uint64_t>(jobs, std::max<std::uint64_t>(config.trials, 1)));

  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    detail::Worker worker(config);
    for (std::uint64_t t = next++; t < config.trials; t = next++) result.rows[t] = worker.run(t);
  };
  if (jobs <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(work);
  }
  result.summary = summarize(config, result.rows);
  return result;
}

// Shortest round-trip decimal form.
inline std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

inline constexpr std::string_view kCsvHeader =
    "algo,n,target,delta,epsilon,seed,trial,result_id,est_rank,true_rank,success,queries_left,queries_right,rounds";

inline void write_csv(std::ostream& out, const ExperimentResult& r) {
  const auto& c = r.config;
  const bool accuracy = uses_accuracy(c.algorithm);
  const bool targeted = c.algorithm == Algorithm::TestLe || c.algorithm == Algorithm::Select;
  const std::string prefix = std::string(algorithm_name(c.algorithm)) + "," + std::to_string(c.n) + "," +
                             (targeted ? format_double(c.target) : "") + "," +
                             (accuracy ? format_double(c.delta) : "") + "," +
                             (accuracy ? format_double(c.epsilon) : "") + "," + std::to_string(c.seed) + ",";
  auto opt = [](const auto& v) { return v ? std::to_string(*v) : std::string(); };
  out << kCsvHeader << '\n';
  for (const auto& row : r.rows) {
    out << prefix << row.trial << ',' << opt(row.result_id) << ',' << opt(row.est_rank) << ','
        << opt(row.true_rank) << ',' << (row.success ? "true" : "false") << ',' << row.queries_left << ','
        << row.queries_right << ',' << opt(row.rounds) << '\n';
  }
}

inline nlohmann::ordered_json to_json(const ExperimentResult& r) {
  using nlohmann::ordered_json;
  const auto& c = r.config;
  const bool accuracy = uses_accuracy(c.algorithm);
  const bool targeted = c.algorithm == Algorithm::TestLe || c.algorithm == Algorithm::Select;
  auto opt = [](const auto& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };

  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json j;
    j["algo"] = algorithm_name(c.algorithm);
    j["n"] = c.n;
    j["target"] = targeted ? ordered_json(c.target) : ordered_json(nullptr);
    j["delta"] = accuracy ? ordered_json(c.delta) : ordered_json(nullptr);
    j["epsilon"] = accuracy ? ordered_json(c.epsilon) : ordered_json(nullptr);
    j["seed"] = c.seed;
    j["trial"] = row.trial;
    j["result_id"] = opt(row.result_id);
    j["est_rank"] = opt(row.est_rank);
    j["true_rank"] = opt(row.true_rank);
    j["success"] = row.success;
    j["queries_left"] = row.queries_left;
    j["queries_right"] = row.queries_right;
    j["rounds"] = opt(row.rounds);
    if (!row.error.empty()) j["error"] = row.error;
    rows.push_back(std::move(j));
  }
  const Summary& s = r.summary;
  ordered_json summary;
  summary["trials"] = s.trials;
  summary["errors"] = s.errors;
  summary["successes"] = s.successes;
  summary["success_rate"] = s.success_rate;
  summary["total_queries"] = s.total_queries;
  summary["mean_queries"] = s.mean_queries;
  summary["max_queries"] = s.max_queries;
  if (s.return_rate) summary["return_rate"] = *s.return_rate;
  return ordered_json{{"rows", std::move(rows)}, {"summary", std::move(summary)}};
}

inline void write_report(const ExperimentResult& r, Format format, std::ostream& out) {
  if (format == Format::Csv) {
    write_csv(out, r);
  } else {
    out << to_json(r).dump(2) << '\n';
  }
}

inline void write_report(const ExperimentResult& r, Format format, const std::string& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::system_error(errno, std::generic_category(), "cannot open report file '" + path + "'");
  write_report(r, format, file);
  file.flush();
  if (!file) throw std::system_error(errno, std::generic_category(), "failed writing report file '" + path + "'");
}

}  // namespace gtsel::harness
