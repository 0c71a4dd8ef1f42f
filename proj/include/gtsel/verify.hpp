#pragma once

// Statistical verification suite. Every probabilistic claim is checked at a
// fixed seed against a threshold that already includes a 3-sigma binomial
// margin, so outcomes are deterministic.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gtsel/apx_rank.hpp"
#include "gtsel/external_oracle.hpp"
#include "gtsel/harness.hpp"
#include "gtsel/minfind.hpp"
#include "gtsel/order.hpp"
#include "gtsel/rank_test.hpp"
#include "gtsel/selection.hpp"
#include "gtsel/stats.hpp"

namespace gtsel::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct SuiteOptions {
  std::uint64_t seed = 20250101;
  // argv prefix of the reference oracle server; "--seed <s>" is appended.
  // Empty skips the external-oracle conformance check.
  std::vector<std::string> server_command;
  unsigned jobs = 0;
};

namespace detail {

inline std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

}  // namespace detail

// 1. MinFind always returns the rank-1 element.
inline CriterionResult minfind_exactness(const SuiteOptions& opt) {
  constexpr std::size_t sizes[] = {2, 3, 4, 8, 16, 64, 256, 1024};
  constexpr std::uint64_t kRuns = 10000;
  std::uint64_t wrong = 0;
  for (std::uint64_t run = 0; run < kRuns; ++run) {
    const std::size_t n = sizes[run % std::size(sizes)];
    const auto inst = make_instance(n, stream_seed(opt.seed, run, 11));
    Rng gen = make_rng(opt.seed, run, 12);
    const auto out = min_find(InstanceOracle(inst), gen);
    if (exact_rank(inst, out.element) != 1) ++wrong;
  }
  return {1, "MinFind exactness", wrong == 0,
          std::to_string(kRuns - wrong) + "/" + std::to_string(kRuns) + " runs returned rank 1"};
}

// 2. Each Swap issued by MinFind costs exactly ceil(log2(n-1)) tests.
inline CriterionResult swap_query_count(const SuiteOptions& opt) {
  constexpr int kRunsPerSize = 8;
  std::uint64_t swaps = 0, exact = 0, within_bounds = 0;
  std::size_t first_bad_n = 0;
  std::uint32_t first_bad_cost = 0;
  for (std::size_t n = 3; n <= 1025; ++n) {
    const std::uint32_t hi = ceil_log2(n - 1);
    std::uint32_t lo = 0;
    while ((std::uint64_t{2} << lo) <= n - 1) ++lo;  // floor(log2(n-1))
    for (int run = 0; run < kRunsPerSize; ++run) {
      const auto inst = make_instance(n, stream_seed(opt.seed, n * 64 + run, 21));
      Rng gen = make_rng(opt.seed, n * 64 + run, 22);
      const auto out = min_find(InstanceOracle(inst), gen);
      for (const auto cost : out.swap_costs) {
        ++swaps;
        if (cost == hi) {
          ++exact;
        } else if (first_bad_n == 0) {
          first_bad_n = n;
          first_bad_cost = cost;
        }
        if (cost >= lo && cost <= hi) ++within_bounds;
      }
    }
  }
  std::string detail = std::to_string(exact) + "/" + std::to_string(swaps) + " swaps used exactly ceil(log2(n-1)); " +
                       std::to_string(within_bounds) + "/" + std::to_string(swaps) +
                       " within [floor(log2(n-1)), ceil(log2(n-1))]";
  if (first_bad_n != 0) {
    detail += "; first mismatch n=" + std::to_string(first_bad_n) + " cost=" + std::to_string(first_bad_cost) +
              " expected=" + std::to_string(ceil_log2(first_bad_n - 1));
  }
  return {2, "Swap query count", exact == swaps && swaps > 0, detail};
}

// 3. Swap(S, x) returns each y <= x with probability 1/|Y|.
inline CriterionResult swap_uniformity(const SuiteOptions& opt) {
  constexpr std::size_t n = 64;
  constexpr Rank kTarget = 32;
  constexpr int kCalls = 10000;
  const auto inst = make_instance(n, stream_seed(opt.seed, 0, 31));
  const InstanceOracle oracle(inst);
  const ElementId x = inst.element_with_rank(kTarget);
  Rng gen = make_rng(opt.seed, 0, 32);
  std::vector<std::uint64_t> counts(kTarget, 0);
  std::vector<ElementId> pool(n);
  int out_of_range = 0;
  for (int call = 0; call < kCalls; ++call) {
    std::iota(pool.begin(), pool.end(), ElementId{0});
    const Rank r = exact_rank(inst, swap(oracle, std::span<ElementId>(pool), x, gen));
    if (r > kTarget) {
      ++out_of_range;
    } else {
      ++counts[r - 1];
    }
  }
  const auto chi = stats::chi_square_uniformity(counts);
  return {3, "Swap uniformity", chi.passed && out_of_range == 0,
          "chi2=" + detail::fixed(chi.statistic, 2) + " < " + detail::fixed(chi.critical, 2) + " (df " +
              std::to_string(chi.degrees_of_freedom) + "), returns above rank 32: " + std::to_string(out_of_range)};
}

// 4. Mean MinFind queries grow like log^2 n.
inline CriterionResult minfind_scaling(const SuiteOptions& opt) {
  constexpr std::size_t sizes[] = {1u << 6, 1u << 8, 1u << 10, 1u << 12};
  constexpr std::uint64_t kRuns = 5000;
  std::map<std::size_t, double> mean;
  std::string detail;
  for (const std::size_t n : sizes) {
    std::uint64_t total = 0;
    for (std::uint64_t run = 0; run < kRuns; ++run) {
      const auto inst = make_instance(n, stream_seed(opt.seed, n * kRuns + run, 41));
      Rng gen = make_rng(opt.seed, n * kRuns + run, 42);
      total += min_find(InstanceOracle(inst), gen).ledger.total();
    }
    mean[n] = static_cast<double>(total) / kRuns;
    const double lg = std::log2(static_cast<double>(n));
    detail += "n=" + std::to_string(n) + " mean=" + detail::fixed(mean[n], 2) +
              " c=" + detail::fixed(mean[n] / (lg * lg), 3) + "; ";
  }
  const double ratio = mean[1u << 12] / mean[1u << 8];
  detail += "mean(2^12)/mean(2^8)=" + detail::fixed(ratio, 3) + " in [1.8, 2.9]";
  return {4, "MinFind scaling", ratio >= 1.8 && ratio <= 2.9, detail};
}

// 5. TestLE error rate outside the band, plus exact per-call query count.
inline CriterionResult testle_error_rate(const SuiteOptions& opt) {
  constexpr std::size_t n = 1000;
  constexpr double r = 100, delta = 0.5, epsilon = 0.2;
  constexpr std::uint64_t kTrials = 500;
  const std::uint64_t expected_queries = derive_params(n, r, delta, epsilon).trials;
  bool ledger_ok = true;
  std::string detail;
  bool ok = true;
  for (const Rank rank : {Rank{40}, Rank{170}}) {
    const bool owed = rank <= r;
    std::uint64_t errors = 0;
    for (std::uint64_t t = 0; t < kTrials; ++t) {
      const auto inst = make_instance(n, stream_seed(opt.seed, rank * kTrials + t, 51));
      Rng gen = make_rng(opt.seed, rank * kTrials + t, 52);
      const auto out = test_le(InstanceOracle(inst), inst.element_with_rank(rank), r, delta, epsilon, gen);
      if (out.at_most != owed) ++errors;
      if (out.ledger.total() != expected_queries) ledger_ok = false;
    }
    const auto check = stats::at_most(errors, kTrials, epsilon);
    ok = ok && check.passed();
    detail += "rank " + std::to_string(rank) + ": error " + detail::fixed(check.observed(), 3) +
              " <= " + detail::fixed(check.threshold(), 3) + "; ";
  }
  detail += "queries per call " + std::string(ledger_ok ? "== " : "!= ") + std::to_string(expected_queries);
  return {5, "TestLE error rate", ok && ledger_ok, detail};
}

// 6. Per-trial positive frequency matches 1 - ((n - RK)/n)^N.
inline CriterionResult testle_trial_probability(const SuiteOptions& opt) {
  constexpr std::size_t n = 100;
  constexpr std::uint64_t sample_size = 10;
  constexpr int kTrials = 2000;
  const auto inst = make_instance(n, stream_seed(opt.seed, 0, 61));
  const InstanceOracle oracle(inst);
  Rng gen = make_rng(opt.seed, 0, 62);
  std::vector<ElementId> sample(sample_size);
  bool ok = true;
  std::string detail;
  for (const Rank rank : {Rank{1}, Rank{10}, Rank{50}, Rank{90}}) {
    const ElementId x = inst.element_with_rank(rank);
    int positives = 0;
    for (int t = 0; t < kTrials; ++t) {
      if (sample_trial(oracle, x, std::span<ElementId>(sample), gen)) ++positives;
    }
    const double p = positive_probability(n, sample_size, rank);
    const double freq = static_cast<double>(positives) / kTrials;
    const double tol = stats::binomial_margin(kTrials, p, 3.0);
    const bool pass = std::abs(freq - p) <= tol;
    ok = ok && pass;
    detail += "rank " + std::to_string(rank) + ": " + detail::fixed(freq, 4) + " vs " + detail::fixed(p, 4) +
              " (+/-" + detail::fixed(tol, 4) + "); ";
  }
  return {6, "TestLE per-trial probability", ok, detail};
}

// 7. ApxRank meets the delta-approximation with probability 1 - epsilon.
inline CriterionResult apx_rank_success(const SuiteOptions& opt) {
  constexpr std::size_t n = 1024;
  constexpr double delta = 0.3, epsilon = 0.1;
  constexpr std::uint64_t kRuns = 200;
  const std::uint32_t max_calls = ceil_log2(n);
  const std::uint64_t per_call = trial_count(delta, epsilon / max_calls);
  std::uint64_t violations = 0;
  bool calls_ok = true, ledger_ok = true;
  for (std::uint64_t run = 0; run < kRuns; ++run) {
    const auto inst = make_instance(n, stream_seed(opt.seed, run, 71));
    Rng pick = make_rng(opt.seed, run, 72);
    const auto x = static_cast<ElementId>(uniform_below(pick, n));
    Rng gen = make_rng(opt.seed, run, 73);
    const auto out = apx_rank(InstanceOracle(inst), x, delta, epsilon, gen);
    if (!is_rank_approximation(exact_rank(inst, x), out.estimate, n, delta)) ++violations;
    if (out.calls > max_calls) calls_ok = false;
    if (out.ledger.total() != out.calls * per_call) ledger_ok = false;
  }
  const auto check = stats::at_most(violations, kRuns, epsilon);
  return {7, "ApxRank success", check.passed() && calls_ok && ledger_ok,
          "violations " + detail::fixed(check.observed(), 3) + " <= " + detail::fixed(check.threshold(), 3) +
              "; calls <= " + std::to_string(max_calls) + (calls_ok ? " held" : " VIOLATED") +
              "; ledger == calls*" + std::to_string(per_call) + (ledger_ok ? " held" : " VIOLATED")};
}

// 8. GetCandidate lands in (k - delta k, k + delta k] often enough.
inline CriterionResult candidate_hit_rate(const SuiteOptions& opt) {
  constexpr int kDraws = 5000;
  std::string detail;

  // Sample-minimum branch.
  std::uint64_t hits_min = 0;
  bool branch_min = true;
  {
    constexpr std::size_t n = 1200, k = 100;
    constexpr double delta = 0.6;
    const auto inst = make_instance(n, stream_seed(opt.seed, 0, 81));
    const InstanceOracle oracle(inst);
    Rng gen = make_rng(opt.seed, 0, 82);
    for (int d = 0; d < kDraws; ++d) {
      const auto c = get_candidate(oracle, k, delta, gen);
      branch_min = branch_min && c.from_sample_min;
      const Rank rk = exact_rank(inst, c.element);
      if (rk > 40 && rk <= 160) ++hits_min;
    }
  }
  const auto min_check = stats::at_least(hits_min, kDraws, 0.09);
  detail += "min branch: " + detail::fixed(min_check.observed(), 4) + " >= " + detail::fixed(min_check.threshold(), 4);

  // Uniform branch.
  std::uint64_t hits_uniform = 0;
  bool branch_uniform = true;
  {
    constexpr std::size_t n = 100, k = 50;
    constexpr double delta = 0.1;
    const auto inst = make_instance(n, stream_seed(opt.seed, 1, 81));
    const InstanceOracle oracle(inst);
    Rng gen = make_rng(opt.seed, 1, 82);
    for (int d = 0; d < kDraws; ++d) {
      const auto c = get_candidate(oracle, k, delta, gen);
      branch_uniform = branch_uniform && !c.from_sample_min;
      const Rank rk = exact_rank(inst, c.element);
      if (rk > 45 && rk <= 55) ++hits_uniform;
    }
  }
  const double freq = static_cast<double>(hits_uniform) / kDraws;
  const double tol = stats::binomial_margin(kDraws, 0.1, 3.0);
  const bool uniform_ok = std::abs(freq - 0.1) <= tol;
  detail += "; uniform branch: " + detail::fixed(freq, 4) + " within 0.1 +/- " + detail::fixed(tol, 4);
  return {8, "GetCandidate hit rate", min_check.passed() && uniform_ok && branch_min && branch_uniform, detail};
}

// 9. ApxSelect returns with probability >= 1/2 and returned elements are
// delta-approximations with probability >= 1 - epsilon.
inline CriterionResult apx_select_guarantees(const SuiteOptions& opt) {
  harness::ExperimentConfig c;
  c.algorithm = harness::Algorithm::Select;
  c.n = 1000;
  c.target = 100;
  c.delta = 0.4;
  c.epsilon = 0.1;
  c.trials = 300;
  c.seed = opt.seed;
  c.jobs = opt.jobs;
  const auto result = harness::run_experiment(c);
  const std::uint32_t max_rounds = derive_select_params(100, 0.4, 0.1).max_rounds;
  std::uint64_t returned = 0, violations = 0;
  bool rounds_ok = true;
  for (const auto& row : result.rows) {
    if (!row.rounds || *row.rounds > max_rounds) rounds_ok = false;
    if (!row.result_id) continue;
    ++returned;
    if (!row.success) ++violations;
  }
  const auto return_check = stats::at_least(returned, c.trials, 0.5);
  // Margin pinned at 3 sigma over all 300 runs.
  const double violation_limit = 0.1 + stats::binomial_margin(c.trials, 0.1, 3.0);
  const double violation_rate = returned == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(returned);
  const bool violation_ok = violation_rate <= violation_limit;
  return {9, "ApxSelect guarantees", return_check.passed() && violation_ok && rounds_ok,
          "return rate " + detail::fixed(return_check.observed(), 3) + " >= " +
              detail::fixed(return_check.threshold(), 3) + "; violation rate " + detail::fixed(violation_rate, 3) +
              " <= " + detail::fixed(violation_limit, 3) + "; rounds <= " + std::to_string(max_rounds) +
              (rounds_ok ? " held" : " VIOLATED") + "; mean queries " + detail::fixed(result.summary.mean_queries, 0)};
}

// 10. Reversal is an involution with RK_rev = n - RK + 1; padding preserves
// real ranks. Exhaustive over n <= 64.
inline CriterionResult reversal_and_padding(const SuiteOptions& opt) {
  std::uint64_t checks = 0, failures = 0;
  auto expect = [&](bool cond) {
    ++checks;
    if (!cond) ++failures;
  };
  for (std::size_t n = 1; n <= 64; ++n) {
    const auto inst = make_instance(n, stream_seed(opt.seed, n, 101));
    const InstanceOracle base(inst);
    const auto rev = reversed_view(base);
    const auto rev2 = reversed_view(rev);
    for (ElementId x = 0; x < n; ++x) {
      expect(oracle_rank(rev, x) == n - inst.rank_of(x) + 1);
      expect(oracle_rank(rev2, x) == inst.rank_of(x));
      for (ElementId y = 0; y < n; ++y) {
        const ElementId v[] = {y};
        expect(rev2.left_test(x, v) == base.left_test(x, v));
        expect(rev2.right_test(x, v) == base.right_test(x, v));
      }
    }
    for (std::size_t divisor = 1; divisor <= 8; ++divisor) {
      const auto padded = padded_view(base, divisor);
      expect(padded.size() % divisor == 0 && padded.size() >= n && padded.size() - n < divisor);
      for (ElementId x = 0; x < padded.size(); ++x) {
        const Rank expected = x < n ? inst.rank_of(x) : static_cast<Rank>(x + 1);
        expect(oracle_rank(padded, x) == expected);
      }
    }
  }
  return {10, "Reversal and padding oracles", failures == 0,
          std::to_string(checks - failures) + "/" + std::to_string(checks) + " checks held"};
}

// 11. The reference protocol server answers exactly like the builtin oracle.
inline CriterionResult external_conformance(const SuiteOptions& opt) {
  constexpr std::size_t n = 128;
  constexpr int kQueries = 1000;
  if (opt.server_command.empty()) return {11, "External oracle conformance", false, "no server command configured"};
  const std::uint64_t instance_seed = stream_seed(opt.seed, 0, 111);
  auto command = opt.server_command;
  command.push_back("--seed");
  command.push_back(std::to_string(instance_seed));
  try {
    const ExternalOracle external(command, n);
    const auto inst = make_instance(n, instance_seed);
    const InstanceOracle builtin(inst);
    Rng gen = make_rng(opt.seed, 0, 112);
    int mismatches = 0;
    std::vector<ElementId> v;
    for (int q = 0; q < kQueries; ++q) {
      const auto u = static_cast<ElementId>(uniform_below(gen, n));
      v.resize(uniform_below(gen, 9));
      for (auto& e : v) e = static_cast<ElementId>(uniform_below(gen, n));
      const bool left = uniform_below(gen, 2) == 0;
      const bool a = left ? external.left_test(u, v) : external.right_test(u, v);
      const bool b = left ? builtin.left_test(u, v) : builtin.right_test(u, v);
      if (a != b) ++mismatches;
    }
    return {11, "External oracle conformance", mismatches == 0,
            std::to_string(kQueries - mismatches) + "/" + std::to_string(kQueries) + " answers matched"};
  } catch (const std::exception& e) {
    return {11, "External oracle conformance", false, std::string("error: ") + e.what()};
  }
}

// 12. Same configuration and seed give byte-identical CSV, whatever the
// worker count.
inline CriterionResult reproducibility(const SuiteOptions& opt) {
  using harness::Algorithm;
  std::vector<harness::ExperimentConfig> configs;
  auto add = [&](Algorithm a, std::size_t n, double target, std::optional<Rank> probe, double delta, double epsilon,
                 std::uint64_t trials) {
    harness::ExperimentConfig c;
    c.algorithm = a;
    c.n = n;
    c.target = target;
    c.probe_rank = probe;
    c.delta = delta;
    c.epsilon = epsilon;
    c.trials = trials;
    c.seed = opt.seed;
    configs.push_back(c);
  };
  add(Algorithm::MinFind, 1024, 0, std::nullopt, 0.5, 0.1, 200);
  add(Algorithm::MaxFind, 256, 0, std::nullopt, 0.5, 0.1, 200);
  add(Algorithm::TestLe, 1000, 100, Rank{170}, 0.5, 0.2, 100);
  add(Algorithm::Rank, 1024, 0, std::nullopt, 0.3, 0.1, 40);
  add(Algorithm::Select, 1000, 100, std::nullopt, 0.4, 0.1, 20);
  add(Algorithm::Select, 500, 400, std::nullopt, 0.5, 0.1, 20);

  int identical = 0;
  for (auto c : configs) {
    std::ostringstream first, second;
    c.jobs = 1;
    harness::write_csv(first, harness::run_experiment(c));
    c.jobs = 3;
    harness::write_csv(second, harness::run_experiment(c));
    if (first.str() == second.str()) ++identical;
  }
  return {12, "Reproducibility", identical == static_cast<int>(configs.size()),
          std::to_string(identical) + "/" + std::to_string(configs.size()) +
              " configurations reproduced byte-identical CSV"};
}

inline CriterionResult timed(const std::function<CriterionResult(const SuiteOptions&)>& fn, const SuiteOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r = fn(opt);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

using Criterion = std::function<CriterionResult(const SuiteOptions&)>;

inline std::vector<Criterion> all_criteria() {
  return {minfind_exactness, swap_query_count,  swap_uniformity,         minfind_scaling,
          testle_error_rate, testle_trial_probability, apx_rank_success, candidate_hit_rate,
          apx_select_guarantees, reversal_and_padding, external_conformance, reproducibility};
}

inline void print(std::ostream& out, const CriterionResult& r) {
  out << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ". " << r.name << " (" << detail::fixed(r.seconds, 2)
      << " s): " << r.detail << '\n';
}

// Runs every criterion (skipping external conformance when no server is
// configured), printing one line each. Returns true iff all passed.
inline bool run_suite(const SuiteOptions& opt, std::ostream& out) {
  bool all = true;
  for (const auto& criterion : all_criteria()) {
    const CriterionResult r = timed(criterion, opt);
    if (r.id == 11 && opt.server_command.empty()) {
      out << "[SKIP] 11. External oracle conformance: pass --oracle cmd:<server> to include it\n";
      continue;
    }
    print(out, r);
    all = all && r.passed;
  }
  return all;
}

}  // namespace gtsel::verify
