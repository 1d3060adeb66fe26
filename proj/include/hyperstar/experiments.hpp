#pragma once

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "hyperstar/estimator.hpp"
#include "hyperstar/generators.hpp"
#include "hyperstar/json_io.hpp"
#include "hyperstar/spreading.hpp"

namespace hyperstar {

struct ExperimentConfig {
  Generator generator = Generator::unconstrained;
  OverlapMode mode = OverlapMode::single;
  double offset = 0.0;
  int trials = 1000;
  int mc_trials = 10000;  // reference estimator trials per candidate
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency; never affects results
};

// The four table metrics comparing the closed form against the reference.
struct MetricsRow {
  Generator generator;
  OverlapMode mode;
  double offset = 0.0;
  double arm_error_rate = 0.0;   // different arm chosen (hub counts as arm 0)
  double node_error_rate = 0.0;  // different index, among arm-matching trials
  double mean_error_size = 0.0;  // mean |index difference| over node errors
  double positivity_rate = 0.0;  // node errors with estimator index > reference index
  int trials = 0;
  std::uint64_t seed = 0;
};

struct TrialRecord {
  int trial = 0;
  InfectionPattern pattern;
  ClosedFormResult closed;
  SourceEstimate reference;
};

struct ExperimentResult {
  MetricsRow row;
  std::vector<TrialRecord> records;
};

namespace detail {

// Pattern + reference estimate for one trial. The reference does not
// depend on the offset, so table_suite evaluates these once per
// (generator, mode) and reuses them across offsets.
struct TrialBase {
  InfectionPattern pattern;
  SourceEstimate reference;
};

inline TrialBase evaluate_trial(Generator g, OverlapMode mode, int mc_trials,
                                std::uint64_t seed, int trial) {
  TrialBase tb;
  Rng gen_rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(trial), 0));
  tb.pattern = generate(g, gen_rng, mode);
  Rng mc_rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(trial), 1));
  tb.reference = mc_mle(tb.pattern, mc_trials, mc_rng);
  return tb;
}

inline std::vector<TrialBase> evaluate_trials(Generator g, OverlapMode mode, int trials,
                                              int mc_trials, std::uint64_t seed, int threads) {
  std::vector<TrialBase> out(trials);
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (threads == 1) {
    for (int t = 0; t < trials; ++t) out[t] = evaluate_trial(g, mode, mc_trials, seed, t);
    return out;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      int t = next.fetch_add(1);
      if (t >= trials) return;
      out[t] = evaluate_trial(g, mode, mc_trials, seed, t);
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

inline ExperimentResult aggregate(const std::vector<TrialBase>& base, Generator g,
                                  OverlapMode mode, double offset, std::uint64_t seed) {
  ExperimentResult res;
  long arm_errors = 0, arm_matches = 0, node_errors = 0, positive = 0;
  long long error_hops = 0;
  res.records.reserve(base.size());
  for (int t = 0; t < static_cast<int>(base.size()); ++t) {
    TrialRecord rec;
    rec.trial = t;
    rec.pattern = base[t].pattern;
    rec.reference = base[t].reference;
    rec.closed = hyper_estimate(rec.pattern, offset);
    const SourceEstimate est = rec.closed.estimate;
    const SourceEstimate ref = rec.reference;
    if (est.arm != ref.arm) {
      ++arm_errors;
    } else {
      ++arm_matches;
      if (est.index != ref.index) {
        ++node_errors;
        error_hops += std::abs(est.index - ref.index);
        if (est.index > ref.index) ++positive;
      }
    }
    res.records.push_back(std::move(rec));
  }
  MetricsRow& row = res.row;
  row.generator = g;
  row.mode = mode;
  row.offset = offset;
  row.trials = static_cast<int>(base.size());
  row.seed = seed;
  row.arm_error_rate = static_cast<double>(arm_errors) / row.trials;
  row.node_error_rate = arm_matches ? static_cast<double>(node_errors) / arm_matches : 0.0;
  row.mean_error_size = node_errors ? static_cast<double>(error_hops) / node_errors : 0.0;
  row.positivity_rate = node_errors ? static_cast<double>(positive) / node_errors : 0.0;
  return res;
}

}  // namespace detail

// One configuration: `trials` independent patterns, each compared between
// hyper_estimate and the Monte Carlo reference. Deterministic in
// (config minus threads): per-trial streams are derived from the seed.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (config.offset < 0) throw std::invalid_argument("offset must be >= 0");
  auto base = detail::evaluate_trials(config.generator, config.mode, config.trials,
                                      config.mc_trials, config.seed, config.threads);
  return detail::aggregate(base, config.generator, config.mode, config.offset, config.seed);
}

struct TableSuiteResult {
  std::vector<MetricsRow> rows;                    // offsets x generators x modes
  std::vector<std::vector<TrialRecord>> records;   // parallel to rows
};

inline constexpr Generator kAllGenerators[] = {Generator::unconstrained, Generator::constrained,
                                               Generator::typical};
inline constexpr OverlapMode kAllModes[] = {OverlapMode::single, OverlapMode::multiple};

// Per-(generator, mode) row seed; run_experiment with this seed
// reproduces the corresponding table_suite row exactly.
inline std::uint64_t row_seed(std::uint64_t suite_seed, Generator g, OverlapMode mode) {
  return derive_seed(suite_seed, 100 + static_cast<std::uint64_t>(g),
                     static_cast<std::uint64_t>(mode));
}

// All (generator, mode) cells for every offset. The reference estimate of
// a trial does not depend on the offset, so each (generator, mode)
// ensemble is evaluated once and re-scored per offset.
inline TableSuiteResult table_suite(const std::vector<double>& offsets, int trials,
                                    int mc_trials, std::uint64_t seed, int threads = 0) {
  TableSuiteResult out;
  std::vector<std::vector<detail::TrialBase>> bases;
  for (Generator g : kAllGenerators)
    for (OverlapMode mode : kAllModes)
      bases.push_back(detail::evaluate_trials(g, mode, trials, mc_trials,
                                              row_seed(seed, g, mode), threads));
  for (double offset : offsets) {
    int i = 0;
    for (Generator g : kAllGenerators)
      for (OverlapMode mode : kAllModes) {
        auto res =
            detail::aggregate(bases[i], g, mode, offset, row_seed(seed, g, mode));
        out.rows.push_back(res.row);
        out.records.push_back(std::move(res.records));
        ++i;
      }
  }
  return out;
}

// ---- tie audit --------------------------------------------------------

// Classification of the errors of a single-overlap run into the knife-edge
// tie cases the estimator cannot decide better than a coin toss.
struct TieAudit {
  long arm_errors = 0;
  long arm_errors_tied = 0;    // top two hop counts equal or differing by 1
  long node_errors = 0;
  long node_errors_tied = 0;   // two arms with odd total hop count (center tie)
};

inline TieAudit tie_audit(const std::vector<TrialRecord>& records) {
  TieAudit audit;
  for (const auto& rec : records) {
    std::vector<int> ks = hop_counts(rec.pattern);
    const SourceEstimate est = rec.closed.estimate;
    const SourceEstimate ref = rec.reference;
    if (est.arm != ref.arm) {
      ++audit.arm_errors;
      int top = 0, second = -1;
      for (int k : ks)
        if (k >= top) {
          second = top;
          top = k;
        } else if (k > second) {
          second = k;
        }
      if (top - second <= 1) ++audit.arm_errors_tied;
    } else if (est.index != ref.index) {
      ++audit.node_errors;
      int total = 0;
      for (int k : ks) total += k;
      if (ks.size() == 2 && total % 2 == 1) ++audit.node_errors_tied;
    }
  }
  return audit;
}

// ---- output formats ----------------------------------------------------

// Stable CSV: comment header with the run metadata, then one row per
// configuration. Thread count is deliberately absent; output bytes depend
// only on the configuration and seed.
inline std::string metrics_csv(const std::vector<MetricsRow>& rows, std::uint64_t suite_seed,
                               int mc_trials) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "# hyperstar tables v%s\n", kArtifactVersion);
  out += buf;
  std::snprintf(buf, sizeof(buf),
                "# rng=%s seed=%llu mc_trials=%d boundary_overlap=%d "
                "reference=mc_mle(time-domain,crn,splitmix64)\n",
                kRngId, static_cast<unsigned long long>(suite_seed), mc_trials, kBoundaryOverlap);
  out += buf;
  out += "generator,mode,offset,arm_error,node_error,error_size,positivity,trials,seed\n";
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%g,%.6f,%.6f,%.4f,%.6f,%d,%llu\n",
                  to_string(r.generator), to_string(r.mode), r.offset, r.arm_error_rate,
                  r.node_error_rate, r.mean_error_size, r.positivity_rate, r.trials,
                  static_cast<unsigned long long>(r.seed));
    out += buf;
  }
  return out;
}

inline nlohmann::json metrics_to_json(const MetricsRow& r) {
  return nlohmann::json{{"generator", to_string(r.generator)},
                        {"mode", to_string(r.mode)},
                        {"offset", r.offset},
                        {"arm_error", r.arm_error_rate},
                        {"node_error", r.node_error_rate},
                        {"error_size", r.mean_error_size},
                        {"positivity", r.positivity_rate},
                        {"trials", r.trials},
                        {"seed", r.seed}};
}

inline nlohmann::json record_to_json(const TrialRecord& rec) {
  nlohmann::json j = pattern_to_json(rec.pattern);
  j["trial"] = rec.trial;
  j["closed"] = {{"arm", rec.closed.estimate.arm},
                 {"index", rec.closed.estimate.index},
                 {"ell", rec.closed.ell},
                 {"longest_arm", rec.closed.longest_arm}};
  j["reference"] = {{"arm", rec.reference.arm}, {"index", rec.reference.index}};
  return j;
}

inline void write_records_jsonl(std::ostream& os, const std::vector<TrialRecord>& records) {
  for (const auto& rec : records) os << record_to_json(rec).dump() << '\n';
}

}  // namespace hyperstar
