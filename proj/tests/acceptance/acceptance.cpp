// Acceptance suite: one check per shipped guarantee, each printing a
// single PASS/FAIL line. Run with no arguments for all criteria or with a
// list of criterion numbers. Exit code 0 iff everything selected passed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "hyperstar/hyperstar.hpp"

using namespace hyperstar;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kSeed = 20260809;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---- criterion 1: single-overlap reduction identity ---------------------

bool criterion1() {
  auto t0 = Clock::now();
  Rng rng = make_rng(derive_seed(kSeed, 1));
  const int n = 10000;
  int mismatches = 0;
  for (int t = 0; t < n; ++t) {
    InfectionPattern p = generate(static_cast<Generator>(t % 3), rng, OverlapMode::single);
    ClosedFormResult h = hyper_estimate(p, 0.0);
    ClosedFormResult g = graph_estimate(hop_counts(p));
    if (!(h.estimate == g.estimate) || h.ell != g.ell || h.longest_arm != g.longest_arm)
      ++mismatches;
  }
  std::printf("[%s] criterion 1: reduction identity, %d/%d patterns identical (%.1f s)\n",
              mismatches == 0 ? "PASS" : "FAIL", n - mismatches, n, seconds_since(t0));
  return mismatches == 0;
}

// ---- criterion 2: scale invariance of ell --------------------------------

bool criterion2() {
  auto t0 = Clock::now();
  Rng rng = make_rng(derive_seed(kSeed, 2));
  const int n = 1000;
  int violations = 0;
  double worst = 0.0;
  for (int t = 0; t < n; ++t) {
    int m = uniform_int(rng, 2, 6);
    std::vector<int> k(m);
    for (int& x : k) x = uniform_int(rng, 1, 50);
    double ell = graph_estimate(k).ell;
    for (int c : {2, 3, 5}) {
      std::vector<int> ck(m);
      for (int i = 0; i < m; ++i) ck[i] = c * k[i];
      double err = std::abs(graph_estimate(ck).ell - c * ell);
      worst = std::max(worst, err);
      if (err > 1e-12) ++violations;
    }
  }
  std::printf("[%s] criterion 2: scale invariance, %d violations, worst |error| %.2e (%.1f s)\n",
              violations == 0 ? "PASS" : "FAIL", violations, worst, seconds_since(t0));
  return violations == 0;
}

// ---- criterion 3: multinomial breakdown oracle ---------------------------

bool criterion3() {
  auto t0 = Clock::now();
  bool ok = true;

  // normalization over all breakdowns, K <= 8, choices <= 5
  double worst_norm = 0.0;
  for (int n = 2; n <= 5; ++n) {
    for (int K = 0; K <= 8; ++K) {
      double total = 0.0;
      std::vector<int> counts(n, 0);
      std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == n - 1) {
          counts[pos] = left;
          total += breakdown_probability(counts);
          return;
        }
        for (int take = 0; take <= left; ++take) {
          counts[pos] = take;
          rec(pos + 1, left - take);
        }
      };
      rec(0, K);
      worst_norm = std::max(worst_norm, std::abs(total - 1.0));
    }
  }
  if (worst_norm > 1e-9) ok = false;

  // chi-square of simulated breakdowns against the multinomial mass:
  // 3 unit arms (v = 2), K = 6 steps, 1e5 runs, significance 1e-3
  const int K = 6, runs = 100000;
  HypertreeStar star;
  for (int i = 0; i < 3; ++i) star.arms.push_back(Arm{std::vector<int>(K, 1)});
  Rng rng = make_rng(derive_seed(kSeed, 3));
  std::vector<long> observed((K + 1) * (K + 1), 0);
  for (int r = 0; r < runs; ++r) {
    SpreadResult s = simulate_spread(star, SourceEstimate{0, 0}, K + 1, rng);
    ++observed[s.arm_counts[0] * (K + 1) + s.arm_counts[1]];
  }
  double chi2 = 0.0;
  int cells = 0;
  for (int k1 = 0; k1 <= K; ++k1)
    for (int k2 = 0; k2 + k1 <= K; ++k2) {
      double expect = runs * breakdown_probability({k1, k2, K - k1 - k2});
      double diff = observed[k1 * (K + 1) + k2] - expect;
      chi2 += diff * diff / expect;
      ++cells;
    }
  // chi-square 0.999 quantile, 27 degrees of freedom
  const double kChi2Crit = 55.47602020574521;
  if (cells != 28 || chi2 >= kChi2Crit) ok = false;

  std::printf(
      "[%s] criterion 3: breakdown oracle, worst |sum-1| %.1e, chi2 %.1f < %.1f on %d cells "
      "(%.1f s)\n",
      ok ? "PASS" : "FAIL", worst_norm, chi2, kChi2Crit, cells, seconds_since(t0));
  return ok;
}

// ---- criterion 4: growth-rate ratio of a constant-overlap arm ------------

bool criterion4() {
  auto t0 = Clock::now();
  bool ok = true;
  double ratios[2] = {0, 0};
  int idx = 0;
  for (int v : {2, 3}) {
    const int steps = 120, runs = 100000;
    HypertreeStar star;
    star.arms.push_back(Arm{std::vector<int>(steps, 1)});
    star.arms.push_back(Arm{std::vector<int>(steps, v)});
    Rng rng = make_rng(derive_seed(kSeed, 4, v));
    double sum_unit = 0, sum_heavy = 0;
    for (int r = 0; r < runs; ++r) {
      SpreadResult s = simulate_spread(star, SourceEstimate{0, 0}, steps + 1, rng);
      sum_unit += s.arm_counts[0];
      sum_heavy += s.arm_counts[1];
    }
    double ratio = sum_heavy / sum_unit;
    ratios[idx++] = ratio;
    if (std::abs(ratio - v) > 0.05 * v) ok = false;
  }
  std::printf("[%s] criterion 4: growth-rate ratios %.4f (v=2), %.4f (v=3), tolerance 5%% (%.1f s)\n",
              ok ? "PASS" : "FAIL", ratios[0], ratios[1], seconds_since(t0));
  return ok;
}

// ---- criteria 5 and 6: small-pattern oracle ensemble ---------------------

InfectionPattern sample_small_pattern(Rng& rng) {
  for (;;) {
    int m = uniform_int(rng, 2, 3);
    std::vector<int> k(m);
    int total = 1;
    for (int& x : k) {
      x = uniform_int(rng, 1, 7);
      total += x;
    }
    if (total > 10) continue;
    InfectionPattern p;
    for (int i = 0; i < m; ++i) {
      Arm a;
      for (int j = 0; j < k[i]; ++j) a.overlaps.push_back(uniform_int(rng, 1, 3));
      p.structure.arms.push_back(std::move(a));
    }
    return p;
  }
}

SourceEstimate exact_argmax(const InfectionPattern& p, double* best_prob = nullptr) {
  SourceEstimate best{0, 0};
  double bp = -1.0;
  for (const SourceEstimate& c : candidate_sources(p)) {
    double prob = exact_pattern_likelihood(p, c);
    if (prob > bp) {
      bp = prob;
      best = c;
    }
  }
  if (best_prob) *best_prob = bp;
  return best;
}

// Exact likelihood ties are generic on small patterns (on two-arm
// patterns the hub and its neighbours often have isomorphic extended
// structures), so the Monte Carlo argmax can only match the enumerated
// argmax up to tie noise. A pattern counts as a genuine disagreement only
// when the Monte Carlo pick is more than the 2% likelihood-gap tolerance
// below the true argmax; those must stay within the 1% budget.
bool criterion5() {
  auto t0 = Clock::now();
  Rng rng = make_rng(derive_seed(kSeed, 5));
  const int n = 500, mc_trials = 10000;
  int agree = 0, exact_ties = 0, small_gap = 0, large_gap = 0;
  double worst_gap = 0.0;
  for (int t = 0; t < n; ++t) {
    InfectionPattern p = sample_small_pattern(rng);
    double best_prob = 0.0;
    SourceEstimate exact = exact_argmax(p, &best_prob);
    Rng mc_rng = make_rng(derive_seed(kSeed, 5, 1000 + t));
    SourceEstimate mc = mc_mle(p, mc_trials, mc_rng);
    if (mc == exact) {
      ++agree;
      continue;
    }
    double gap = (best_prob - exact_pattern_likelihood(p, mc)) / best_prob;
    worst_gap = std::max(worst_gap, gap);
    if (gap <= 1e-12)
      ++exact_ties;
    else if (gap < 0.02)
      ++small_gap;
    else
      ++large_gap;
  }
  bool ok = large_gap <= n / 100;
  std::printf(
      "[%s] criterion 5: oracle equivalence %d/%d exact, %d tie flips, %d near-tie flips "
      "(gap < 2%%), %d beyond tolerance (budget %d), worst gap %.2f%% (%.1f s)\n",
      ok ? "PASS" : "FAIL", agree, n, exact_ties, small_gap, large_gap, n / 100,
      100 * worst_gap, seconds_since(t0));
  return ok;
}

bool criterion6() {
  auto t0 = Clock::now();
  Rng rng = make_rng(derive_seed(kSeed, 5));  // the same 500-pattern ensemble
  const int n = 500;
  int within = 0;
  for (int t = 0; t < n; ++t) {
    InfectionPattern p = sample_small_pattern(rng);
    SourceEstimate exact = exact_argmax(p);
    SourceEstimate est = hyper_estimate(p, 0.0).estimate;
    if (est.arm == exact.arm && std::abs(est.index - exact.index) <= 1) ++within;
  }
  bool ok = within >= static_cast<int>(0.90 * n);
  std::printf("[%s] criterion 6: closed form within 1 hyperedge of the exact argmax in %d/%d "
              "(>= 450) (%.1f s)\n",
              ok ? "PASS" : "FAIL", within, n, seconds_since(t0));
  return ok;
}

// ---- criterion 7: table reproduction --------------------------------------

struct PaperCell {
  Generator g;
  OverlapMode mode;
  double offset;
  double node_error;  // percent
};

// Reported node-error cells (percent) per (generator, mode, offset).
const PaperCell kPaperNodeError[] = {
    {Generator::unconstrained, OverlapMode::single, 0.0, 9.40},
    {Generator::unconstrained, OverlapMode::multiple, 0.0, 33.20},
    {Generator::constrained, OverlapMode::single, 0.0, 4.80},
    {Generator::constrained, OverlapMode::multiple, 0.0, 20.70},
    {Generator::typical, OverlapMode::single, 0.0, 0.40},
    {Generator::typical, OverlapMode::multiple, 0.0, 25.90},
    {Generator::unconstrained, OverlapMode::single, 0.125, 10.00},
    {Generator::unconstrained, OverlapMode::multiple, 0.125, 37.60},
    {Generator::constrained, OverlapMode::single, 0.125, 5.40},
    {Generator::constrained, OverlapMode::multiple, 0.125, 17.30},
    {Generator::typical, OverlapMode::single, 0.125, 0.10},
    {Generator::typical, OverlapMode::multiple, 0.125, 11.40},
    {Generator::unconstrained, OverlapMode::single, 0.16, 9.30},
    {Generator::unconstrained, OverlapMode::multiple, 0.16, 42.90},
    {Generator::constrained, OverlapMode::single, 0.16, 5.70},
    {Generator::constrained, OverlapMode::multiple, 0.16, 18.30},
    {Generator::typical, OverlapMode::single, 0.16, 0.60},
    {Generator::typical, OverlapMode::multiple, 0.16, 12.50},
    {Generator::unconstrained, OverlapMode::single, 0.25, 5.20},
    {Generator::unconstrained, OverlapMode::multiple, 0.25, 47.00},
    {Generator::constrained, OverlapMode::single, 0.25, 2.60},
    {Generator::constrained, OverlapMode::multiple, 0.25, 22.50},
    {Generator::typical, OverlapMode::single, 0.25, 0.40},
    {Generator::typical, OverlapMode::multiple, 0.25, 13.30},
    {Generator::unconstrained, OverlapMode::single, 0.5, 11.10},
    {Generator::unconstrained, OverlapMode::multiple, 0.5, 67.50},
    {Generator::constrained, OverlapMode::single, 0.5, 11.70},
    {Generator::constrained, OverlapMode::multiple, 0.5, 44.60},
    {Generator::typical, OverlapMode::single, 0.5, 0.10},
    {Generator::typical, OverlapMode::multiple, 0.5, 38.20},
};

double paper_node_error(Generator g, OverlapMode mode, double offset) {
  for (const auto& cell : kPaperNodeError)
    if (cell.g == g && cell.mode == mode && cell.offset == offset) return cell.node_error;
  return -1.0;
}

bool criterion7() {
  auto t0 = Clock::now();
  const std::vector<double> offsets{0.0, 0.125, 0.16, 0.25, 0.5};
  const int trials = 1000, mc_trials = 10000;
  TableSuiteResult suite = table_suite(offsets, trials, mc_trials, kSeed);

  std::printf("%s", metrics_csv(suite.rows, kSeed, mc_trials).c_str());

  bool ok = true;
  std::vector<std::string> violations;
  std::filesystem::create_directories("acceptance_audit");

  for (std::size_t i = 0; i < suite.rows.size(); ++i) {
    const MetricsRow& row = suite.rows[i];
    const double node_pct = 100 * row.node_error_rate;
    std::vector<std::string> row_violations;

    // (a) typical rows have no arm errors at any offset
    if (row.generator == Generator::typical && row.arm_error_rate != 0.0)
      row_violations.push_back("(a) typical arm error > 0");
    // (b) typical single node error <= 1.5%
    if (row.generator == Generator::typical && row.mode == OverlapMode::single &&
        node_pct > 1.5)
      row_violations.push_back("(b) typical single node error > 1.5%");
    // (c) node error within +-6 points (single) / +-10 points (multiple)
    double paper = paper_node_error(row.generator, row.mode, row.offset);
    double tol = row.mode == OverlapMode::single ? 6.0 : 10.0;
    if (std::abs(node_pct - paper) > tol)
      row_violations.push_back("(c) node error " + std::to_string(node_pct) +
                               "% vs paper " + std::to_string(paper) + "%");
    // (d) offset 0.5 positivity <= 5% in multiple rows
    if (row.offset == 0.5 && row.mode == OverlapMode::multiple &&
        row.positivity_rate > 0.05)
      row_violations.push_back("(d) positivity " + std::to_string(100 * row.positivity_rate) +
                               "% > 5% at offset 0.5");
    // (e) error size in [1.00, 1.40] (defined only when node errors exist)
    if (row.node_error_rate > 0.0 &&
        (row.mean_error_size < 1.0 || row.mean_error_size > 1.40))
      row_violations.push_back("(e) error size " + std::to_string(row.mean_error_size));

    if (!row_violations.empty()) {
      ok = false;
      char name[160];
      std::snprintf(name, sizeof(name), "acceptance_audit/row_%s_%s_%g.jsonl",
                    to_string(row.generator), to_string(row.mode), row.offset);
      std::ofstream audit(name);
      write_records_jsonl(audit, suite.records[i]);
      for (auto& v : row_violations)
        violations.push_back(std::string(to_string(row.generator)) + "/" +
                             to_string(row.mode) + "/offset " + std::to_string(row.offset) +
                             ": " + v + " [audit: " + name + "]");
    }
  }

  // diagnostics: tie-audit coverage on single rows and the positivity of
  // the reverse comparison (reference index > estimator index)
  for (std::size_t i = 0; i < suite.rows.size(); ++i) {
    const MetricsRow& row = suite.rows[i];
    if (row.mode != OverlapMode::single) continue;
    TieAudit audit = tie_audit(suite.records[i]);
    if (audit.arm_errors > 0 || audit.node_errors > 0)
      std::printf("# audit %s/single/%g: arm errors %ld (tied %ld), node errors %ld "
                  "(center ties %ld)\n",
                  to_string(row.generator), row.offset, audit.arm_errors,
                  audit.arm_errors_tied, audit.node_errors, audit.node_errors_tied);
  }
  for (std::size_t i = 0; i < suite.rows.size(); ++i) {
    const MetricsRow& row = suite.rows[i];
    if (row.offset != 0.5 || row.mode != OverlapMode::multiple) continue;
    long ref_larger = 0, node_errors = 0;
    for (const auto& rec : suite.records[i]) {
      if (rec.closed.estimate.arm != rec.reference.arm) continue;
      if (rec.closed.estimate.index == rec.reference.index) continue;
      ++node_errors;
      if (rec.reference.index > rec.closed.estimate.index) ++ref_larger;
    }
    std::printf("# diagnostic %s/multiple/0.5: reference-index-larger share %.2f%% of %ld "
                "node errors\n",
                to_string(row.generator),
                node_errors ? 100.0 * ref_larger / node_errors : 0.0, node_errors);
  }

  for (const auto& v : violations) std::printf("#   violation: %s\n", v.c_str());
  std::printf("[%s] criterion 7: table reproduction, %zu violation(s) (%.0f s)\n",
              ok ? "PASS" : "FAIL", violations.size(), seconds_since(t0));
  return ok;
}

// ---- criterion 8: sensitivity directions ----------------------------------

bool criterion8() {
  auto t0 = Clock::now();
  SensitivityConfig config;
  config.generator = Generator::unconstrained;
  config.mode = OverlapMode::single;
  config.fixed_m = 5;
  const int trials = 5000;
  auto rows = sensitivity_report(
      config,
      {NoiseKind::missing_arm_longest, NoiseKind::missing_step_longest,
       NoiseKind::missing_step_nonlongest},
      trials, derive_seed(kSeed, 8));
  const SensitivityRow& arm_longest = rows[0];
  const SensitivityRow& step_longest = rows[1];
  const SensitivityRow& step_other = rows[2];

  bool ok = arm_longest.arm_change_rate == 1.0;
  ok = ok && step_longest.mean_shift < 0.0 && step_other.mean_shift > 0.0;
  ok = ok && std::abs(step_longest.mean_shift) >= 3.0 * std::abs(step_other.mean_shift);
  std::printf(
      "[%s] criterion 8: arm-change rate %.1f%%, inward shift %.4f vs outward %.4f "
      "(|ratio| %.2f >= 3) (%.1f s)\n",
      ok ? "PASS" : "FAIL", 100 * arm_longest.arm_change_rate, step_longest.mean_shift,
      step_other.mean_shift,
      std::abs(step_longest.mean_shift) / std::abs(step_other.mean_shift), seconds_since(t0));
  return ok;
}

// ---- criterion 9: worker-count determinism --------------------------------

bool criterion9() {
  auto t0 = Clock::now();
  const std::vector<double> offsets{0.0, 0.125, 0.16, 0.25, 0.5};
  std::string csv1 =
      metrics_csv(table_suite(offsets, 50, 500, kSeed, 1).rows, kSeed, 500);
  std::string csv4 =
      metrics_csv(table_suite(offsets, 50, 500, kSeed, 4).rows, kSeed, 500);
  bool ok = csv1 == csv4;
  std::printf("[%s] criterion 9: tables CSV byte-identical across worker counts (%.1f s)\n",
              ok ? "PASS" : "FAIL", seconds_since(t0));
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  bool (*runners[])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                         criterion6, criterion7, criterion8, criterion9};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (int c = 1; c <= 9; ++c) selected.push_back(c);

  bool all_ok = true;
  for (int c : selected) {
    if (c < 1 || c > 9) {
      std::fprintf(stderr, "unknown criterion %d\n", c);
      return 2;
    }
    all_ok = runners[c - 1]() && all_ok;
  }
  return all_ok ? 0 : 1;
}
