#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hyperstar/hypertree.hpp"
#include "hyperstar/rng.hpp"

namespace hyperstar {

// Hop transmission rate: overlap of v nodes gives an exponential waiting
// time with mean T/v, i.e. rate v (T = 1 throughout; pattern statistics
// depend only on the jump chain).
inline double transmission_rate(int v) {
  if (v < 1) throw std::invalid_argument("overlap size must be >= 1");
  return static_cast<double>(v);
}

// Probability of a step breakdown {k_1,...,k_n} among n equiprobable
// choices after K = sum k_i steps: K! / (k_1! ... k_n! n^K). Log-space.
inline double breakdown_probability(const std::vector<int>& counts) {
  if (counts.empty()) throw std::invalid_argument("counts must be nonempty");
  long long total = 0;
  double log_p = 0.0;
  for (int k : counts) {
    if (k < 0) throw std::invalid_argument("counts must be >= 0");
    total += k;
    log_p -= std::lgamma(k + 1.0);
  }
  log_p += std::lgamma(total + 1.0);
  log_p -= total * std::log(static_cast<double>(counts.size()));
  return std::exp(log_p);
}

// How the world past the observed arm tips is treated. `extended`: each
// arm continues conceptually with further hyperedges; the first hop past
// a tip competes with rate kBoundaryOverlap and firing it means the run
// can no longer produce the observed pattern. `closed`: the structure
// ends at the tips and spreading is confined to it.
enum class Boundary { extended, closed };

// Overlap size assumed for the unobserved hop past each arm tip.
inline constexpr int kBoundaryOverlap = 1;

namespace detail {

// The spreading graph re-rooted at a source: a set of chains ("branches")
// of hop rates. For a hub source there is one branch per arm. For source
// E_{a,l} there is an outward branch, an inward branch (whose completion
// infects the hub), and one gated branch per remaining arm; the gated
// branches only open once the inward branch completes.
struct BranchSet {
  std::vector<const int*> rates;  // hop rate sequences
  std::vector<int> len;
  std::vector<std::uint8_t> has_ext;  // arm tip at the branch end
  std::vector<int> arm_id;            // 1-based arm the branch advances (0 = none)
  int gate = -1;                      // inward branch index, or -1
  int total = 0;                      // hyperedges reachable = N - 1
  std::vector<int> inward_storage;    // backing for the reversed inward chain

  int branch_count() const { return static_cast<int>(rates.size()); }
};

inline BranchSet make_branches(const HypertreeStar& star, const SourceEstimate& source) {
  const int m = star.arm_count();
  if (source.arm < 0 || source.arm > m)
    throw std::invalid_argument("source arm out of range");
  BranchSet bs;
  if (source.is_hub()) {
    if (source.index != 0) throw std::invalid_argument("hub source must have index 0");
    for (int i = 0; i < m; ++i) {
      const auto& ov = star.arms[i].overlaps;
      bs.rates.push_back(ov.data());
      bs.len.push_back(static_cast<int>(ov.size()));
      bs.has_ext.push_back(1);
      bs.arm_id.push_back(i + 1);
    }
  } else {
    const auto& ov = star.arms[source.arm - 1].overlaps;
    const int k = static_cast<int>(ov.size());
    if (source.index < 1 || source.index > k)
      throw std::invalid_argument("source index out of range");
    const int l = source.index;
    // outward: v_{a,l+1}..v_{a,k}
    bs.rates.push_back(ov.data() + l);
    bs.len.push_back(k - l);
    bs.has_ext.push_back(1);
    bs.arm_id.push_back(source.arm);
    // inward: v_{a,l}, v_{a,l-1}, ..., v_{a,1}; the last hop infects E_0
    bs.inward_storage.assign(ov.rend() - l, ov.rend());
    bs.rates.push_back(bs.inward_storage.data());
    bs.len.push_back(l);
    bs.has_ext.push_back(0);
    bs.arm_id.push_back(source.arm);
    bs.gate = 1;
    for (int i = 0; i < m; ++i) {
      if (i == source.arm - 1) continue;
      const auto& o2 = star.arms[i].overlaps;
      bs.rates.push_back(o2.data());
      bs.len.push_back(static_cast<int>(o2.size()));
      bs.has_ext.push_back(1);
      bs.arm_id.push_back(i + 1);
    }
  }
  for (int L : bs.len) bs.total += L;
  return bs;
}

// Mutable state of one run over a BranchSet. In-pattern frontier rates
// and extension (past-tip) rates are tracked separately so runs can
// either race them together or condition on staying inside the pattern.
struct RunState {
  std::vector<int> pos;
  std::vector<long long> next_rate;  // 0 when inactive or exhausted
  long long in_sum = 0;              // active in-pattern rates
  long long ext_sum = 0;             // active extension rates

  void reset(const BranchSet& bs, Boundary boundary) {
    const int nb = bs.branch_count();
    pos.assign(nb, 0);
    next_rate.assign(nb, 0);
    in_sum = 0;
    ext_sum = 0;
    for (int b = 0; b < nb; ++b) {
      if (bs.gate >= 0 && b > bs.gate) continue;  // gated, not yet open
      activate(bs, b, boundary);
    }
  }

  void activate(const BranchSet& bs, int b, Boundary boundary) {
    if (bs.len[b] > 0) {
      next_rate[b] = bs.rates[b][0];
      in_sum += next_rate[b];
    } else if (bs.has_ext[b] && boundary == Boundary::extended) {
      ext_sum += kBoundaryOverlap;
    }
  }

  // Advance branch b by one hyperedge; opens the gated branches when the
  // inward branch completes.
  void advance(const BranchSet& bs, int b, Boundary boundary) {
    in_sum -= next_rate[b];
    ++pos[b];
    if (pos[b] < bs.len[b]) {
      next_rate[b] = bs.rates[b][pos[b]];
      in_sum += next_rate[b];
    } else {
      next_rate[b] = 0;
      if (bs.has_ext[b] && boundary == Boundary::extended) ext_sum += kBoundaryOverlap;
      if (b == bs.gate)
        for (int g = bs.gate + 1; g < bs.branch_count(); ++g) activate(bs, g, boundary);
    }
  }
};

// One jump-chain step racing in-pattern and extension hops together:
// returns the branch advanced, or -1 when an extension hop fired
// (extended boundary only).
template <class Engine>
inline int step(const BranchSet& bs, RunState& st, Boundary boundary, Engine& rng) {
  long long t = static_cast<long long>(
      uniform_u64(rng, static_cast<std::uint64_t>(st.in_sum + st.ext_sum)));
  for (int b = 0; b < bs.branch_count(); ++b) {
    if (t < st.next_rate[b]) {
      st.advance(bs, b, boundary);
      return b;
    }
    t -= st.next_rate[b];
  }
  return -1;  // landed on extension mass
}

// Whether one extended-boundary run reproduces the full pattern: all
// total hyperedges infected with no extension hop firing first.
template <class Engine>
inline bool run_matches(const BranchSet& bs, RunState& st, Engine& rng) {
  st.reset(bs, Boundary::extended);
  for (int s = 0; s < bs.total; ++s)
    if (step(bs, st, Boundary::extended, rng) < 0) return false;
  return true;
}

// Unbiased estimate of the same match probability from one conditioned
// run: the chain picks only in-pattern hops (rate-proportionally) and
// the returned weight is the product of per-step survival factors
// in_sum / (in_sum + ext_sum). Expectation equals
// P(no extension hop fires during the N-1 steps) exactly; unlike the
// 0/1 match indicator it stays informative when that probability is
// vanishingly small (large patterns).
template <class Engine>
inline double run_weight(const BranchSet& bs, RunState& st, Engine& rng) {
  st.reset(bs, Boundary::extended);
  double weight = 1.0;
  for (int s = 0; s < bs.total; ++s) {
    if (st.ext_sum > 0)
      weight *= static_cast<double>(st.in_sum) / static_cast<double>(st.in_sum + st.ext_sum);
    long long t =
        static_cast<long long>(uniform_u64(rng, static_cast<std::uint64_t>(st.in_sum)));
    for (int b = 0; b < bs.branch_count(); ++b) {
      if (t < st.next_rate[b]) {
        st.advance(bs, b, Boundary::extended);
        break;
      }
      t -= st.next_rate[b];
    }
  }
  return weight;
}

}  // namespace detail

// Final state of a spreading run, reported per original arm.
struct SpreadResult {
  std::vector<int> arm_counts;  // infected hyperedges per arm (source's own included)
  bool hub_infected = false;
  double elapsed = 0.0;  // total waiting time in units of T
  // For a non-hub source: how far the infection reached on each side of
  // it along its own arm (both 0 for a hub source).
  int inward_count = 0;
  int outward_count = 0;
};

// Race of competing exponentials on the structure, starting from `source`,
// until `n_infected` hyperedges (including the source) are infected.
// Spreading is confined to the structure.
inline SpreadResult simulate_spread(const HypertreeStar& structure, const SourceEstimate& source,
                                    int n_infected, Rng& rng) {
  validate(structure);
  if (n_infected < 1) throw std::invalid_argument("n_infected must be >= 1");
  if (n_infected > structure.hyperedge_count())
    throw std::invalid_argument("n_infected exceeds structure size");

  detail::BranchSet bs = detail::make_branches(structure, source);
  detail::RunState st;
  st.reset(bs, Boundary::closed);
  double elapsed = 0.0;
  for (int s = 0; s < n_infected - 1; ++s) {
    elapsed += -std::log1p(-uniform_real01(rng)) / static_cast<double>(st.in_sum);
    detail::step(bs, st, Boundary::closed, rng);
  }

  SpreadResult out;
  out.arm_counts.assign(structure.arm_count(), 0);
  out.elapsed = elapsed;
  if (source.is_hub()) {
    out.hub_infected = true;
    for (int b = 0; b < bs.branch_count(); ++b) out.arm_counts[bs.arm_id[b] - 1] = st.pos[b];
  } else {
    const int l = source.index;
    out.hub_infected = st.pos[1] == l;
    out.outward_count = st.pos[0];
    out.inward_count = std::min(st.pos[1], l - 1);
    out.arm_counts[source.arm - 1] = 1 + out.outward_count + out.inward_count;
    for (int b = 2; b < bs.branch_count(); ++b) out.arm_counts[bs.arm_id[b] - 1] = st.pos[b];
  }
  return out;
}

namespace detail {

// Forward DP over infected-count states of a BranchSet. Returns, for each
// reachable state at layer `n_steps`, its probability. States are packed
// in mixed radix (len_b + 1 per branch).
struct ExactDp {
  const BranchSet& bs;
  Boundary boundary;
  std::vector<int> stride;
  int n_states = 1;

  ExactDp(const BranchSet& b, Boundary bd) : bs(b), boundary(bd) {
    stride.resize(bs.branch_count());
    for (int i = 0; i < bs.branch_count(); ++i) {
      stride[i] = n_states;
      n_states *= bs.len[i] + 1;
    }
  }

  // Probability of reaching the all-infected state.
  double full_state_probability() const { return run_layers(bs.total).back(); }

  // State probabilities after `steps` infections.
  std::vector<double> run_layers(int steps) const {
    std::vector<double> cur(n_states, 0.0), nxt;
    cur[0] = 1.0;
    std::vector<int> digits(bs.branch_count());
    for (int layer = 0; layer < steps; ++layer) {
      nxt.assign(n_states, 0.0);
      for (int s = 0; s < n_states; ++s) {
        double p = cur[s];
        if (p == 0.0) continue;
        unpack(s, digits);
        long long rate_sum = 0;
        bool gate_open = bs.gate < 0 || digits[bs.gate] == bs.len[bs.gate];
        for (int b = 0; b < bs.branch_count(); ++b) {
          if (bs.gate >= 0 && b > bs.gate && !gate_open) continue;
          if (digits[b] < bs.len[b])
            rate_sum += bs.rates[b][digits[b]];
          else if (bs.has_ext[b] && boundary == Boundary::extended)
            rate_sum += kBoundaryOverlap;
        }
        if (rate_sum == 0) continue;
        for (int b = 0; b < bs.branch_count(); ++b) {
          if (bs.gate >= 0 && b > bs.gate && !gate_open) continue;
          if (digits[b] >= bs.len[b]) continue;
          nxt[s + stride[b]] += p * bs.rates[b][digits[b]] / static_cast<double>(rate_sum);
        }
      }
      cur.swap(nxt);
    }
    return cur;
  }

  void unpack(int s, std::vector<int>& digits) const {
    for (int b = 0; b < bs.branch_count(); ++b) {
      digits[b] = s % (bs.len[b] + 1);
      s /= bs.len[b] + 1;
    }
  }
};

}  // namespace detail

inline constexpr int kExactEnumerationLimit = 14;

// Exact likelihood P(pattern | source = candidate): the sum over all
// infection orderings consistent with connectivity from the candidate of
// the product over steps of rate(chosen hop) / sum of frontier rates.
// Under Boundary::extended the frontier includes the hops past the
// observed arm tips, so the value is the probability that the first N-1
// infections produce exactly the observed pattern. Under Boundary::closed
// the pattern is the whole structure and the value is 1 for any candidate
// that can reach all of it.
inline double exact_pattern_likelihood(const InfectionPattern& pattern,
                                       const SourceEstimate& candidate,
                                       Boundary boundary = Boundary::extended) {
  validate(pattern);
  if (pattern.hyperedge_count() > kExactEnumerationLimit)
    throw std::length_error("pattern too large for exact enumeration (N > 14)");
  detail::BranchSet bs = detail::make_branches(pattern.structure, candidate);
  return detail::ExactDp(bs, boundary).full_state_probability();
}

// One entry of the exact snapshot distribution.
struct SnapshotProbability {
  std::vector<int> arm_counts;
  bool hub_infected = false;
  int inward_count = 0;   // split along the source arm (non-hub sources)
  int outward_count = 0;
  double probability = 0.0;
};

// Exact distribution of the infected snapshot after n_infected hyperedges
// (including the source), with spreading confined to the structure. The
// probabilities of all reachable snapshots of that size sum to 1.
inline std::vector<SnapshotProbability> exact_snapshot_distribution(
    const HypertreeStar& structure, const SourceEstimate& source, int n_infected) {
  validate(structure);
  if (structure.hyperedge_count() > kExactEnumerationLimit)
    throw std::length_error("structure too large for exact enumeration (N > 14)");
  if (n_infected < 1 || n_infected > structure.hyperedge_count())
    throw std::invalid_argument("n_infected out of range");
  detail::BranchSet bs = detail::make_branches(structure, source);
  detail::ExactDp dp(bs, Boundary::closed);
  std::vector<double> layer = dp.run_layers(n_infected - 1);
  std::vector<SnapshotProbability> out;
  std::vector<int> digits(bs.branch_count());
  for (int s = 0; s < dp.n_states; ++s) {
    if (layer[s] == 0.0) continue;
    dp.unpack(s, digits);
    SnapshotProbability sp;
    sp.probability = layer[s];
    sp.arm_counts.assign(structure.arm_count(), 0);
    if (source.is_hub()) {
      sp.hub_infected = true;
      for (int b = 0; b < bs.branch_count(); ++b) sp.arm_counts[bs.arm_id[b] - 1] = digits[b];
    } else {
      const int l = source.index;
      sp.hub_infected = digits[1] == l;
      sp.outward_count = digits[0];
      sp.inward_count = std::min(digits[1], l - 1);
      sp.arm_counts[source.arm - 1] = 1 + sp.outward_count + sp.inward_count;
      for (int b = 2; b < bs.branch_count(); ++b) sp.arm_counts[bs.arm_id[b] - 1] = digits[b];
    }
    out.push_back(std::move(sp));
  }
  return out;
}

// Candidate sources of a pattern in canonical order: hub first, then each
// arm's hyperedges from the hub outward. mc_mle breaks ties by this order.
inline std::vector<SourceEstimate> candidate_sources(const InfectionPattern& pattern) {
  std::vector<SourceEstimate> cs;
  cs.reserve(pattern.hyperedge_count());
  cs.push_back(SourceEstimate{0, 0});
  for (int i = 1; i <= pattern.arm_count(); ++i)
    for (int l = 1; l <= pattern.arms()[i - 1].length(); ++l)
      cs.push_back(SourceEstimate{i, l});
  return cs;
}

struct McMleResult {
  SourceEstimate estimate;
  std::vector<SourceEstimate> candidates;
  std::vector<double> scores;  // estimated match probability per candidate
};

// Monte Carlo maximum likelihood over candidate sources, scored by a
// time-domain simulation. One run draws an exponential waiting time for
// every hop of the pattern (rate = the hop's overlap size); a candidate's
// branch completion times are prefix sums of those clocks, and the
// snapshot matches exactly when no boundary hop past an arm tip fires
// before the last in-pattern infection. Boundary hops are independent
// Exp(kBoundaryOverlap) clocks starting at their tip's completion, so
// conditionally on the in-pattern clocks the match probability is
// exp(-kBoundaryOverlap * total tip exposure), an unbiased estimate of
// the exact match probability. (The naive estimator, the fraction of
// free-running races that happen to reproduce the pattern, degenerates to
// all-zero counts once patterns reach a few dozen hyperedges.)
//
// The per-hop clocks of a run are shared by all candidates (one stream
// per run ordinal, derived from a single master draw): common random
// numbers cancel most of the noise in score differences, and results do
// not depend on candidate evaluation order.
inline McMleResult mc_mle_detailed(const InfectionPattern& pattern, int trials_per_candidate,
                                   Rng& rng) {
  validate(pattern);
  if (trials_per_candidate < 1)
    throw std::invalid_argument("trials_per_candidate must be >= 1");
  const auto& arms = pattern.arms();
  const int m = pattern.arm_count();
  McMleResult out;
  out.candidates = candidate_sources(pattern);
  out.scores.assign(out.candidates.size(), 0.0);
  const std::uint64_t master = rng();

  // prefix[i][j] = time from the hub to E_{i,j} along arm i, prefix[i][0] = 0
  std::vector<std::vector<double>> prefix(m);
  for (int i = 0; i < m; ++i) prefix[i].assign(arms[i].length() + 1, 0.0);
  std::vector<double> arm_total(m);

  for (int t = 0; t < trials_per_candidate; ++t) {
    SplitMix64 stream(derive_seed(master, static_cast<std::uint64_t>(t)));
    double total_sum = 0.0, total_max = -1.0, total_second = -1.0;
    int argmax_arm = 0;
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      for (int j = 0; j < arms[i].length(); ++j) {
        acc += -std::log1p(-uniform_real01(stream)) / arms[i].overlaps[j];
        prefix[i][j + 1] = acc;
      }
      arm_total[i] = acc;
      total_sum += acc;
      if (acc > total_max) {
        total_second = total_max;
        total_max = acc;
        argmax_arm = i;
      } else if (acc > total_second) {
        total_second = acc;
      }
    }

    // hub candidate: every arm starts at time 0
    {
      double t_last = total_max;
      double exposure = m * t_last - total_sum;
      out.scores[0] += std::exp(-kBoundaryOverlap * exposure);
    }
    // candidate E_{a,l}: the hub is reached at prefix[a][l]; other arms
    // start then; arm a's own tip completes at arm_total[a] - prefix[a][l]
    std::size_t c = 1;
    for (int a = 0; a < m; ++a) {
      double others_max = (a == argmax_arm) ? total_second : total_max;
      if (others_max < 0.0) others_max = 0.0;  // cannot happen with m >= 2
      for (int l = 1; l <= arms[a].length(); ++l, ++c) {
        double t_hub = prefix[a][l];
        double c_out = arm_total[a] - t_hub;
        double t_last = std::max(c_out, t_hub + others_max);
        // tips: arm a's own at c_out, each other arm i at t_hub + total_i
        double exposure =
            m * t_last - c_out - (m - 1) * t_hub - (total_sum - arm_total[a]);
        out.scores[c] += std::exp(-kBoundaryOverlap * exposure);
      }
    }
  }
  for (double& s : out.scores) s /= trials_per_candidate;
  std::size_t best = 0;
  for (std::size_t c = 1; c < out.scores.size(); ++c)
    if (out.scores[c] > out.scores[best]) best = c;
  out.estimate = out.candidates[best];
  return out;
}

inline SourceEstimate mc_mle(const InfectionPattern& pattern, int trials_per_candidate,
                             Rng& rng) {
  return mc_mle_detailed(pattern, trials_per_candidate, rng).estimate;
}

}  // namespace hyperstar
