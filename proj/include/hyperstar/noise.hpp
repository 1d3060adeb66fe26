#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hyperstar/estimator.hpp"
#include "hyperstar/generators.hpp"
#include "hyperstar/hypertree.hpp"
#include "hyperstar/rng.hpp"

namespace hyperstar {

// The four noisy-data classes: an unobserved arm or an unobserved single
// step (hyperedge), on the weighted-longest arm or elsewhere.
enum class NoiseKind {
  missing_arm_nonlongest,
  missing_arm_longest,
  missing_step_nonlongest,
  missing_step_longest,
};

inline const char* to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::missing_arm_nonlongest: return "missing_arm_nonlongest";
    case NoiseKind::missing_arm_longest: return "missing_arm_longest";
    case NoiseKind::missing_step_nonlongest: return "missing_step_nonlongest";
    default: return "missing_step_longest";
  }
}

struct NoiseSpec {
  NoiseKind kind;
  std::optional<int> target_arm;   // 1-based; uniform over admissible arms when unset
  std::optional<int> target_step;  // 1-based; uniform over the arm when unset
};

namespace detail {

struct NoiseEdit {
  InfectionPattern pattern;
  int removed_arm = 0;   // 1-based original arm index, 0 if none
  int removed_step = 0;  // 1-based hyperedge index within the arm, 0 if none

  // Original arm identity of post-noise arm j (1-based).
  int original_arm(int j) const {
    if (removed_arm == 0) return j;
    return j < removed_arm ? j : j + 1;
  }
};

inline NoiseEdit apply_noise_edit(const InfectionPattern& pattern, const NoiseSpec& spec,
                                  Rng& rng) {
  validate(pattern);
  const bool arm_kind = spec.kind == NoiseKind::missing_arm_nonlongest ||
                        spec.kind == NoiseKind::missing_arm_longest;
  const bool longest_kind = spec.kind == NoiseKind::missing_arm_longest ||
                            spec.kind == NoiseKind::missing_step_longest;
  const int longest = longest_arm_pos(pattern.arms()) + 1;

  std::vector<int> admissible;
  for (int i = 1; i <= pattern.arm_count(); ++i) {
    if (longest_kind != (i == longest)) continue;
    if (!arm_kind && pattern.arms()[i - 1].length() < 2) continue;
    admissible.push_back(i);
  }
  if (arm_kind && pattern.arm_count() < 3)
    throw std::invalid_argument("arm removal needs at least 3 arms");
  if (admissible.empty())
    throw std::invalid_argument("no admissible arm for this noise kind");

  int arm;
  if (spec.target_arm) {
    arm = *spec.target_arm;
    if (std::find(admissible.begin(), admissible.end(), arm) == admissible.end())
      throw std::invalid_argument("target arm not admissible for this noise kind");
  } else {
    arm = admissible[uniform_u64(rng, admissible.size())];
  }

  NoiseEdit out;
  out.pattern = pattern;
  if (arm_kind) {
    out.pattern.structure.arms.erase(out.pattern.structure.arms.begin() + (arm - 1));
    out.removed_arm = arm;
  } else {
    auto& ov = out.pattern.structure.arms[arm - 1].overlaps;
    int step;
    if (spec.target_step) {
      step = *spec.target_step;
      if (step < 1 || step > static_cast<int>(ov.size()))
        throw std::invalid_argument("target step out of range");
    } else {
      step = 1 + static_cast<int>(uniform_u64(rng, ov.size()));
    }
    ov.erase(ov.begin() + (step - 1));
    out.removed_step = step;
  }
  return out;
}

}  // namespace detail

// Apply one noise transformation. Arm removal requires m >= 3 so the
// result is still an extended star; step removal requires the targeted
// arm to have k >= 2 and splices the chain (the removed hop's overlap is
// deleted, the remaining hops close ranks).
inline InfectionPattern apply_noise(const InfectionPattern& pattern, const NoiseSpec& spec,
                                    Rng& rng) {
  return detail::apply_noise_edit(pattern, spec, rng).pattern;
}

struct SensitivityConfig {
  Generator generator = Generator::unconstrained;
  OverlapMode mode = OverlapMode::single;
  double offset = 0.0;
  int fixed_m = 0;  // resample until the pattern has exactly this many arms (0 = any)
};

struct SensitivityRow {
  NoiseKind kind;
  int trials = 0;
  double mean_shift = 0.0;  // weighted position, post minus pre, over non-arm-change trials
  double std_shift = 0.0;
  double arm_change_rate = 0.0;
  std::uint64_t seed = 0;
};

// Per-kind estimate-shift statistics: generate a pattern, apply the noise
// kind with a uniform target, and compare hyper_estimate before/after.
// The shift is the signed change of the estimate's weighted position
// (each measured within its own pattern, hub = 0); trials where the
// estimate moves to a different arm identity are counted as arm-change
// events and excluded from the shift statistics. Patterns inadmissible
// for a kind are resampled; for the missing-arm kinds the pre-noise
// estimate must lie on an arm (the noise class is about losing the arm
// carrying the estimate, which the hub never is).
inline std::vector<SensitivityRow> sensitivity_report(const SensitivityConfig& config,
                                                      const std::vector<NoiseKind>& kinds,
                                                      int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  std::vector<SensitivityRow> rows;
  for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
    const NoiseKind kind = kinds[ki];
    const bool arm_kind =
        kind == NoiseKind::missing_arm_nonlongest || kind == NoiseKind::missing_arm_longest;
    SensitivityRow row;
    row.kind = kind;
    row.trials = trials;
    row.seed = seed;
    long arm_changes = 0;
    double sum = 0.0, sum_sq = 0.0;
    long n_shift = 0;
    for (int t = 0; t < trials; ++t) {
      Rng rng = make_rng(derive_seed(seed, ki, static_cast<std::uint64_t>(t)));
      InfectionPattern before;
      ClosedFormResult est_before;
      detail::NoiseEdit edit;
      for (;;) {  // resample until the noise kind is applicable
        before = generate(config.generator, rng, config.mode);
        if (config.fixed_m && before.arm_count() != config.fixed_m) continue;
        if (arm_kind && before.arm_count() < 3) continue;
        est_before = hyper_estimate(before, config.offset);
        if (arm_kind && est_before.estimate.is_hub()) continue;
        try {
          edit = detail::apply_noise_edit(before, NoiseSpec{kind, {}, {}}, rng);
        } catch (const std::invalid_argument&) {
          continue;  // e.g. no non-longest arm with k >= 2
        }
        break;
      }
      ClosedFormResult est_after = hyper_estimate(edit.pattern, config.offset);
      int after_arm = est_after.estimate.is_hub() ? 0 : edit.original_arm(est_after.estimate.arm);
      if (after_arm != est_before.estimate.arm) {
        ++arm_changes;
        continue;
      }
      double shift = weighted_position(edit.pattern, est_after.estimate) -
                     weighted_position(before, est_before.estimate);
      sum += shift;
      sum_sq += shift * shift;
      ++n_shift;
    }
    row.arm_change_rate = static_cast<double>(arm_changes) / trials;
    if (n_shift > 0) {
      row.mean_shift = sum / n_shift;
      double var = sum_sq / n_shift - row.mean_shift * row.mean_shift;
      row.std_shift = std::sqrt(std::max(0.0, var));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hyperstar
