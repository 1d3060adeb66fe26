#pragma once

#include <cmath>
#include <vector>

#include "hyperstar/hypertree.hpp"

namespace hyperstar {

// Closed-form source estimate: the continuous target position ell along
// the weighted-longest arm, plus its discretization.
struct ClosedFormResult {
  int longest_arm = 0;        // 1-based arm index carrying the estimate
  double ell = 0.0;           // target weighted position along that arm
  SourceEstimate estimate;    // snapped hyperedge (arm 0 = hub)
};

// Map the continuous position ell to a hyperedge of `arm` (1-based id
// `arm_id` in the result). Hub when ell is at most half the first hop
// weight; otherwise the index whose cumulative position is nearest to
// ell, ties toward the hub; positions past the arm end clamp to k.
inline SourceEstimate position_snap(const Arm& arm, int arm_id, double ell) {
  if (ell <= 0.5 / arm.overlaps[0]) return SourceEstimate{0, 0};
  int best = 1;
  double c = 1.0 / arm.overlaps[0];
  double best_d = std::abs(c - ell);
  for (int j = 2; j <= arm.length(); ++j) {
    c += 1.0 / arm.overlaps[j - 1];
    double d = std::abs(c - ell);
    if (d < best_d) {
      best = j;
      best_d = d;
    }
  }
  return SourceEstimate{arm_id, best};
}

namespace detail {

// ell = (w_big + offset - mean of the others) / 2 over arm "lengths" w.
// Shared by the graph and hypertree estimators so that the single-overlap
// reduction is an identity, not an approximation.
inline std::pair<int, double> closed_form_ell(const std::vector<double>& w, double offset) {
  if (w.size() < 2) throw std::invalid_argument("need at least 2 arms");
  int big = 0;
  for (int i = 1; i < static_cast<int>(w.size()); ++i)
    if (w[i] > w[big]) big = i;
  double others = 0.0;
  for (int i = 0; i < static_cast<int>(w.size()); ++i)
    if (i != big) others += w[i];
  double ell = (w[big] + offset - others / (static_cast<int>(w.size()) - 1)) / 2.0;
  return {big, ell};
}

}  // namespace detail

// Estimator for simple extended stars, from per-arm hop counts alone.
// Arms of count 0 are allowed (an arm emptied by noise) and contribute 0
// to the average.
inline ClosedFormResult graph_estimate(const std::vector<int>& hop_counts) {
  std::vector<double> w(hop_counts.begin(), hop_counts.end());
  for (double k : w)
    if (k < 0) throw std::invalid_argument("hop counts must be >= 0");
  auto [big, ell] = detail::closed_form_ell(w, 0.0);
  ClosedFormResult r;
  r.longest_arm = big + 1;
  r.ell = ell;
  if (hop_counts[big] == 0) {
    r.estimate = SourceEstimate{0, 0};
  } else {
    Arm unit;
    unit.overlaps.assign(hop_counts[big], 1);
    r.estimate = position_snap(unit, big + 1, ell);
  }
  return r;
}

// Weighted estimator for hypertree patterns. The longest arm is selected
// by weighted length (not hop count); the offset is added to that arm's
// weighted length only.
inline ClosedFormResult hyper_estimate(const InfectionPattern& pattern, double offset = 0.0) {
  validate(pattern);
  if (offset < 0) throw std::invalid_argument("offset must be >= 0");
  std::vector<double> w;
  w.reserve(pattern.arms().size());
  for (const auto& a : pattern.arms()) w.push_back(weighted_length(a));
  auto [big, ell] = detail::closed_form_ell(w, offset);
  ClosedFormResult r;
  r.longest_arm = big + 1;
  r.ell = ell;
  r.estimate = position_snap(pattern.arms()[big], big + 1, ell);
  return r;
}

}  // namespace hyperstar
