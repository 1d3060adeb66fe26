#pragma once

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyperstar {

// One arm of an extended-star hypertree, stored as its chain of overlap
// sizes: overlaps[0] is |E_0 n E_{i,1}|, overlaps[j] is
// |E_{i,j} n E_{i,j+1}| for j >= 1. Node identities are never needed;
// the dynamics and estimators depend only on these sizes.
struct Arm {
  std::vector<int> overlaps;

  int length() const { return static_cast<int>(overlaps.size()); }
};

// Hub hyperedge E_0 plus m arms of hyperedges E_{i,1..k_i}.
struct HypertreeStar {
  std::vector<Arm> arms;

  int arm_count() const { return static_cast<int>(arms.size()); }
  // Total hyperedge count including the hub.
  int hyperedge_count() const {
    int n = 1;
    for (const auto& a : arms) n += a.length();
    return n;
  }
};

// An observed snapshot: the hub plus a contiguous infected prefix of each
// arm. Structurally identical to a HypertreeStar; the distinct type keeps
// the structure-vs-observation roles apart in signatures.
struct InfectionPattern {
  HypertreeStar structure;

  int arm_count() const { return structure.arm_count(); }
  int hyperedge_count() const { return structure.hyperedge_count(); }
  const std::vector<Arm>& arms() const { return structure.arms; }
};

// (arm, index) of a hyperedge: arm 0 / index 0 is the hub E_0, otherwise
// arm i >= 1 and index l in [1, k_i] name E_{i,l}.
struct SourceEstimate {
  int arm = 0;
  int index = 0;

  bool is_hub() const { return arm == 0; }
  friend bool operator==(const SourceEstimate&, const SourceEstimate&) = default;
};

inline void validate(const Arm& arm) {
  if (arm.overlaps.empty())
    throw std::invalid_argument("arm must contain at least one hyperedge");
  for (int v : arm.overlaps)
    if (v < 1) throw std::invalid_argument("overlap sizes must be >= 1");
}

inline void validate(const HypertreeStar& star) {
  if (star.arm_count() < 2)
    throw std::invalid_argument("need at least 2 arms");
  for (const auto& a : star.arms) validate(a);
}

inline void validate(const InfectionPattern& pattern) { validate(pattern.structure); }

// w_i = sum_j 1/v_{i,j}: the arm's equivalent length in unit-edge hops.
inline double weighted_length(const Arm& arm) {
  double w = 0.0;
  for (int v : arm.overlaps) w += 1.0 / v;
  return w;
}

// Prefix sum sum_{t<=j} 1/v_{i,t} for 1-based j; the weighted position of
// hyperedge E_{i,j} measured from the hub.
inline double cumulative_position(const Arm& arm, int j) {
  if (j < 1 || j > arm.length())
    throw std::out_of_range("cumulative_position: index out of range");
  double c = 0.0;
  for (int t = 0; t < j; ++t) c += 1.0 / arm.overlaps[t];
  return c;
}

// Weighted position of an estimate within its pattern (hub = 0).
inline double weighted_position(const InfectionPattern& pattern, const SourceEstimate& e) {
  if (e.is_hub()) return 0.0;
  return cumulative_position(pattern.arms()[e.arm - 1], e.index);
}

inline std::vector<int> hop_counts(const InfectionPattern& pattern) {
  std::vector<int> ks;
  ks.reserve(pattern.arms().size());
  for (const auto& a : pattern.arms()) ks.push_back(a.length());
  return ks;
}

// Arm with maximal weighted length; ties resolved to the lowest index.
// Returns a 0-based position into arms.
inline int longest_arm_pos(const std::vector<Arm>& arms) {
  int best = 0;
  double bw = weighted_length(arms[0]);
  for (int i = 1; i < static_cast<int>(arms.size()); ++i) {
    double w = weighted_length(arms[i]);
    if (w > bw) {
      best = i;
      bw = w;
    }
  }
  return best;
}

}  // namespace hyperstar
