#pragma once

#include "hyperstar/hypertree.hpp"
#include "hyperstar/rng.hpp"

namespace hyperstar {

// single: every overlap is 1 (mimics a simple graph); multiple: overlap
// sizes drawn uniformly from 1..6.
enum class OverlapMode { single, multiple };

inline const char* to_string(OverlapMode m) {
  return m == OverlapMode::single ? "single" : "multiple";
}

namespace detail {

inline Arm random_arm(Rng& rng, int length, OverlapMode mode) {
  Arm arm;
  arm.overlaps.resize(length, 1);
  if (mode == OverlapMode::multiple)
    for (int& v : arm.overlaps) v = uniform_int(rng, 1, 6);
  return arm;
}

// Typicality truncation: keep the arms attaining the minimum and maximum
// weighted length (lowest index on ties); cut each other arm right after
// the first hyperedge whose running weighted total strictly exceeds the
// minimum.
inline void truncate_to_typical(std::vector<Arm>& arms) {
  const int m = static_cast<int>(arms.size());
  int i_min = 0, i_max = 0;
  double w_min = weighted_length(arms[0]), w_max = w_min;
  for (int i = 1; i < m; ++i) {
    double w = weighted_length(arms[i]);
    if (w < w_min) {
      w_min = w;
      i_min = i;
    }
    if (w > w_max) {
      w_max = w;
      i_max = i;
    }
  }
  for (int i = 0; i < m; ++i) {
    if (i == i_min || i == i_max) continue;
    double running = 0.0;
    for (int j = 0; j < arms[i].length(); ++j) {
      running += 1.0 / arms[i].overlaps[j];
      if (running > w_min) {
        arms[i].overlaps.resize(j + 1);
        break;
      }
    }
  }
}

}  // namespace detail

// 2..6 arms, each of length 1..50.
inline InfectionPattern gen_unconstrained(Rng& rng, OverlapMode mode) {
  int m = uniform_int(rng, 2, 6);
  InfectionPattern p;
  p.structure.arms.reserve(m);
  for (int i = 0; i < m; ++i)
    p.structure.arms.push_back(detail::random_arm(rng, uniform_int(rng, 1, 50), mode));
  return p;
}

// 2..6 arms; one uniformly chosen arm of length 31..50, the rest 11..30.
// The designated arm has the strictly largest hop count, but under
// multiple overlaps not necessarily the largest weighted length.
inline InfectionPattern gen_constrained(Rng& rng, OverlapMode mode) {
  int m = uniform_int(rng, 2, 6);
  int long_pos = uniform_int(rng, 0, m - 1);
  InfectionPattern p;
  p.structure.arms.reserve(m);
  for (int i = 0; i < m; ++i) {
    int k = (i == long_pos) ? uniform_int(rng, 31, 50) : uniform_int(rng, 11, 30);
    p.structure.arms.push_back(detail::random_arm(rng, k, mode));
  }
  return p;
}

// Constrained-like base (one arm 31..50, rest 21..30), then truncation:
// the arms attaining the minimum and maximum weighted length are left
// unchanged (lowest index wins ties); every other arm is cut just past
// the minimum weighted length, keeping the first hyperedge whose running
// total strictly exceeds it.
inline InfectionPattern gen_typical(Rng& rng, OverlapMode mode) {
  int m = uniform_int(rng, 2, 6);
  int long_pos = uniform_int(rng, 0, m - 1);
  InfectionPattern p;
  p.structure.arms.reserve(m);
  for (int i = 0; i < m; ++i) {
    int k = (i == long_pos) ? uniform_int(rng, 31, 50) : uniform_int(rng, 21, 30);
    p.structure.arms.push_back(detail::random_arm(rng, k, mode));
  }
  detail::truncate_to_typical(p.structure.arms);
  return p;
}

enum class Generator { unconstrained, constrained, typical };

inline const char* to_string(Generator g) {
  switch (g) {
    case Generator::unconstrained: return "unconstrained";
    case Generator::constrained: return "constrained";
    default: return "typical";
  }
}

inline InfectionPattern generate(Generator g, Rng& rng, OverlapMode mode) {
  switch (g) {
    case Generator::unconstrained: return gen_unconstrained(rng, mode);
    case Generator::constrained: return gen_constrained(rng, mode);
    default: return gen_typical(rng, mode);
  }
}

}  // namespace hyperstar
