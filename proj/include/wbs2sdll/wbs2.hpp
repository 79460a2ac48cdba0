#pragma once

/** @file
 * Wild Binary Segmentation 2: recursive segmentation that re-draws random
 * sub-intervals inside every segment it splits, run to exhaustion so that the
 * full magnitude-ranked candidate path is available for model selection.
 */

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wbs2sdll/cusum.hpp"

namespace wbs2sdll {

struct Wbs2Config {
  /// Random intervals drawn per segment.
  std::size_t M = 100;
  /// Segments shorter than this are not split.
  std::size_t min_len = 2;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;

  void validate() const {
    if (M < 1) throw std::invalid_argument("Wbs2Config: M must be >= 1");
    if (min_len < 2) throw std::invalid_argument("Wbs2Config: min_len must be >= 2");
  }

  friend bool operator==(const Wbs2Config&, const Wbs2Config&) = default;
};

/// Best split of segment [s, e]; all intervals are enumerated when there are at most M.
inline Candidate best_split(const CusumKernel& kernel, std::size_t s, std::size_t e,
                            std::size_t M, RngStream& rng) {
  const std::vector<Interval> intervals =
      interval_count(s, e) <= M ? all_intervals(s, e) : draw_intervals(s, e, M, rng);
  Candidate best{s, -1.0, {s, e}};
  for (const Interval& iv : intervals) {
    const Candidate c = kernel.argmax(iv);
    if (c.magnitude > best.magnitude ||
        (c.magnitude == best.magnitude && c.b < best.b)) {
      best = c;
    }
  }
  return best;
}

/// Complete WBS2 solution path in discovery order (depth-first, left segment first).
inline std::vector<Candidate> wbs2_path(const TimeSeries& x, const Wbs2Config& cfg = {}) {
  cfg.validate();
  const std::size_t n = x.size();
  if (n < 2) {
    throw std::invalid_argument("wbs2: need at least two observations");
  }
  const CusumKernel kernel(x);
  RngStream rng(cfg.seed, cfg.stream);

  std::vector<Candidate> out;
  out.reserve(n - 1);
  // The traversal order fixes the rng consumption.
  std::vector<Interval> stack{{1, n}};
  while (!stack.empty()) {
    const Interval seg = stack.back();
    stack.pop_back();
    if (seg.length() < cfg.min_len) continue;
    const Candidate c = best_split(kernel, seg.s, seg.e, cfg.M, rng);
    out.push_back(c);
    if (c.b + 1 < seg.e) stack.push_back({c.b + 1, seg.e});
    if (seg.s < c.b) stack.push_back({seg.s, c.b});
  }
  return out;
}

/**
 * Complete WBS2 solution path, sorted by magnitude (decreasing, ties by
 * location). With min_len = 2 the result holds exactly n-1 candidates whose
 * locations are a permutation of 1..n-1.
 */
inline std::vector<Candidate> wbs2_candidates(const TimeSeries& x, const Wbs2Config& cfg = {}) {
  std::vector<Candidate> out = wbs2_path(x, cfg);
  std::stable_sort(out.begin(), out.end(), [](const Candidate& l, const Candidate& r) {
    if (l.magnitude != r.magnitude) return l.magnitude > r.magnitude;
    return l.b < r.b;
  });
  return out;
}

} // namespace wbs2sdll
