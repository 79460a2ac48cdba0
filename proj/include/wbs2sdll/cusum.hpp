#pragma once

/** @file
 * CUSUM mean-shift contrast over 1-based inclusive intervals and random
 * interval sampling.
 */

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wbs2sdll/rng.hpp"
#include "wbs2sdll/timeseries.hpp"

namespace wbs2sdll {

/// Inclusive 1-based interval [s, e] with s < e.
struct Interval {
  std::size_t s = 1;
  std::size_t e = 2;

  std::size_t length() const noexcept { return e - s + 1; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// A proposed change-point b in [s, e-1] with its |CUSUM| on interval.
struct Candidate {
  std::size_t b = 1;
  double magnitude = 0.0;
  Interval interval;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/**
 * Prefix-sum CUSUM evaluator. O(n) setup, O(1) per contrast.
 *
 * Sums are accumulated in extended precision around the global mean (the
 * contrast is shift invariant), and intervals on which the series is exactly
 * constant short-circuit to an exact zero, so noiseless step data produce
 * exact-zero magnitudes off the true jumps.
 */
class CusumKernel {
public:
  explicit CusumKernel(const TimeSeries& x) : n_(x.size()), prefix_(x.size() + 1, 0.0L),
                                             run_end_(x.size() + 1, 0) {
    long double mean = 0.0L;
    for (double v : x) mean += v;
    mean /= static_cast<long double>(n_);
    for (std::size_t t = 1; t <= n_; ++t) {
      prefix_[t] = prefix_[t - 1] + (static_cast<long double>(x.at1(t)) - mean);
    }
    // run_end_[t]: last index of the maximal constant run starting at t.
    run_end_[n_] = n_;
    for (std::size_t t = n_ - 1; t >= 1; --t) {
      run_end_[t] = x.at1(t) == x.at1(t + 1) ? run_end_[t + 1] : t;
    }
  }

  std::size_t size() const noexcept { return n_; }

  bool constant_on(std::size_t s, std::size_t e) const noexcept { return run_end_[s] >= e; }

  /// Signed contrast sqrt(n_l n_r / n_se) * (mean_left - mean_right).
  double value(std::size_t s, std::size_t b, std::size_t e) const {
    check(s, b, e);
    return unchecked_value(s, b, e);
  }

  /// Location maximizing |contrast| over b in [s, e-1]; ties go to the smallest b.
  Candidate argmax(Interval iv) const {
    check(iv.s, iv.s, iv.e);
    Candidate best{iv.s, 0.0, iv};
    if (constant_on(iv.s, iv.e)) {
      return best;
    }
    best.magnitude = -1.0;
    for (std::size_t b = iv.s; b < iv.e; ++b) {
      const double m = std::abs(unchecked_value(iv.s, b, iv.e));
      if (m > best.magnitude) {
        best.magnitude = m;
        best.b = b;
      }
    }
    return best;
  }

private:
  void check(std::size_t s, std::size_t b, std::size_t e) const {
    if (!(s >= 1 && s <= b && b < e && e <= n_)) {
      throw std::invalid_argument("cusum: require 1 <= s <= b < e <= n, got s=" +
                                  std::to_string(s) + " b=" + std::to_string(b) +
                                  " e=" + std::to_string(e) + " n=" + std::to_string(n_));
    }
  }

  double unchecked_value(std::size_t s, std::size_t b, std::size_t e) const {
    if (constant_on(s, e)) return 0.0;
    const long double nl = static_cast<long double>(b - s + 1);
    const long double nr = static_cast<long double>(e - b);
    const long double left = prefix_[b] - prefix_[s - 1];
    const long double right = prefix_[e] - prefix_[b];
    const long double w = std::sqrt(nl * nr / (nl + nr));
    return static_cast<double>(w * (left / nl - right / nr));
  }

  std::size_t n_;
  std::vector<long double> prefix_;
  std::vector<std::size_t> run_end_;
};

inline double cusum_value(const TimeSeries& x, std::size_t s, std::size_t b, std::size_t e) {
  return CusumKernel(x).value(s, b, e);
}

inline Candidate argmax_cusum(const TimeSeries& x, Interval iv) {
  return CusumKernel(x).argmax(iv);
}

/// Number of intervals [l, r] with s <= l < r <= e.
inline std::size_t interval_count(std::size_t s, std::size_t e) {
  const std::size_t len = e - s + 1;
  return len * (len - 1) / 2;
}

/**
 * M random intervals inside [s, e], each from an unordered pair of distinct
 * endpoints drawn uniformly, followed by the full interval [s, e].
 */
inline std::vector<Interval> draw_intervals(std::size_t s, std::size_t e, std::size_t M,
                                            RngStream& rng) {
  if (s >= e) {
    throw std::invalid_argument("draw_intervals: require s < e");
  }
  const std::uint64_t len = e - s + 1;
  std::vector<Interval> out;
  out.reserve(M + 1);
  for (std::size_t i = 0; i < M; ++i) {
    std::uint64_t l = rng.below(len);
    std::uint64_t r = rng.below(len - 1);
    if (r >= l) ++r;
    if (r < l) std::swap(l, r);
    out.push_back({s + static_cast<std::size_t>(l), s + static_cast<std::size_t>(r)});
  }
  out.push_back({s, e});
  return out;
}

/// Every interval inside [s, e] in lexicographic order.
inline std::vector<Interval> all_intervals(std::size_t s, std::size_t e) {
  std::vector<Interval> out;
  out.reserve(interval_count(s, e));
  for (std::size_t l = s; l < e; ++l) {
    for (std::size_t r = l + 1; r <= e; ++r) out.push_back({l, r});
  }
  return out;
}

} // namespace wbs2sdll
