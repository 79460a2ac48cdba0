#pragma once

/** @file
 * Series and segmentation value types, least-squares segment fitting and the
 * difference-based MAD noise scale.
 *
 * Change-point convention used throughout the library: a change-point \c b is
 * a 1-based index in <tt>[1, n-1]</tt> naming the LAST observation of the
 * left segment, i.e. the mean shifts between observations \c b and \c b+1.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wbs2sdll {

/// Thrown when a model cannot be fitted (singular design, empty regime).
class DegenerateFitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Ordered, finite, non-empty real-valued observations.
class TimeSeries {
public:
  TimeSeries() = default;

  explicit TimeSeries(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
      throw std::invalid_argument("TimeSeries: series must be non-empty");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw std::invalid_argument("TimeSeries: non-finite value at index " +
                                    std::to_string(i + 1));
      }
    }
  }

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  /// 0-based element access.
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// 1-based element access matching the change-point convention.
  double at1(std::size_t t) const { return values_.at(t - 1); }

  std::span<const double> values() const noexcept { return values_; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  /// Returns a·x + c.
  TimeSeries affine(double a, double c) const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(),
                   [&](double v) { return a * v + c; });
    return TimeSeries(std::move(out));
  }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
  std::vector<double> values_;
};

/// Sorted change-points and the per-segment least-squares means they induce.
struct Segmentation {
  std::vector<std::size_t> changepoints;
  std::vector<double> means;
  std::size_t n = 0;

  std::size_t num_changepoints() const noexcept { return changepoints.size(); }

  friend bool operator==(const Segmentation&, const Segmentation&) = default;
};

namespace detail {

inline void validate_changepoints(std::span<const std::size_t> cps, std::size_t n) {
  std::size_t prev = 0;
  for (std::size_t b : cps) {
    if (b < 1 || b + 1 > n) {
      throw std::invalid_argument("change-point " + std::to_string(b) +
                                  " outside [1, " + std::to_string(n - 1) + "]");
    }
    if (b <= prev) {
      throw std::invalid_argument("change-points must be strictly increasing");
    }
    prev = b;
  }
}

/// Median of a copy; the average of the two middle values for even sizes.
inline double median(std::vector<double> v) {
  if (v.empty()) {
    throw std::invalid_argument("median of empty sequence");
  }
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) {
    return hi;
  }
  double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

} // namespace detail

/// Least-squares piecewise-constant fit for a fixed change-point set.
inline Segmentation segment_means(const TimeSeries& x, std::span<const std::size_t> changepoints) {
  const std::size_t n = x.size();
  detail::validate_changepoints(changepoints, n);

  Segmentation seg;
  seg.n = n;
  seg.changepoints.assign(changepoints.begin(), changepoints.end());
  seg.means.reserve(changepoints.size() + 1);

  std::size_t start = 0;
  auto close_segment = [&](std::size_t stop) {
    // Mean of the segment around its first value keeps cancellation small.
    const double pivot = x[start];
    double acc = 0.0;
    for (std::size_t t = start; t < stop; ++t) {
      acc += x[t] - pivot;
    }
    seg.means.push_back(pivot + acc / static_cast<double>(stop - start));
    start = stop;
  };
  for (std::size_t b : changepoints) {
    close_segment(b);
  }
  close_segment(n);
  return seg;
}

inline Segmentation segment_means(const TimeSeries& x,
                                  std::initializer_list<std::size_t> changepoints) {
  return segment_means(x, std::span<const std::size_t>(changepoints.begin(), changepoints.size()));
}

/// Step function of a segmentation, length n.
inline TimeSeries fitted_signal(const Segmentation& seg) {
  if (seg.means.size() != seg.changepoints.size() + 1 || seg.n == 0) {
    throw std::invalid_argument("fitted_signal: malformed segmentation");
  }
  detail::validate_changepoints(seg.changepoints, seg.n);
  std::vector<double> out;
  out.reserve(seg.n);
  std::size_t start = 0;
  for (std::size_t j = 0; j <= seg.changepoints.size(); ++j) {
    const std::size_t stop = j < seg.changepoints.size() ? seg.changepoints[j] : seg.n;
    out.insert(out.end(), stop - start, seg.means[j]);
    start = stop;
  }
  return TimeSeries(std::move(out));
}

/// Sum of squared residuals of x around the step function of seg over
/// 1-based indices [from, n].
inline double residual_ssr(const TimeSeries& x, const Segmentation& seg, std::size_t from = 1) {
  const TimeSeries fit = fitted_signal(seg);
  double ssr = 0.0;
  for (std::size_t t = from; t <= x.size(); ++t) {
    const double r = x.at1(t) - fit.at1(t);
    ssr += r * r;
  }
  return ssr;
}

/// Gaussian consistency constant of the MAD: Phi^{-1}(3/4).
inline constexpr double kMadNormalQuantile = 0.6744897501960817;

struct NoiseScale {
  double sigma = 0.0;
  bool degenerate = false;
};

/**
 * Robust noise scale from first differences:
 * median(|x_{t+1} - x_t|) / (sqrt(2) * Phi^{-1}(3/4)).
 *
 * A zero median yields \p floor with the degeneracy flag set.
 */
inline NoiseScale mad_sigma_ex(const TimeSeries& x, double floor = 1e-12) {
  if (x.size() < 2) {
    throw std::invalid_argument("mad_sigma: need at least two observations");
  }
  std::vector<double> diffs(x.size() - 1);
  for (std::size_t t = 0; t + 1 < x.size(); ++t) {
    diffs[t] = std::abs(x[t + 1] - x[t]);
  }
  const double med = detail::median(std::move(diffs));
  if (!(med > 0.0)) {
    return {floor, true};
  }
  return {med / (std::sqrt(2.0) * kMadNormalQuantile), false};
}

inline double mad_sigma(const TimeSeries& x, double floor = 1e-12) {
  return mad_sigma_ex(x, floor).sigma;
}

} // namespace wbs2sdll
