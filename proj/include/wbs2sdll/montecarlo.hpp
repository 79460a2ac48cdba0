#pragma once

/** @file
 * Seeded Monte Carlo harness: simulate, detect, record the selected count.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "wbs2sdll/dgp.hpp"
#include "wbs2sdll/sdll.hpp"

namespace wbs2sdll {

struct McSummary {
  std::vector<std::size_t> counts;
  double mean = 0.0;
  double sd = 0.0;
  std::size_t R = 0;
  std::uint64_t master_seed = 0;
  DgpSpec spec;
  Wbs2Config wbs2;
  SdllConfig sdll;
};

struct CountSummary {
  double mean = 0.0;
  double sd = 0.0;
};

/// Arithmetic mean and sample standard deviation (divisor R-1, zero when R = 1).
template <typename T>
CountSummary summarize(std::span<const T> values) {
  if (values.empty()) throw std::invalid_argument("summarize: empty input");
  const double R = static_cast<double>(values.size());
  double mean = 0.0;
  for (const T& v : values) mean += static_cast<double>(v);
  mean /= R;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (const T& v : values) {
    const double d = static_cast<double>(v) - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / (R - 1.0))};
}

template <typename T>
CountSummary summarize(const std::vector<T>& values) {
  return summarize(std::span<const T>(values));
}

/// Stream key offset separating WBS2 interval draws from data draws.
inline constexpr std::uint64_t kIntervalSeedOffset = 0x9e3779b97f4a7c15ULL;

/// Series and detector configuration used by replication r (1-based).
inline std::pair<TimeSeries, Wbs2Config> replication_inputs(const DgpSpec& spec,
                                                            const Wbs2Config& wcfg,
                                                            std::uint64_t master_seed,
                                                            std::size_t r) {
  DgpSpec s = spec;
  s.seed = master_seed;
  Wbs2Config w = wcfg;
  w.seed = master_seed + kIntervalSeedOffset;
  w.stream = r;
  return {simulate(s, r), w};
}

/// Calls fn(i) for i in [0, count) on a worker pool; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

/**
 * R replications of spec. Replication r draws its data from stream
 * (master_seed, r) and its WBS2 intervals from (master_seed + offset, r), so
 * the result depends only on the arguments, not on thread scheduling.
 */
inline McSummary run_mc(const DgpSpec& spec, const Wbs2Config& wcfg, const SdllConfig& scfg,
                        std::size_t R, std::uint64_t master_seed, unsigned threads = 0) {
  if (R < 1) throw std::invalid_argument("run_mc: R must be >= 1");
  spec.validate();
  wcfg.validate();
  scfg.validate();

  McSummary out;
  out.R = R;
  out.master_seed = master_seed;
  out.spec = spec;
  out.spec.seed = master_seed;
  out.wbs2 = wcfg;
  out.sdll = scfg;
  out.counts.assign(R, 0);

  parallel_for(
      R,
      [&](std::size_t i) {
        auto [x, w] = replication_inputs(spec, wcfg, master_seed, i + 1);
        out.counts[i] = detect(x, w, scfg).q_hat;
      },
      threads);

  const CountSummary s = summarize(out.counts);
  out.mean = s.mean;
  out.sd = s.sd;
  return out;
}

} // namespace wbs2sdll
