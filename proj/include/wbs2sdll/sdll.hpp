#pragma once

/** @file
 * Steepest-Drop-to-Low-Levels model selection and the end-to-end detector.
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "wbs2sdll/timeseries.hpp"
#include "wbs2sdll/wbs2.hpp"

namespace wbs2sdll {

struct SdllConfig {
  /// Multiplier on the universal threshold sqrt(2 ln n).
  double c_thr = 1.8;
  /// Drops must start at or above c_low times the threshold ("low levels" lie below).
  double c_low = 0.05;
  /// Floor applied to normalized magnitudes before taking logs.
  double eps_mag = 1e-12;
  /// Floor for a degenerate (zero) MAD noise scale.
  double sigma_floor = 1e-12;
  /// Known noise scale; when unset the MAD estimate is used.
  std::optional<double> sigma;

  void validate() const {
    if (!(c_thr > 0.0)) throw std::invalid_argument("SdllConfig: c_thr must be > 0");
    if (!(c_low > 0.0 && c_low <= 1.0)) {
      throw std::invalid_argument("SdllConfig: c_low must lie in (0, 1]");
    }
    if (!(eps_mag > 0.0)) throw std::invalid_argument("SdllConfig: eps_mag must be > 0");
    if (!(sigma_floor > 0.0)) throw std::invalid_argument("SdllConfig: sigma_floor must be > 0");
    if (sigma && !(*sigma > 0.0)) throw std::invalid_argument("SdllConfig: sigma must be > 0");
  }

  friend bool operator==(const SdllConfig&, const SdllConfig&) = default;
};

inline double universal_threshold(std::size_t n, double c_thr = 1.0) {
  return c_thr * std::sqrt(2.0 * std::log(static_cast<double>(n)));
}

/**
 * Number of leading candidates to keep.
 *
 * With r_i = max(m_i / sigma, eps) and tau = c_thr sqrt(2 ln n): zero when
 * r_1 < tau; otherwise the index i maximizing ln r_i - ln r_{i+1} among the
 * drops that land below tau (r_{i+1} < tau) from at least the low level
 * (r_i >= c_low tau), smallest i on ties, or K when no drop lands below tau.
 * Drops inside the low region are ignored: the tail of the solution path
 * holds near-zero contrasts of tiny segments whose log-gaps are arbitrary.
 */
inline std::size_t sdll_select(std::span<const double> magnitudes, double sigma_hat, std::size_t n,
                               const SdllConfig& cfg = {}) {
  cfg.validate();
  if (!(sigma_hat > 0.0)) throw std::invalid_argument("sdll_select: sigma_hat must be > 0");
  if (n < 2) throw std::invalid_argument("sdll_select: n must be >= 2");
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    if (!(magnitudes[i] >= 0.0)) {
      throw std::invalid_argument("sdll_select: magnitudes must be non-negative");
    }
    if (i > 0 && magnitudes[i] > magnitudes[i - 1]) {
      throw std::invalid_argument("sdll_select: magnitudes must be sorted non-increasing");
    }
  }
  const std::size_t K = magnitudes.size();
  if (K == 0) return 0;

  std::vector<double> log_r(K);
  std::vector<double> r(K);
  for (std::size_t i = 0; i < K; ++i) {
    r[i] = std::max(magnitudes[i] / sigma_hat, cfg.eps_mag);
    log_r[i] = std::log(r[i]);
  }
  const double tau = universal_threshold(n, cfg.c_thr);
  if (r[0] < tau) return 0;

  const double low = cfg.c_low * tau;
  // 1-based i in [1, K-1]; 0-based drop from r[i-1] to r[i].
  std::size_t best = 0;
  double best_drop = -1.0;
  for (std::size_t i = 1; i < K; ++i) {
    if (r[i - 1] < low) break;
    if (!(r[i] < tau)) continue;
    const double drop = log_r[i - 1] - log_r[i];
    if (drop > best_drop) {
      best_drop = drop;
      best = i;
    }
  }
  return best == 0 ? K : best;
}

struct DetectResult {
  Segmentation segmentation;
  std::vector<Candidate> candidates;
  double sigma_hat = 0.0;
  bool sigma_degenerate = false;
  std::size_t q_hat = 0;
};

/// WBS2 candidate path, SDLL selection, and the least-squares fit on the kept locations.
inline DetectResult detect(const TimeSeries& x, const Wbs2Config& wcfg = {},
                           const SdllConfig& scfg = {}) {
  scfg.validate();
  DetectResult res;
  if (scfg.sigma) {
    res.sigma_hat = *scfg.sigma;
  } else {
    const NoiseScale ns = mad_sigma_ex(x, scfg.sigma_floor);
    res.sigma_hat = ns.sigma;
    res.sigma_degenerate = ns.degenerate;
  }
  res.candidates = wbs2_candidates(x, wcfg);

  std::vector<double> mags(res.candidates.size());
  std::transform(res.candidates.begin(), res.candidates.end(), mags.begin(),
                 [](const Candidate& c) { return c.magnitude; });
  res.q_hat = sdll_select(mags, res.sigma_hat, x.size(), scfg);

  std::vector<std::size_t> cps(res.q_hat);
  for (std::size_t i = 0; i < res.q_hat; ++i) cps[i] = res.candidates[i].b;
  std::sort(cps.begin(), cps.end());
  res.segmentation = segment_means(x, cps);
  return res;
}

} // namespace wbs2sdll
