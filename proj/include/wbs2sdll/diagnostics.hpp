#pragma once

/** @file
 * Competing explanations for a detected segmentation: AR(1), SETAR(1) and a
 * driftless random walk against the piecewise-constant fit, ranked by BIC on
 * the common sample t = 2..n.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wbs2sdll/sdll.hpp"
#include "wbs2sdll/timeseries.hpp"

namespace wbs2sdll {

enum class ModelKind { PiecewiseConstant, Ar1, Setar1, RandomWalk };

inline std::string_view to_string(ModelKind k) {
  switch (k) {
  case ModelKind::PiecewiseConstant: return "PiecewiseConstant";
  case ModelKind::Ar1: return "Ar1";
  case ModelKind::Setar1: return "Setar1";
  case ModelKind::RandomWalk: return "RandomWalk";
  }
  return "?";
}

/**
 * One fitted model.
 *
 * params by kind:
 *   Ar1               (intercept, slope)
 *   Setar1            (a_low, b_low, a_high, b_high, tau); low regime is y_{t-1} <= tau
 *   RandomWalk        (innovation variance ssr / n_eff)
 *   PiecewiseConstant (segment means..., change-points...)
 */
struct ModelFit {
  ModelKind kind = ModelKind::Ar1;
  std::vector<double> params;
  double ssr = 0.0;
  std::size_t p = 0;
  std::size_t n_eff = 0;
  double bic = 0.0;
  double aic = 0.0;
};

/// n ln(ssr/n) + p ln n; -inf for a perfect fit.
inline double bic_value(double ssr, std::size_t p, std::size_t n_eff) {
  const double n = static_cast<double>(n_eff);
  return n * std::log(ssr / n) + static_cast<double>(p) * std::log(n);
}

inline double aic_value(double ssr, std::size_t p, std::size_t n_eff) {
  const double n = static_cast<double>(n_eff);
  return n * std::log(ssr / n) + 2.0 * static_cast<double>(p);
}

inline ModelFit make_fit(ModelKind kind, std::vector<double> params, double ssr, std::size_t p,
                         std::size_t n_eff) {
  return {kind, std::move(params), ssr, p, n_eff, bic_value(ssr, p, n_eff),
          aic_value(ssr, p, n_eff)};
}

namespace detail {

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double ssr = 0.0;
};

/// OLS of y on (1, z); false when z is constant.
inline bool fit_line(std::span<const double> z, std::span<const double> y, LineFit& out) {
  const std::size_t m = z.size();
  if (m < 2) return false;
  double mz = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mz += z[i];
    my += y[i];
  }
  mz /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double szz = 0.0, szy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    szz += (z[i] - mz) * (z[i] - mz);
    szy += (z[i] - mz) * (y[i] - my);
  }
  if (!(szz > 0.0)) return false;
  out.slope = szy / szz;
  out.intercept = my - out.slope * mz;
  out.ssr = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - out.intercept - out.slope * z[i];
    out.ssr += r * r;
  }
  return true;
}

/// Linear-interpolation sample quantile (type 7) of sorted data.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

} // namespace detail

/// Least squares of x_t on (1, x_{t-1}) over t = 2..n; p = 3.
inline ModelFit fit_ar1(const TimeSeries& x) {
  if (x.size() < 3) throw std::invalid_argument("fit_ar1: need at least three observations");
  const auto v = x.values();
  detail::LineFit f;
  if (!detail::fit_line(v.first(v.size() - 1), v.subspan(1), f)) {
    throw DegenerateFitError("fit_ar1: lagged regressor has zero variance");
  }
  return make_fit(ModelKind::Ar1, {f.intercept, f.slope}, f.ssr, 3, x.size() - 1);
}

inline std::vector<double> default_threshold_quantiles() {
  std::vector<double> q;
  for (int i = 10; i <= 90; i += 5) q.push_back(i / 100.0);
  return q;
}

/// Minimum observations per regime for a threshold to be admissible.
inline constexpr std::size_t kMinRegimeSize = 5;

/**
 * Two-regime threshold autoregression, grid search over quantiles of the
 * lagged values; the first threshold attaining the minimum ssr wins. p = 6.
 */
inline ModelFit fit_setar1(const TimeSeries& x,
                           std::span<const double> grid_quantiles = {}) {
  if (x.size() < 20) throw std::invalid_argument("fit_setar1: need at least 20 observations");
  std::vector<double> qs = grid_quantiles.empty()
                               ? default_threshold_quantiles()
                               : std::vector<double>(grid_quantiles.begin(), grid_quantiles.end());
  for (double q : qs) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("fit_setar1: quantile outside [0,1]");
  }
  const auto v = x.values();
  const auto lag = v.first(v.size() - 1);
  const auto resp = v.subspan(1);
  std::vector<double> sorted(lag.begin(), lag.end());
  std::sort(sorted.begin(), sorted.end());

  bool found = false;
  double best_ssr = std::numeric_limits<double>::infinity();
  std::vector<double> best_params;
  std::vector<double> zl, yl, zh, yh;
  for (double q : qs) {
    const double tau = detail::quantile_sorted(sorted, q);
    zl.clear(); yl.clear(); zh.clear(); yh.clear();
    for (std::size_t i = 0; i < lag.size(); ++i) {
      if (lag[i] <= tau) {
        zl.push_back(lag[i]);
        yl.push_back(resp[i]);
      } else {
        zh.push_back(lag[i]);
        yh.push_back(resp[i]);
      }
    }
    if (zl.size() < kMinRegimeSize || zh.size() < kMinRegimeSize) continue;
    detail::LineFit lo, hi;
    if (!detail::fit_line(zl, yl, lo) || !detail::fit_line(zh, yh, hi)) continue;
    const double ssr = lo.ssr + hi.ssr;
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best_params = {lo.intercept, lo.slope, hi.intercept, hi.slope, tau};
      found = true;
    }
  }
  if (!found) throw DegenerateFitError("fit_setar1: no admissible threshold in the grid");
  return make_fit(ModelKind::Setar1, std::move(best_params), best_ssr, 6, x.size() - 1);
}

/// x_t - x_{t-1} ~ N(0, sigma^2); p = 1.
inline ModelFit fit_random_walk(const TimeSeries& x) {
  if (x.size() < 2) throw std::invalid_argument("fit_random_walk: need at least two observations");
  double ssr = 0.0;
  for (std::size_t t = 1; t < x.size(); ++t) {
    const double d = x[t] - x[t - 1];
    ssr += d * d;
  }
  const std::size_t n_eff = x.size() - 1;
  return make_fit(ModelKind::RandomWalk, {ssr / static_cast<double>(n_eff)}, ssr, 1, n_eff);
}

/// Scores a segmentation of x on t = 2..n, charging q locations and q+1 means plus the variance.
inline ModelFit piecewise_fit(const TimeSeries& x, const Segmentation& seg) {
  if (seg.n != x.size()) throw std::invalid_argument("piecewise_fit: segmentation length mismatch");
  if (x.size() < 2) throw std::invalid_argument("piecewise_fit: need at least two observations");
  const double ssr = residual_ssr(x, seg, 2);
  std::vector<double> params(seg.means.begin(), seg.means.end());
  for (std::size_t b : seg.changepoints) params.push_back(static_cast<double>(b));
  return make_fit(ModelKind::PiecewiseConstant, std::move(params), ssr,
                  2 * seg.num_changepoints() + 2, x.size() - 1);
}

struct ModelComparison {
  /// Sorted by BIC ascending.
  std::vector<ModelFit> ranked;
  /// Models whose fit was degenerate, with the reason.
  std::vector<std::pair<ModelKind, std::string>> excluded;

  const ModelFit& best() const {
    if (ranked.empty()) throw std::logic_error("ModelComparison: no admissible model");
    return ranked.front();
  }
};

inline ModelComparison compare_models(const TimeSeries& x, const DetectResult& detected) {
  ModelComparison out;
  out.ranked.push_back(piecewise_fit(x, detected.segmentation));

  auto attempt = [&](ModelKind kind, auto&& fit) {
    try {
      out.ranked.push_back(fit());
    } catch (const DegenerateFitError& e) {
      out.excluded.emplace_back(kind, e.what());
    } catch (const std::invalid_argument& e) {
      out.excluded.emplace_back(kind, e.what());
    }
  };
  attempt(ModelKind::Ar1, [&] { return fit_ar1(x); });
  attempt(ModelKind::Setar1, [&] { return fit_setar1(x); });
  attempt(ModelKind::RandomWalk, [&] { return fit_random_walk(x); });

  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const ModelFit& a, const ModelFit& b) { return a.bic < b.bic; });
  return out;
}

} // namespace wbs2sdll
