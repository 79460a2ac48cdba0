#pragma once

/** @file
 * Data generating processes: random walk, SETAR(1) and a piecewise-constant
 * mean with Gaussian noise.
 */

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wbs2sdll/rng.hpp"
#include "wbs2sdll/timeseries.hpp"

namespace wbs2sdll {

enum class DgpKind { RandomWalk, Setar1, PiecewiseConstant };

inline std::string_view to_string(DgpKind k) {
  switch (k) {
  case DgpKind::RandomWalk: return "rw";
  case DgpKind::Setar1: return "setar";
  case DgpKind::PiecewiseConstant: return "piecewise";
  }
  return "?";
}

inline std::optional<DgpKind> parse_dgp_kind(std::string_view s) {
  if (s == "rw" || s == "random_walk" || s == "randomwalk") return DgpKind::RandomWalk;
  if (s == "setar" || s == "setar1") return DgpKind::Setar1;
  if (s == "piecewise" || s == "pc" || s == "piecewise_constant") return DgpKind::PiecewiseConstant;
  return std::nullopt;
}

struct DgpSpec {
  DgpKind kind = DgpKind::RandomWalk;
  std::size_t n = 500;
  double sigma = 1.0;
  double y0 = 0.0;
  // SETAR(1) upper-regime intercept, slope and threshold.
  double a = 0.7;
  double b = 0.7;
  double tau = 1.0;
  // Observations simulated and discarded before the recorded sample.
  std::size_t burn_in = 0;
  std::vector<std::size_t> breaks;
  std::vector<double> levels{0.0};
  std::uint64_t seed = 1;

  void validate() const {
    if (n < 1) throw std::invalid_argument("DgpSpec: n must be >= 1");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
      throw std::invalid_argument("DgpSpec: sigma must be finite and >= 0");
    }
    if (kind == DgpKind::PiecewiseConstant) {
      detail::validate_changepoints(breaks, n);
      if (levels.size() != breaks.size() + 1) {
        throw std::invalid_argument("DgpSpec: need exactly |breaks|+1 levels");
      }
    }
  }

  friend bool operator==(const DgpSpec&, const DgpSpec&) = default;
};

/// y_1 = y0 + e_1, y_t = y_{t-1} + e_t, e_t ~ N(0, sigma^2).
inline TimeSeries simulate_random_walk(std::size_t n, double sigma, double y0, RngStream& rng,
                                       std::size_t burn_in = 0) {
  if (n < 1) throw std::invalid_argument("simulate_random_walk: n must be >= 1");
  std::vector<double> y;
  y.reserve(n);
  double prev = y0;
  for (std::size_t t = 0; t < n + burn_in; ++t) {
    prev += sigma * rng.normal();
    if (t >= burn_in) y.push_back(prev);
  }
  return TimeSeries(std::move(y));
}

/// y_t = (a + b y_{t-1}) 1(y_{t-1} > tau) + e_t with y_0 = y0; strict indicator.
inline TimeSeries simulate_setar1(std::size_t n, double a, double b, double tau, double sigma,
                                  double y0, RngStream& rng, std::size_t burn_in = 0) {
  if (n < 1) throw std::invalid_argument("simulate_setar1: n must be >= 1");
  std::vector<double> y;
  y.reserve(n);
  double prev = y0;
  for (std::size_t t = 0; t < n + burn_in; ++t) {
    const double drift = prev > tau ? a + b * prev : 0.0;
    // sigma = 0 must leave the regime identity exact, so skip the draw term.
    prev = sigma == 0.0 ? drift : drift + sigma * rng.normal();
    if (t >= burn_in) y.push_back(prev);
  }
  return TimeSeries(std::move(y));
}

inline TimeSeries simulate_piecewise(std::span<const std::size_t> breaks,
                                     std::span<const double> levels, double sigma, std::size_t n,
                                     RngStream& rng) {
  if (n < 1) throw std::invalid_argument("simulate_piecewise: n must be >= 1");
  detail::validate_changepoints(breaks, n);
  if (levels.size() != breaks.size() + 1) {
    throw std::invalid_argument("simulate_piecewise: need exactly |breaks|+1 levels");
  }
  std::vector<double> y;
  y.reserve(n);
  std::size_t seg = 0;
  for (std::size_t t = 1; t <= n; ++t) {
    if (seg < breaks.size() && t > breaks[seg]) ++seg;
    const double e = sigma == 0.0 ? 0.0 : sigma * rng.normal();
    y.push_back(levels[seg] + e);
  }
  return TimeSeries(std::move(y));
}

/// Draws one replication of spec from stream (spec.seed, stream_id).
inline TimeSeries simulate(const DgpSpec& spec, std::uint64_t stream_id = 0) {
  spec.validate();
  RngStream rng(spec.seed, stream_id);
  switch (spec.kind) {
  case DgpKind::RandomWalk:
    return simulate_random_walk(spec.n, spec.sigma, spec.y0, rng, spec.burn_in);
  case DgpKind::Setar1:
    return simulate_setar1(spec.n, spec.a, spec.b, spec.tau, spec.sigma, spec.y0, rng,
                           spec.burn_in);
  case DgpKind::PiecewiseConstant:
    return simulate_piecewise(spec.breaks, spec.levels, spec.sigma, spec.n, rng);
  }
  throw std::logic_error("simulate: unknown DgpKind");
}

} // namespace wbs2sdll
