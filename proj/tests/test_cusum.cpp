#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "wbs2sdll/cusum.hpp"

using namespace wbs2sdll;
using Catch::Approx;

TEST_CASE("cusum_value hand examples", "[cusum]") {
  REQUIRE(cusum_value(TimeSeries({0, 0, 1, 1}), 1, 2, 4) == Approx(-1.0).epsilon(1e-14));
  REQUIRE(cusum_value(TimeSeries({0, 1}), 1, 1, 2) == Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));
  const TimeSeries flat({3.3, 3.3, 3.3, 3.3, 3.3});
  for (std::size_t s = 1; s <= 5; ++s)
    for (std::size_t e = s + 1; e <= 5; ++e)
      for (std::size_t b = s; b < e; ++b) REQUIRE(cusum_value(flat, s, b, e) == 0.0);
}

TEST_CASE("cusum_value rejects bad indices", "[cusum]") {
  const TimeSeries x({1, 2, 3, 4});
  REQUIRE_THROWS_AS(cusum_value(x, 0, 1, 2), std::invalid_argument);
  REQUIRE_THROWS_AS(cusum_value(x, 2, 1, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(cusum_value(x, 1, 3, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(cusum_value(x, 1, 2, 5), std::invalid_argument);
}

TEST_CASE("argmax_cusum examples and tie-breaking", "[cusum][argmax]") {
  const auto c = argmax_cusum(TimeSeries({0, 0, 1, 1}), {1, 4});
  REQUIRE(c.b == 2);
  REQUIRE(c.magnitude == Approx(1.0).epsilon(1e-14));
  REQUIRE(std::abs(cusum_value(TimeSeries({0, 0, 1, 1}), 1, 1, 4)) == Approx(2.0 / std::sqrt(12.0)));
  REQUIRE(std::abs(cusum_value(TimeSeries({0, 0, 1, 1}), 1, 3, 4)) == Approx(2.0 / std::sqrt(12.0)));

  const auto flat = argmax_cusum(TimeSeries({2, 2, 2, 2}), {1, 4});
  REQUIRE(flat.b == 1);
  REQUIRE(flat.magnitude == 0.0);
  REQUIRE(flat.interval == Interval{1, 4});
}

TEST_CASE("argmax_cusum agrees with brute force on every subinterval", "[cusum][argmax][oracle]") {
  std::mt19937_64 gen(314);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> v(2 + gen() % 40);
    for (auto& e : v) e = z(gen) + (gen() % 4 == 0 ? 2.0 : 0.0);
    const TimeSeries x(v);
    const CusumKernel k(x);
    for (std::size_t s = 1; s <= v.size(); ++s) {
      for (std::size_t e = s + 1; e <= v.size(); ++e) {
        const auto got = k.argmax({s, e});
        const auto ref = oracle::argmax(v, s, e);
        REQUIRE(got.b == ref.b);
        REQUIRE(got.magnitude == Approx(ref.magnitude).margin(1e-10));
      }
    }
  }
}

TEST_CASE("cusum is shift invariant and scale equivariant", "[cusum][property]") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(3 + gen() % 60);
    for (auto& e : v) e = z(gen);
    const TimeSeries x(v);
    const double a = u(gen), c = 10.0 * u(gen);
    const CusumKernel k(x), ks(x.affine(1.0, c)), ka(x.affine(a, 0.0));
    for (int rep = 0; rep < 50; ++rep) {
      std::size_t s = 1 + gen() % (v.size() - 1);
      std::size_t e = s + 1 + gen() % (v.size() - s);
      std::size_t b = s + gen() % (e - s);
      REQUIRE(std::abs(ks.value(s, b, e) - k.value(s, b, e)) <= 1e-10);
      REQUIRE(ka.value(s, b, e) == Approx(a * k.value(s, b, e)).margin(1e-10));
    }
  }
}

TEST_CASE("noiseless single step is located exactly", "[cusum][argmax]") {
  for (std::size_t n : {5u, 17u, 64u}) {
    for (std::size_t jump = 1; jump < n; jump += 3) {
      std::vector<double> v(n, 1.5);
      for (std::size_t t = jump; t < n; ++t) v[t] = -0.25;
      const TimeSeries x(v);
      REQUIRE(argmax_cusum(x, {1, n}).b == jump);
      if (jump > 1) REQUIRE(argmax_cusum(x, {jump - 1, n}).b == jump);
    }
  }
}

TEST_CASE("draw_intervals contract", "[cusum][intervals]") {
  RngStream rng(1, 0);
  const auto two = draw_intervals(4, 5, 10, rng);
  REQUIRE(two.size() == 11);
  for (const auto& iv : two) REQUIRE(iv == Interval{4, 5});

  RngStream r1(8, 2), r2(8, 2);
  REQUIRE(draw_intervals(1, 100, 50, r1) == draw_intervals(1, 100, 50, r2));

  RngStream r3(8, 3);
  const auto many = draw_intervals(10, 40, 500, r3);
  REQUIRE(many.back() == Interval{10, 40});
  for (const auto& iv : many) {
    REQUIRE(iv.s >= 10);
    REQUIRE(iv.s < iv.e);
    REQUIRE(iv.e <= 40);
  }
  REQUIRE_THROWS_AS(draw_intervals(3, 3, 5, r3), std::invalid_argument);
}

TEST_CASE("draw_intervals samples pairs uniformly", "[cusum][intervals][statistical]") {
  RngStream rng(2020, 0);
  constexpr std::size_t M = 10000;
  auto draws = draw_intervals(1, 20, M, rng);
  draws.pop_back();
  std::map<std::pair<std::size_t, std::size_t>, int> freq;
  for (const auto& iv : draws) ++freq[{iv.s, iv.e}];
  const std::size_t cells = interval_count(1, 20);
  REQUIRE(cells == 190);
  REQUIRE(freq.size() == cells);

  const double p = 1.0 / static_cast<double>(cells);
  const double expected = M * p;
  const double se = std::sqrt(M * p * (1.0 - p));
  double chi2 = 0.0;
  for (const auto& [pair, count] : freq) {
    chi2 += (count - expected) * (count - expected) / expected;
    // Bonferroni over 190 cells at family level ~0.01.
    REQUIRE(std::abs(count - expected) <= 4.0 * se);
  }
  // Wilson-Hilferty upper 0.1% point of chi-square with 189 degrees of freedom.
  const double df = static_cast<double>(cells - 1);
  const double h = 2.0 / (9.0 * df);
  const double crit = df * std::pow(1.0 - h + 3.090232 * std::sqrt(h), 3.0);
  REQUIRE(chi2 < crit);
}

TEST_CASE("all_intervals enumerates every pair once", "[cusum][intervals]") {
  const auto all = all_intervals(3, 7);
  REQUIRE(all.size() == interval_count(3, 7));
  REQUIRE(all.size() == 10);
  REQUIRE(all.front() == Interval{3, 4});
  REQUIRE(all.back() == Interval{6, 7});
}
