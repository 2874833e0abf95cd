#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "relayplan/rng.hpp"

using namespace relayplan;

TEST_CASE("splitmix64 matches the reference sequence") {
  // Outputs of the reference generator stepping its state from 0 and from 42.
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64(0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
  CHECK(splitmix64(42) == 0xbdd732262feb6e95ULL);
}

TEST_CASE("pcg32 matches the reference sequence") {
  Pcg32 rng(42, 54);
  const std::uint32_t expect[] = {0xa15c02b7u, 0x7b47f409u, 0xba1d3330u,
                                  0x83d2f293u, 0xbfa4784bu, 0xcbed606eu};
  for (std::uint32_t e : expect) CHECK(rng.next_u32() == e);

  Pcg32 rng2(123456789, 1);
  CHECK(rng2.next_u32() == 0xb4a33584u);
  CHECK(rng2.next_u32() == 0x6c7617d9u);
  CHECK(rng2.next_u32() == 0x2736c6ceu);
}

TEST_CASE("next_double stays in the unit interval") {
  Pcg32 rng(7, 7);
  for (int i = 0; i < 20000; ++i) {
    double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("bernoulli honors degenerate probabilities") {
  Pcg32 a(1, 2), b(3, 4);
  for (int i = 0; i < 1000; ++i) {
    CHECK_FALSE(a.bernoulli(0.0));
    CHECK(b.bernoulli(1.0));
  }
}

TEST_CASE("stream_rng is reproducible and index-sensitive") {
  Pcg32 a = stream_rng(5, stream_tag::demand, 3, 1);
  Pcg32 b = stream_rng(5, stream_tag::demand, 3, 1);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u32() == b.next_u32());

  Pcg32 c = stream_rng(5, stream_tag::demand, 4, 1);
  Pcg32 d = stream_rng(5, stream_tag::disruption, 3, 1);
  Pcg32 e = stream_rng(6, stream_tag::demand, 3, 1);
  Pcg32 f = stream_rng(5, stream_tag::demand, 3, 2);
  Pcg32 g = stream_rng(5, stream_tag::demand, 3, 1);
  bool all_equal_c = true, all_equal_d = true, all_equal_e = true, all_equal_f = true;
  for (int i = 0; i < 16; ++i) {
    std::uint32_t r = g.next_u32();
    all_equal_c &= c.next_u32() == r;
    all_equal_d &= d.next_u32() == r;
    all_equal_e &= e.next_u32() == r;
    all_equal_f &= f.next_u32() == r;
  }
  CHECK_FALSE(all_equal_c);
  CHECK_FALSE(all_equal_d);
  CHECK_FALSE(all_equal_e);
  CHECK_FALSE(all_equal_f);
}

TEST_CASE("poisson sampling edge cases") {
  Pcg32 rng(11, 0);
  CHECK(poisson_sample(0.0, rng) == 0);
  CHECK_THROWS_AS(poisson_sample(-1.0, rng), ArgumentError);
}

static void check_poisson_moments(double lambda, int n, double mean_sigmas, double var_slack) {
  Pcg32 rng(2024, 17);
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = static_cast<double>(poisson_sample(lambda, rng));
    REQUIRE(v >= 0.0);
    sum += v;
    sumsq += v * v;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  double band = mean_sigmas * std::sqrt(lambda / n);
  CHECK(std::abs(mean - lambda) <= band);
  CHECK(var >= (1.0 - var_slack) * lambda);
  CHECK(var <= (1.0 + var_slack) * lambda);
}

TEST_CASE("poisson moments, inversion regime") { check_poisson_moments(3.0, 40000, 4.0, 0.08); }

TEST_CASE("poisson moments, transformed rejection regime") {
  check_poisson_moments(50.0, 40000, 4.0, 0.08);
}

TEST_CASE("poisson cdf against the exact mass function") {
  // P(X <= 40) for lambda 40, accumulated from the exact pmf.
  const double lambda = 40.0;
  double p = std::exp(-lambda);
  double exact = p;
  for (int k = 1; k <= 40; ++k) {
    p *= lambda / k;
    exact += p;
  }
  Pcg32 rng(99, 3);
  const int n = 40000;
  int hits = 0;
  for (int i = 0; i < n; ++i)
    if (poisson_sample(lambda, rng) <= 40) ++hits;
  double freq = static_cast<double>(hits) / n;
  CHECK(std::abs(freq - exact) < 0.012);
}

TEST_CASE("poisson draws are deterministic per stream") {
  Pcg32 a = stream_rng(8, stream_tag::demand, 0);
  Pcg32 b = stream_rng(8, stream_tag::demand, 0);
  for (int i = 0; i < 200; ++i) REQUIRE(poisson_sample(12.5, a) == poisson_sample(12.5, b));
}
