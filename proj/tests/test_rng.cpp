#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "threeway/rng.hpp"

using namespace threeway;

namespace {

double phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// One-sample Kolmogorov-Smirnov statistic against a cdf.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

}  // namespace

TEST_CASE("splitmix64 matches the reference sequence", "[rng]") {
  // Reference outputs of the standard splitmix64 generator for seeds 0, 42,
  // and 0xDEADBEEF, computed with an independent implementation.
  SplitMix64 a{0};
  CHECK(a.next() == 0xE220A8397B1DCDAFull);
  CHECK(a.next() == 0x6E789E6AA1B965F4ull);
  CHECK(a.next() == 0x06C45D188009454Full);

  SplitMix64 b{42};
  CHECK(b.next() == 0xBDD732262FEB6E95ull);
  CHECK(b.next() == 0x28EFE333B266F103ull);
  CHECK(b.next() == 0x47526757130F9F52ull);

  SplitMix64 c{0xDEADBEEFull};
  CHECK(c.next() == 0x4ADFB90F68C9EB9Bull);
  CHECK(c.next() == 0xDE586A3141A10922ull);
  CHECK(c.next() == 0x021FBC2F8E1CFC1Dull);
}

TEST_CASE("seed derivation is stable and collision-averse", "[rng]") {
  // The chain is part of the reproducibility contract; freeze one value so an
  // accidental change to the mixing breaks loudly.
  CHECK(chain(0, 0) == finalize64(kGolden));
  CHECK(derive(7, 1, 2) == chain(chain(7, 1), 2));

  // distinct purposes / indices must not collide on a sample of cases
  std::vector<std::uint64_t> seen;
  for (std::uint64_t t : {tag::trial, tag::block, tag::codebook, tag::codeword, tag::noise,
                          tag::phase, tag::message})
    for (std::uint64_t i = 0; i < 50; ++i) seen.push_back(derive(42, t, i));
  std::sort(seen.begin(), seen.end());
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());

  CHECK(derive(1, 2, 3) != derive(1, 3, 2));
  CHECK(derive(0, 0) != derive(0, 0, 0));
}

TEST_CASE("unit53 maps words into [0,1)", "[rng]") {
  CHECK(unit53(0) == 0.0);
  CHECK(unit53(~0ull) < 1.0);
  CHECK(unit53(~0ull) > 0.999999999999999);
  SplitMix64 g{7};
  for (int i = 0; i < 10000; ++i) {
    const double u = unit53(g.next());
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("uniform_index is in range and roughly uniform", "[rng]") {
  SplitMix64 g{123};
  const std::uint64_t m = 7;
  std::vector<int> counts(m, 0);
  const int N = 140000;
  for (int i = 0; i < N; ++i) {
    const std::uint64_t v = uniform_index(g.next(), m);
    REQUIRE(v < m);
    ++counts[v];
  }
  const double expect = static_cast<double>(N) / static_cast<double>(m);
  for (auto c : counts) CHECK(std::abs(c - expect) < 5.0 * std::sqrt(expect));
}

TEST_CASE("ziggurat solves the canonical 256-layer base edge", "[rng]") {
  // Root of the equal-area closure condition for 256 layers of the standard
  // normal; the reference value is well known from the literature.
  CHECK(ZigguratNormal::instance().r() == Catch::Approx(3.6541528853610088).margin(1e-12));
}

TEST_CASE("ziggurat output passes a KS test against the normal cdf", "[rng]") {
  const auto& zig = ZigguratNormal::instance();
  SplitMix64 g{20240817};
  const std::size_t N = 200000;
  std::vector<double> xs(N);
  for (auto& x : xs) x = zig.sample(g);

  const double d = ks_statistic(xs, phi);
  const double scaled = d * (std::sqrt(static_cast<double>(N)) + 0.12 +
                             0.11 / std::sqrt(static_cast<double>(N)));
  CHECK(scaled < 1.628);  // 1% critical value

  double mean = 0.0, var = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(N);
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(N - 1);
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);

  // the tail branch beyond the base edge must actually fire
  const double r = zig.r();
  CHECK(std::count_if(xs.begin(), xs.end(), [&](double x) { return std::abs(x) > r; }) > 0);
}

TEST_CASE("box_muller produces standard normal pairs", "[rng]") {
  SplitMix64 g{99};
  const std::size_t N = 100000;
  std::vector<double> xs;
  xs.reserve(2 * N);
  for (std::size_t i = 0; i < N; ++i) {
    const auto [a, b] = box_muller(g.next(), g.next());
    REQUIRE(std::isfinite(a));
    REQUIRE(std::isfinite(b));
    xs.push_back(a);
    xs.push_back(b);
  }
  const double d = ks_statistic(xs, phi);
  const double scaled = d * (std::sqrt(static_cast<double>(xs.size())) + 0.12 +
                             0.11 / std::sqrt(static_cast<double>(xs.size())));
  CHECK(scaled < 1.628);
}

TEST_CASE("ziggurat sampling is deterministic per stream seed", "[rng]") {
  const auto& zig = ZigguratNormal::instance();
  SplitMix64 g1{5}, g2{5};
  for (int i = 0; i < 1000; ++i) REQUIRE(zig.sample(g1) == zig.sample(g2));
}
