#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "threeway/channels.hpp"
#include "threeway/errors.hpp"
#include "threeway/regions.hpp"

using namespace threeway;
using Catch::Approx;

namespace {

AwgnChannelSpec snr_spec(std::array<std::array<double, 3>, 3> s) {
  return AwgnChannelSpec(s, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
}

// gamma_12 = gamma_21 = 6, gamma_13 = 8, gamma_23 = 1: the running example.
AwgnChannelSpec example_reciprocal() {
  std::array<std::array<double, 3>, 3> s{};
  s[0][1] = s[1][0] = 6.0;
  s[0][2] = s[2][0] = 8.0;
  s[1][2] = s[2][1] = 1.0;
  return snr_spec(s);
}

RateConstraint cons(std::array<double, 3> c, double b) {
  RateConstraint r;
  r.coeffs = c;
  r.bound = b;
  return r;
}

double bound_of(const RatePolytope& poly, std::array<double, 3> coeffs) {
  for (const auto& c : poly.constraints())
    if (c.coeffs == coeffs) return c.bound;
  FAIL("no constraint with those coefficients");
  return 0.0;
}

// Independent check of the closed-form best power split: golden-section
// search of min(R'(alpha), R''(alpha)) over [0, 1].
double golden_max_min(double g12, double g23) {
  auto f = [&](double a) {
    auto r = superposition_rates(g12, g23, a);
    return std::min(r.r_prime, r.r_double_prime);
  };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = f(x1);
    }
  }
  return std::max(f1, f2);
}

}  // namespace

TEST_CASE("polytope membership and equal-rate point", "[regions]") {
  RatePolytope pairs1({cons({1, 1, 0}, 1.0), cons({1, 0, 1}, 1.0), cons({0, 1, 1}, 1.0)});
  CHECK(pairs1.contains({0.5, 0.5, 0.5}));
  CHECK(pairs1.contains({1.0, 0.0, 0.0}));
  CHECK_FALSE(pairs1.contains({0.6, 0.6, 0.0}));
  CHECK_FALSE(pairs1.contains({-0.1, 0.0, 0.0}));
  CHECK(pairs1.equal_rate_max() == Approx(0.5));

  RatePolytope pairs2({cons({1, 1, 0}, 2.0), cons({1, 0, 1}, 2.0), cons({0, 1, 1}, 2.0)});
  CHECK(pairs2.equal_rate_max() == Approx(1.0));

  CHECK_THROWS_AS(RatePolytope({}), Error);
  CHECK_THROWS_AS(RatePolytope({cons({0, 0, 0}, 1.0)}), Error);
  CHECK_THROWS_AS(RatePolytope({cons({1, 0.5, 0}, 1.0)}), Error);
  CHECK_THROWS_AS(RatePolytope({cons({1, 0, 0}, -1.0)}), Error);
}

TEST_CASE("vertex enumeration on known shapes", "[regions]") {
  RatePolytope cube({cons({1, 0, 0}, 1.0), cons({0, 1, 0}, 1.0), cons({0, 0, 1}, 1.0)});
  auto cv = cube.vertices();
  REQUIRE(cv.size() == 8);
  CHECK(std::count(cv.begin(), cv.end(), RateTriple{1.0, 1.0, 1.0}) == 1);
  CHECK(std::count(cv.begin(), cv.end(), RateTriple{0.0, 0.0, 0.0}) == 1);

  RatePolytope tri({cons({1, 1, 0}, 1.0), cons({1, 0, 1}, 1.0), cons({0, 1, 1}, 1.0)});
  auto tv = tri.vertices();
  REQUIRE(tv.size() == 5);
  CHECK(std::count(tv.begin(), tv.end(), RateTriple{0.0, 0.0, 0.0}) == 1);
  CHECK(std::count(tv.begin(), tv.end(), RateTriple{1.0, 0.0, 0.0}) == 1);
  CHECK(std::count(tv.begin(), tv.end(), RateTriple{0.0, 1.0, 0.0}) == 1);
  CHECK(std::count(tv.begin(), tv.end(), RateTriple{0.0, 0.0, 1.0}) == 1);
  CHECK(std::count(tv.begin(), tv.end(), RateTriple{0.5, 0.5, 0.5}) == 1);

  RatePolytope open_dir({cons({1, 1, 0}, 1.0)});
  CHECK_THROWS_MATCHES(open_dir.vertices(), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::unbounded_region; }));
}

TEST_CASE("field-channel region bounds each pair by the receiver capacity", "[regions]") {
  {
    Field f(2, 1);
    Pmf clean({1.0, 0.0});
    std::array<std::array<felem, 3>, 3> g{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g[i][j] = 1;
    auto poly = ff_outer(FfChannelSpec(f, g, {clean, clean, clean}));
    REQUIRE(poly.constraints().size() == 3);
    CHECK(bound_of(poly, {0, 1, 1}) == Approx(1.0));
    CHECK(bound_of(poly, {1, 0, 1}) == Approx(1.0));
    CHECK(bound_of(poly, {1, 1, 0}) == Approx(1.0));
    CHECK(poly.equal_rate_max() == Approx(0.5));
  }
  {
    Field f(2, 1);
    Pmf coin({0.5, 0.5});
    std::array<std::array<felem, 3>, 3> g{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g[i][j] = 1;
    auto poly = ff_outer(FfChannelSpec(f, g, {coin, coin, coin}));
    for (const auto& c : poly.constraints()) CHECK(c.bound == Approx(0.0).margin(1e-12));
  }
  {
    Field f(2, 2);
    Pmf two_point({0.5, 0.5, 0.0, 0.0});
    Pmf clean({1.0, 0.0, 0.0, 0.0});
    std::array<std::array<felem, 3>, 3> g{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g[i][j] = static_cast<felem>(1 + (i + j) % 3);
    auto poly = ff_outer(FfChannelSpec(f, g, {two_point, clean, clean}));
    CHECK(bound_of(poly, {0, 1, 1}) == Approx(1.0));  // receiver 1 loses one of its two bits
    CHECK(bound_of(poly, {1, 0, 1}) == Approx(2.0));
    CHECK(bound_of(poly, {1, 1, 0}) == Approx(2.0));
  }
}

TEST_CASE("awgn outer bound on the running example", "[regions]") {
  auto poly = awgn_outer(example_reciprocal());
  REQUIRE(poly.constraints().size() == 6);
  CHECK(bound_of(poly, {1, 0, 0}) == Approx(3.9068905956085187).margin(1e-12));  // log2 15
  CHECK(bound_of(poly, {0, 1, 0}) == Approx(3.0).margin(1e-12));
  CHECK(bound_of(poly, {0, 0, 1}) == Approx(3.321928094887362).margin(1e-12));  // log2 10
  CHECK(bound_of(poly, {0, 1, 1}) == Approx(3.9068905956085187).margin(1e-12));
  CHECK(bound_of(poly, {1, 0, 1}) == Approx(3.0).margin(1e-12));
  CHECK(bound_of(poly, {1, 1, 0}) == Approx(3.321928094887362).margin(1e-12));
  CHECK(poly.equal_rate_max() == Approx(1.5).margin(1e-12));
}

TEST_CASE("awgn inner bound on the running example", "[regions]") {
  auto poly = awgn_inner(example_reciprocal());
  REQUIRE(poly.constraints().size() == 9);
  // weakest link out of node 2 is gamma_23 = 1
  CHECK(poly.equal_rate_max() == Approx(1.0).margin(1e-12));
  CHECK(poly.contains({1.0, 0.4, 0.4}));
  CHECK_FALSE(poly.contains({1.0, 1.2, 0.4}));  // violates R2 <= log2(1+g23) = 1
  CHECK(is_subset(poly, awgn_outer(example_reciprocal())));
}

TEST_CASE("inner region sits inside the outer bound for random channels", "[regions]") {
  std::mt19937 rng(314159);
  std::uniform_real_distribution<double> logu(std::log(1e-2), std::log(1e3));
  for (int rep = 0; rep < 1000; ++rep) {
    std::array<std::array<double, 3>, 3> s{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) s[i][j] = std::exp(logu(rng));
    auto ch = snr_spec(s);
    REQUIRE(is_subset(awgn_inner(ch), awgn_outer(ch)));
  }
}

TEST_CASE("subset test is a partial order probe", "[regions]") {
  RatePolytope small({cons({1, 0, 0}, 1.0), cons({0, 1, 0}, 1.0), cons({0, 0, 1}, 1.0)});
  RatePolytope big({cons({1, 0, 0}, 2.0), cons({0, 1, 0}, 2.0), cons({0, 0, 1}, 2.0)});
  CHECK(is_subset(small, big));
  CHECK_FALSE(is_subset(big, small));
  CHECK(is_subset(small, small));
}

TEST_CASE("equal-rate capacity, both-senders-equal class", "[regions]") {
  {
    std::array<std::array<double, 3>, 3> s{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s[i][j] = 2.0;
    CHECK(c_ss(snr_spec(s)) == Approx(1.160964047443681).margin(1e-12));  // (1/2) log2 5
  }
  {
    // receiver SNRs 9, 4, 1: the weakest receiver pins the rate
    std::array<std::array<double, 3>, 3> s{};
    s[1][0] = s[2][0] = 9.0;
    s[0][1] = s[2][1] = 4.0;
    s[0][2] = s[1][2] = 1.0;
    CHECK(c_ss(snr_spec(s)) == Approx(0.792481250360578).margin(1e-12));  // (1/2) log2 3
  }
  CHECK_THROWS_MATCHES(c_ss(example_reciprocal()), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::not_sender_symmetrical; }));
}

TEST_CASE("equal-rate capacity, reciprocal class", "[regions]") {
  {
    auto r = c_r(example_reciprocal());
    CHECK(r.value == Approx(1.5).margin(1e-12));
    CHECK(r.perm == std::array<int, 3>{0, 1, 2});
  }
  {
    // pair SNRs 2 (nodes 1-2), 3 (nodes 1-3), 10 (nodes 2-3):
    // middle + weakest = 3 + 2
    std::array<std::array<double, 3>, 3> s{};
    s[0][1] = s[1][0] = 2.0;
    s[0][2] = s[2][0] = 3.0;
    s[1][2] = s[2][1] = 10.0;
    auto r = c_r(snr_spec(s));
    CHECK(r.value == Approx(1.292481250360578).margin(1e-12));  // (1/2) log2 6
    CHECK(r.perm == std::array<int, 3>{2, 0, 1});
  }
  {
    // all pairs equal: coincides with the both-senders-equal expression
    std::array<std::array<double, 3>, 3> s{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s[i][j] = 2.0;
    CHECK(c_r(snr_spec(s)).value == Approx(c_ss(snr_spec(s))).margin(1e-12));
  }
  {
    std::array<std::array<double, 3>, 3> s{};
    s[0][1] = 6.0; s[1][0] = 7.0;
    s[0][2] = s[2][0] = 8.0;
    s[1][2] = s[2][1] = 1.0;
    CHECK_THROWS_MATCHES(c_r(snr_spec(s)), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == Errc::not_reciprocal; }));
  }
}

TEST_CASE("reciprocal equal-rate value ignores node labels", "[regions]") {
  std::array<std::array<double, 3>, 3> base{};
  base[0][1] = base[1][0] = 6.0;
  base[0][2] = base[2][0] = 8.0;
  base[1][2] = base[2][1] = 1.0;
  const double ref = c_r(snr_spec(base)).value;
  std::array<int, 3> perm{0, 1, 2};
  do {
    std::array<std::array<double, 3>, 3> s{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) s[i][j] = base[perm[i]][perm[j]];
    auto r = c_r(snr_spec(s));
    CHECK(r.value == Approx(ref).margin(1e-12));
    // the role assignment must undo the relabeling: the strong pair SNR seen
    // from the outside node is reproduced
    CHECK(s[r.perm[1]][r.perm[2]] == Approx(base[1][2]).margin(1e-12));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("layered-transmission rate expressions", "[regions]") {
  {
    auto r = superposition_rates(6.0, 1.0, 0.0);
    CHECK(r.r_prime == 0.0);
  }
  {
    auto r = superposition_rates(6.0, 1.0, 1.0);
    CHECK(r.r_prime == Approx(2.807354922057604).margin(1e-12));        // log2 7
    CHECK(r.r_double_prime == Approx(0.19264507794239583).margin(1e-12));  // log2(8/7)
    CHECK(r.sum_bound == Approx(3.0).margin(1e-12));
  }
  {
    auto r = superposition_rates(6.0, 1.0, 0.6);
    CHECK(r.r_prime == Approx(2.2016338611696504).margin(1e-12));
    CHECK(r.r_double_prime == Approx(1.958179824305373).margin(1e-12));
  }
  CHECK_THROWS_MATCHES(superposition_rates(6.0, 1.0, -0.01), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::alpha_out_of_range; }));
  CHECK_THROWS_MATCHES(superposition_rates(6.0, 1.0, 1.01), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::alpha_out_of_range; }));
  CHECK_THROWS_AS(superposition_rates(0.0, 1.0, 0.5), Error);
}

TEST_CASE("closed-form best power split", "[regions]") {
  CHECK(r_triple_prime(6.0, 1.0) == Approx(2.0931094043914813).margin(1e-12));
  CHECK(r_triple_prime(1.0, 1.0) == Approx(0.8479969065549501).margin(1e-12));
  CHECK(superposition_alpha_star(6.0, 1.0) == Approx(0.5444444444444444).margin(1e-12));

  std::mt19937 rng(271828);
  std::uniform_real_distribution<double> logu(std::log(1e-2), std::log(1e2));
  for (int rep = 0; rep < 200; ++rep) {
    double a = std::exp(logu(rng)), b = std::exp(logu(rng));
    const double g12 = std::max(a, b), g23 = std::min(a, b);
    const double astar = superposition_alpha_star(g12, g23);
    REQUIRE(astar >= 0.0);
    REQUIRE(astar <= 1.0);
    auto r = superposition_rates(g12, g23, astar);
    const double want = r_triple_prime(g12, g23);
    // at the optimum the two layers run at the same rate
    CHECK(r.r_prime == Approx(r.r_double_prime).margin(1e-9));
    CHECK(r.r_prime == Approx(want).margin(1e-9));
    // and a blind 1-d search finds no better split
    CHECK(golden_max_min(g12, g23) == Approx(want).margin(1e-6));
  }
}
