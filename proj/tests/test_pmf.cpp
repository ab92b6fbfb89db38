#include <cstddef>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "threeway/errors.hpp"
#include "threeway/galois.hpp"
#include "threeway/pmf.hpp"

using namespace threeway;
using Catch::Approx;

namespace {

Errc code_of(const Error& e) { return e.code(); }

JointPmf random_joint(std::mt19937& rng, std::vector<std::size_t> dims) {
  std::size_t cells = 1;
  for (auto d : dims) cells *= d;
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> data(cells);
  double s = 0.0;
  for (auto& v : data) s += (v = u(rng));
  for (auto& v : data) v /= s;
  std::vector<std::string> labels;
  for (std::size_t a = 0; a < dims.size(); ++a) labels.push_back("A" + std::to_string(a));
  return JointPmf(std::move(dims), std::move(labels), std::move(data));
}

}  // namespace

TEST_CASE("entropy of hand-checked distributions", "[pmf]") {
  CHECK(entropy(std::vector<double>{0.5, 0.5}) == Approx(1.0).margin(1e-15));
  CHECK(entropy(std::vector<double>{1.0, 0.0}) == 0.0);
  CHECK(entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}) == Approx(2.0).margin(1e-15));
  CHECK(entropy(std::vector<double>{0.89, 0.11}) == Approx(0.499915958164528).margin(1e-12));
  CHECK(entropy(std::vector<double>{0.2, 0.3, 0.5}) == Approx(1.4854752972273344).margin(1e-12));
}

TEST_CASE("pmf validation", "[pmf]") {
  CHECK_NOTHROW(Pmf({0.25, 0.75}));
  CHECK_THROWS_MATCHES(Pmf({}), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return code_of(e) == Errc::empty_input;
                       }));
  CHECK_THROWS_MATCHES(Pmf({0.5, 0.6}), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return code_of(e) == Errc::invalid_pmf;
                       }));
  CHECK_THROWS_MATCHES(Pmf({1.2, -0.2}), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return code_of(e) == Errc::invalid_pmf;
                       }));
}

TEST_CASE("joint pmf marginals and indexing", "[pmf]") {
  // X uniform bit, Y = X through BSC(0.11)
  JointPmf j({2, 2}, {"X", "Y"}, {0.445, 0.055, 0.055, 0.445});
  CHECK(j.rank() == 2);
  CHECK(j.at({0, 0}) == Approx(0.445));
  CHECK(j.at({0, 1}) == Approx(0.055));
  auto mx = j.marginal({0});
  CHECK(mx[0] == Approx(0.5).margin(1e-15));
  CHECK(mx[1] == Approx(0.5).margin(1e-15));
  CHECK(j.entropy_of({0}) == Approx(1.0).margin(1e-12));
  CHECK(j.entropy_of({1}) == Approx(1.0).margin(1e-12));
  CHECK(j.entropy_of({}) == 0.0);
  CHECK(j.mutual_information({0}, {1}) == Approx(0.500084041835472).margin(1e-12));

  CHECK_THROWS_MATCHES(JointPmf({2, 2}, {"X"}, {0.25, 0.25, 0.25, 0.25}), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return code_of(e) == Errc::length_mismatch; }));
  CHECK_THROWS_MATCHES(JointPmf({2, 2}, {"X", "Y"}, {0.5, 0.5}), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return code_of(e) == Errc::length_mismatch; }));
  CHECK_THROWS_MATCHES(j.mutual_information({0}, {0}), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return code_of(e) == Errc::axis_overlap; }));
  CHECK_THROWS_MATCHES(j.mutual_information({0}, {1}, {1}), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return code_of(e) == Errc::axis_overlap; }));
  CHECK_THROWS_MATCHES(j.entropy_of({2}), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return code_of(e) == Errc::out_of_range;
                       }));
}

TEST_CASE("marginal axis order is respected", "[pmf]") {
  // 2x3 joint with distinct entries; marginal({1,0}) must transpose.
  JointPmf j({2, 3}, {"A", "B"}, {0.05, 0.10, 0.15, 0.20, 0.25, 0.25});
  auto m = j.marginal({1, 0});  // axis B slow, A fast
  REQUIRE(m.size() == 6);
  CHECK(m[0] == Approx(0.05));  // B=0, A=0
  CHECK(m[1] == Approx(0.20));  // B=0, A=1
  CHECK(m[2] == Approx(0.10));  // B=1, A=0
  CHECK(m[5] == Approx(0.25));  // B=2, A=1
}

TEST_CASE("information identities on random joints", "[pmf]") {
  std::mt19937 rng(2024);
  for (int rep = 0; rep < 25; ++rep) {
    auto j = random_joint(rng, {2, 3, 2});
    const double iab = j.mutual_information({0}, {1});
    const double iba = j.mutual_information({1}, {0});
    CHECK(iab == Approx(iba).margin(1e-12));
    CHECK(iab >= -1e-12);
    CHECK(iab <= j.entropy_of({0}) + 1e-12);
    CHECK(iab <= j.entropy_of({1}) + 1e-12);
    // chain rule: I(A; B,C) = I(A; C) + I(A; B | C)
    const double lhs = j.mutual_information({0}, {1, 2});
    const double rhs = j.mutual_information({0}, {2}) + j.mutual_information({0}, {1}, {2});
    CHECK(lhs == Approx(rhs).margin(1e-12));
  }
}

TEST_CASE("two-sender field stage: exact information values", "[pmf]") {
  {
    Field f(2, 1);
    auto j = ff_mac_joint(f, 1, 1, Pmf({1.0, 0.0}));
    CHECK(j.mutual_information({0, 1}, {2}) == Approx(1.0).margin(1e-12));
    CHECK(j.mutual_information({0}, {2}, {1}) == Approx(1.0).margin(1e-12));
  }
  {
    Field f(2, 1);  // noise uniform: channel carries nothing
    auto j = ff_mac_joint(f, 1, 1, Pmf({0.5, 0.5}));
    CHECK(j.mutual_information({0, 1}, {2}) == Approx(0.0).margin(1e-12));
  }
  {
    Field f(2, 2);  // two-point noise over GF(4): one bit lost out of two
    auto j = ff_mac_joint(f, 2, 3, Pmf({0.5, 0.5, 0.0, 0.0}));
    CHECK(j.mutual_information({0, 1}, {2}) == Approx(1.0).margin(1e-12));
    CHECK(j.mutual_information({1}, {2}, {0}) == Approx(1.0).margin(1e-12));
  }
  {
    Field f(5, 1);
    auto j = ff_mac_joint(f, 2, 3, Pmf({0.6, 0.1, 0.1, 0.1, 0.1}));
    CHECK(j.mutual_information({0, 1}, {2}) == Approx(0.5509775004326936).margin(1e-12));
  }
}

TEST_CASE("uniform inputs make the pair and single-sender rates coincide", "[pmf]") {
  // With independent uniform inputs and nonzero gains, the received symbol is
  // uniform, so both I(Xi,Xj;Y) and I(Xi;Y|Xj) collapse to log2 q - H(Z).
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (auto [p, m] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
           {2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}}) {
    Field f(p, m);
    for (int rep = 0; rep < 6; ++rep) {
      std::vector<double> z(f.q());
      double s = 0.0;
      for (auto& v : z) s += (v = u(rng));
      for (auto& v : z) v /= s;
      Pmf noise(z);
      const auto gi = static_cast<felem>(1 + rng() % (f.q() - 1));
      const auto gj = static_cast<felem>(1 + rng() % (f.q() - 1));
      auto j = ff_mac_joint(f, gi, gj, noise);
      const double want = std::log2(double(f.q())) - entropy(noise);
      CHECK(j.mutual_information({0, 1}, {2}) == Approx(want).margin(1e-9));
      CHECK(j.mutual_information({0}, {2}, {1}) == Approx(want).margin(1e-9));
      CHECK(j.mutual_information({1}, {2}, {0}) == Approx(want).margin(1e-9));
      CHECK(j.entropy_of({2}) == Approx(std::log2(double(f.q()))).margin(1e-9));
    }
  }
}

TEST_CASE("field stage rejects bad arguments", "[pmf]") {
  Field f(2, 2);
  CHECK_THROWS_MATCHES(ff_mac_joint(f, 0, 1, Pmf({0.25, 0.25, 0.25, 0.25})), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return code_of(e) == Errc::zero_gain; }));
  CHECK_THROWS_MATCHES(ff_mac_joint(f, 1, 1, Pmf({0.5, 0.5})), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return code_of(e) == Errc::alphabet_mismatch; }));
}
