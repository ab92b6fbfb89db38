#pragma once
// Random codebooks, regenerable bit-identically from a seed. Every codeword
// has its own derived stream, so single codewords can be produced without
// materializing the table; the double-index book used by the relay node is
// only ever streamed, since its M^2 rows would not fit in memory at the
// larger operating points.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "threeway/errors.hpp"
#include "threeway/galois.hpp"
#include "threeway/rng.hpp"

namespace threeway {

using CMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace detail {
inline void fill_gaussian_codeword(std::uint64_t cw_seed, double power, std::size_t n,
                                   std::complex<double>* out) {
  const double s = std::sqrt(power / 2.0);
  const auto& zig = ZigguratNormal::instance();
  SplitMix64 g{cw_seed};
  for (std::size_t t = 0; t < n; ++t) {
    const double re = s * zig.sample(g);
    const double im = s * zig.sample(g);
    out[t] = {re, im};
  }
}
}  // namespace detail

// M complex Gaussian codewords of length n with per-letter E|X|^2 = power.
struct GaussianCodebook {
  std::size_t M, n;
  double power;
  std::uint64_t seed;
  CMatrix table;  // M x n

  GaussianCodebook(std::size_t M_, std::size_t n_, double power_, std::uint64_t seed_)
      : M(M_), n(n_), power(power_), seed(seed_), table(M_, n_) {
    require(M >= 1 && n >= 1, Errc::out_of_range, "codebook needs M >= 1 and n >= 1");
    require(power >= 0.0, Errc::out_of_range, "codeword power must be nonnegative");
    std::vector<std::complex<double>> buf(n);
    for (std::size_t w = 0; w < M; ++w) {
      detail::fill_gaussian_codeword(derive(seed, tag::codeword, w), power, n, buf.data());
      for (std::size_t t = 0; t < n; ++t) table(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(t)) = buf[t];
    }
  }

  auto row(std::size_t w) const { return table.row(static_cast<Eigen::Index>(w)); }
};

// The relay node's doubly indexed book: M^2 independent codewords addressed
// by (p, s). Never materialized; callers either fetch one codeword or stream
// the whole table in index order w = p*M + s.
struct DoubleIndexCodebook {
  std::size_t M, n;
  double power;
  std::uint64_t seed;

  DoubleIndexCodebook(std::size_t M_, std::size_t n_, double power_, std::uint64_t seed_)
      : M(M_), n(n_), power(power_), seed(seed_) {
    require(M >= 1 && n >= 1, Errc::out_of_range, "codebook needs M >= 1 and n >= 1");
    require(power >= 0.0, Errc::out_of_range, "codeword power must be nonnegative");
  }

  void fill(std::size_t p, std::size_t s, std::complex<double>* out) const {
    detail::fill_gaussian_codeword(derive(seed, tag::codeword, p * M + s), power, n, out);
  }

  std::vector<std::complex<double>> codeword(std::size_t p, std::size_t s) const {
    require(p < M && s < M, Errc::out_of_range, "codeword index out of range");
    std::vector<std::complex<double>> cw(n);
    fill(p, s, cw.data());
    return cw;
  }

  // f(p, s, data) for every codeword, p outer, s inner.
  template <class F>
  void stream(F&& f) const {
    std::vector<std::complex<double>> buf(n);
    for (std::size_t p = 0; p < M; ++p)
      for (std::size_t s = 0; s < M; ++s) {
        fill(p, s, buf.data());
        f(p, s, buf.data());
      }
  }
};

// Uniform codewords over GF(q).
struct FieldCodebook {
  std::size_t M, n;
  std::uint32_t q;
  std::uint64_t seed;
  std::vector<felem> table;  // M*n row-major

  FieldCodebook(std::size_t M_, std::size_t n_, std::uint32_t q_, std::uint64_t seed_)
      : M(M_), n(n_), q(q_), seed(seed_), table(M_ * n_) {
    require(M >= 1 && n >= 1, Errc::out_of_range, "codebook needs M >= 1 and n >= 1");
    require(q >= 2, Errc::out_of_range, "alphabet must have at least two symbols");
    for (std::size_t w = 0; w < M; ++w) {
      SplitMix64 g{derive(seed, tag::codeword, w)};
      for (std::size_t t = 0; t < n; ++t)
        table[w * n + t] = static_cast<felem>(uniform_index(g.next(), q));
    }
  }

  const felem* row(std::size_t w) const { return table.data() + w * n; }
};

}  // namespace threeway
