#pragma once
// GF(p^m) arithmetic for prime-power orders up to 2^16.
//
// Elements are integers in [0, q) holding the base-p digit packing of the
// polynomial representation (for m = 1 this is just the residue mod p).
// Multiplication and inversion go through exp/log tables over a fixed
// primitive element; the reduction polynomial is the monic irreducible of
// degree m whose non-leading coefficient word has the smallest base-p
// integer encoding, so field construction is fully deterministic.

#include <cstdint>
#include <string>
#include <vector>

#include "threeway/errors.hpp"

namespace threeway {

using felem = std::uint16_t;

namespace detail {

inline bool is_prime(std::uint32_t p) {
  if (p < 2) return false;
  for (std::uint32_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// Polynomials over GF(p), coefficients ascending in degree.
using Poly = std::vector<std::uint32_t>;

inline void poly_trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly poly_mul(const Poly& a, const Poly& b, std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  poly_trim(r);
  return r;
}

// Remainder of a modulo monic divisor d.
inline Poly poly_mod(Poly a, const Poly& d, std::uint32_t p) {
  poly_trim(a);
  const std::size_t dd = d.size() - 1;
  while (a.size() > dd) {
    const std::uint32_t c = a.back();
    const std::size_t shift = a.size() - 1 - dd;
    if (c != 0)
      for (std::size_t i = 0; i < dd; ++i)
        a[shift + i] = (a[shift + i] + (p - c * d[i] % p)) % p;
    a.pop_back();
    poly_trim(a);
  }
  return a;
}

}  // namespace detail

class Field {
 public:
  Field(std::uint32_t p, std::uint32_t m) : p_(p), m_(m) {
    require(m >= 1, Errc::out_of_range, "field extension degree must be >= 1");
    require(detail::is_prime(p), Errc::not_prime, "field characteristic " + std::to_string(p) + " is not prime");
    std::uint64_t q = 1;
    for (std::uint32_t i = 0; i < m; ++i) {
      q *= p;
      require(q <= 65536, Errc::order_too_large, "field order exceeds 2^16");
    }
    q_ = static_cast<std::uint32_t>(q);
    if (m_ > 1) find_reduction_poly();
    build_tables();
  }

  std::uint32_t p() const { return p_; }
  std::uint32_t m() const { return m_; }
  std::uint32_t q() const { return q_; }

  // Coefficients of the reduction polynomial, ascending degree, length m+1.
  // Empty for prime fields.
  const std::vector<std::uint32_t>& reduction_poly() const { return redpoly_; }

  const std::vector<felem>& exp_table() const { return exp_; }
  const std::vector<felem>& log_table() const { return log_; }
  felem generator() const { return generator_; }

  bool valid(std::uint32_t v) const { return v < q_; }

  void check(std::uint32_t v) const {
    require(v < q_, Errc::out_of_range, "value " + std::to_string(v) + " outside GF(" + std::to_string(q_) + ")");
  }

  felem add(felem a, felem b) const {
    if (m_ == 1) return static_cast<felem>((a + b) % p_);
    if (p_ == 2) return static_cast<felem>(a ^ b);
    felem r = 0;
    std::uint32_t mult = 1;
    std::uint32_t x = a, y = b;
    for (std::uint32_t i = 0; i < m_; ++i) {
      r = static_cast<felem>(r + (x % p_ + y % p_) % p_ * mult);
      x /= p_;
      y /= p_;
      mult *= p_;
    }
    return r;
  }

  felem neg(felem a) const {
    if (m_ == 1) return static_cast<felem>((p_ - a) % p_);
    if (p_ == 2) return a;
    felem r = 0;
    std::uint32_t mult = 1;
    std::uint32_t x = a;
    for (std::uint32_t i = 0; i < m_; ++i) {
      r = static_cast<felem>(r + (p_ - x % p_) % p_ * mult);
      x /= p_;
      mult *= p_;
    }
    return r;
  }

  felem sub(felem a, felem b) const { return add(a, neg(b)); }

  felem mul(felem a, felem b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[(static_cast<std::uint32_t>(log_[a]) + log_[b]) % (q_ - 1)];
  }

  felem inv(felem a) const {
    require(a != 0, Errc::division_by_zero, "inverse of zero");
    return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
  }

  felem pow(felem a, std::uint64_t e) const {
    if (a == 0) return e == 0 ? felem{1} : felem{0};
    return exp_[static_cast<std::size_t>((static_cast<std::uint64_t>(log_[a]) * (e % (q_ - 1))) % (q_ - 1))];
  }

 private:
  // Product in the polynomial representation; only needed while the exp/log
  // tables are under construction.
  felem mul_slow(felem a, felem b) const {
    if (m_ == 1) return static_cast<felem>(static_cast<std::uint32_t>(a) * b % p_);
    detail::Poly pa = unpack(a), pb = unpack(b);
    return pack(detail::poly_mod(detail::poly_mul(pa, pb, p_), redpoly_, p_));
  }

  detail::Poly unpack(std::uint32_t v) const {
    detail::Poly c(m_, 0);
    for (std::uint32_t i = 0; i < m_; ++i) {
      c[i] = v % p_;
      v /= p_;
    }
    detail::poly_trim(c);
    return c;
  }

  felem pack(const detail::Poly& c) const {
    std::uint32_t v = 0, mult = 1;
    for (std::size_t i = 0; i < c.size(); ++i) {
      v += c[i] * mult;
      mult *= p_;
    }
    return static_cast<felem>(v);
  }

  bool is_irreducible(const detail::Poly& f) const {
    // Trial division by every monic polynomial of degree 1..m/2. Cheap at
    // these orders (p^(m/2) <= 256 candidates per degree).
    for (std::uint32_t deg = 1; 2 * deg <= m_; ++deg) {
      std::uint64_t count = 1;
      for (std::uint32_t i = 0; i < deg; ++i) count *= p_;
      for (std::uint64_t k = 0; k < count; ++k) {
        detail::Poly d(deg + 1, 0);
        std::uint64_t v = k;
        for (std::uint32_t i = 0; i < deg; ++i) {
          d[i] = static_cast<std::uint32_t>(v % p_);
          v /= p_;
        }
        d[deg] = 1;
        if (detail::poly_mod(f, d, p_).empty()) return false;
      }
    }
    return true;
  }

  void find_reduction_poly() {
    for (std::uint32_t k = 0; k < q_; ++k) {
      detail::Poly f(m_ + 1, 0);
      std::uint32_t v = k;
      for (std::uint32_t i = 0; i < m_; ++i) {
        f[i] = v % p_;
        v /= p_;
      }
      f[m_] = 1;
      if (is_irreducible(f)) {
        redpoly_ = f;
        return;
      }
    }
    fail(Errc::no_irreducible_polynomial, "no irreducible polynomial found");  // unreachable for valid p, m
  }

  void build_tables() {
    // Prime factors of the multiplicative group order.
    std::vector<std::uint32_t> factors;
    std::uint32_t rem = q_ - 1;
    for (std::uint32_t d = 2; d * d <= rem; ++d) {
      if (rem % d == 0) {
        factors.push_back(d);
        while (rem % d == 0) rem /= d;
      }
    }
    if (rem > 1) factors.push_back(rem);

    auto pow_slow = [&](felem a, std::uint32_t e) {
      felem r = 1, base = a;
      while (e) {
        if (e & 1) r = mul_slow(r, base);
        base = mul_slow(base, base);
        e >>= 1;
      }
      return r;
    };

    generator_ = 0;
    for (std::uint32_t g = 1; g < q_; ++g) {
      bool ok = true;
      for (std::uint32_t f : factors)
        if (pow_slow(static_cast<felem>(g), (q_ - 1) / f) == 1) {
          ok = false;
          break;
        }
      if (ok) {
        generator_ = static_cast<felem>(g);
        break;
      }
    }
    require(generator_ != 0 || q_ == 2, Errc::internal, "no primitive element found");
    if (q_ == 2) generator_ = 1;

    exp_.assign(q_, 0);
    log_.assign(q_, 0);
    felem cur = 1;
    for (std::uint32_t i = 0; i + 1 < q_; ++i) {
      exp_[i] = cur;
      log_[cur] = static_cast<felem>(i);
      cur = mul_slow(cur, generator_);
    }
    require(cur == 1, Errc::internal, "generator order mismatch");
    exp_[q_ - 1] = 1;  // wraps; mul() reduces indices mod q-1 so this slot is a convenience only
  }

  std::uint32_t p_, m_, q_ = 0;
  std::vector<std::uint32_t> redpoly_;
  std::vector<felem> exp_, log_;
  felem generator_ = 0;
};

}  // namespace threeway
