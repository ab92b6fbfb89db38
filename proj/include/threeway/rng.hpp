#pragma once
// Deterministic randomness for the simulators.
//
// Every draw in a simulation is reproducible from the 64-bit master seed and
// an explicit key tuple (trial, block, purpose, index, position), so results
// cannot depend on thread scheduling. The derivation chain is fixed and
// documented here byte-exactly:
//
//   finalize64(z): z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9;
//                  z ^= z >> 27;  z *= 0x94D049BB133111EB;  z ^= z >> 31
//   chain(h, w)  = finalize64((h + 0x9E3779B97F4A7C15) ^ w)
//   derive(seed, w0, w1, ...) = chain(chain(chain(seed, w0), w1), ...)
//
// Counter-indexed draws (channel noise, fading phases) hash their full key
// tuple through derive(). Bulk draws (codebook sampling) run a SplitMix64
// stream seeded per codeword, which keeps codewords individually addressable
// while staying fast. Uniform doubles take the top 53 bits of a 64-bit word.

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

namespace threeway {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t finalize64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t chain(std::uint64_t h, std::uint64_t w) {
  return finalize64((h + kGolden) ^ w);
}

template <class... W>
constexpr std::uint64_t derive(std::uint64_t seed, W... words) {
  std::uint64_t h = seed;
  ((h = chain(h, static_cast<std::uint64_t>(words))), ...);
  return h;
}

// Stream tags keep the key spaces of unrelated draw families disjoint.
namespace tag {
inline constexpr std::uint64_t trial = 1;
inline constexpr std::uint64_t block = 2;
inline constexpr std::uint64_t codebook = 3;
inline constexpr std::uint64_t codeword = 4;
inline constexpr std::uint64_t noise = 5;
inline constexpr std::uint64_t phase = 6;
inline constexpr std::uint64_t message = 7;
inline constexpr std::uint64_t table_u = 8;
inline constexpr std::uint64_t table_v = 9;
}  // namespace tag

struct SplitMix64 {
  std::uint64_t state = 0;

  constexpr std::uint64_t next() {
    state += kGolden;
    return finalize64(state);
  }
};

// Uniform in [0, 1) with 53-bit resolution.
inline double unit53(std::uint64_t u) { return static_cast<double>(u >> 11) * 0x1.0p-53; }

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Standard normal pair from two independent 64-bit words. Used for the
// counter-indexed channel noise where each (receiver, t) pair must map to a
// fixed value regardless of evaluation order.
inline std::pair<double, double> box_muller(std::uint64_t ua, std::uint64_t ub) {
  const double r = std::sqrt(-2.0 * std::log(1.0 - unit53(ua)));
  const double ph = kTwoPi * unit53(ub);
  return {r * std::cos(ph), r * std::sin(ph)};
}

// Ziggurat sampler for the standard normal, used for bulk codebook
// generation. Layer tables are solved at startup: the right edge R of the
// base layer is the root of the closure condition f(e_255) = 1 under the
// equal-area recursion, found by bisection, so there are no hard-coded
// constants to get subtly wrong. Layout of the consumed random word:
// bits 0-7 layer index, bit 8 sign, bits 11-63 the uniform mantissa.
class ZigguratNormal {
 public:
  static const ZigguratNormal& instance() {
    static const ZigguratNormal z;
    return z;
  }

  double sample(SplitMix64& g) const {
    for (;;) {
      const std::uint64_t bits = g.next();
      const int j = static_cast<int>(bits & 0xFF);
      const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
      const double sign = (bits & 0x100) ? -1.0 : 1.0;
      if (j == 0) {
        const double x = u * base_width_;
        if (x < r_) return sign * x;
        return sign * tail(g);
      }
      const double x = u * edge_[j - 1];
      if (x < edge_[j]) return sign * x;
      const double v = unit53(g.next());
      const double fx = std::exp(-0.5 * x * x);
      if (height_[j - 1] + v * (height_[j] - height_[j - 1]) < fx) return sign * x;
    }
  }

  double r() const { return r_; }

 private:
  static constexpr int kLayers = 256;

  ZigguratNormal() {
    double lo = 3.0, hi = 4.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (closure_residual(mid) > 0.0)
        lo = mid;  // overshoot: layer area too large, push R up
      else
        hi = mid;
    }
    r_ = 0.5 * (lo + hi);
    build_tables(r_);
  }

  static double f(double x) { return std::exp(-0.5 * x * x); }

  static double tail_area(double r) {
    return std::sqrt(kTwoPi / 4.0) * std::erfc(r / std::sqrt(2.0));
  }

  // Residual of the closure condition after walking all layers up from R;
  // decreasing in R, so a plain bisection finds the root.
  static double closure_residual(double r) {
    const double v = r * f(r) + tail_area(r);
    double fi = f(r);
    double ei = r;
    for (int i = 1; i < kLayers; ++i) {
      fi += v / ei;
      if (fi >= 1.0) return (i == kLayers - 1) ? fi - 1.0 : 1.0;
      if (i < kLayers - 1) ei = std::sqrt(-2.0 * std::log(fi));
    }
    return fi - 1.0;
  }

  void build_tables(double r) {
    v_ = r * f(r) + tail_area(r);
    edge_[0] = r;
    height_[0] = f(r);
    for (int i = 1; i < kLayers; ++i) {
      height_[i] = height_[i - 1] + v_ / edge_[i - 1];
      edge_[i] = (i == kLayers - 1) ? 0.0 : std::sqrt(-2.0 * std::log(height_[i]));
    }
    height_[kLayers - 1] = 1.0;
    base_width_ = v_ / f(r);
  }

  // Marsaglia's exponential-rejection sampler for the region x > R.
  double tail(SplitMix64& g) const {
    for (;;) {
      const double u1 = 1.0 - unit53(g.next());
      const double u2 = 1.0 - unit53(g.next());
      const double xt = -std::log(u1) / r_;
      const double y = -std::log(u2);
      if (y + y > xt * xt) return r_ + xt;
    }
  }

  std::array<double, kLayers> edge_{};    // edge_[i] = right edge of layer i+1; edge_[255] = 0
  std::array<double, kLayers> height_{};  // height_[i] = f(edge_[i]); height_[255] = 1
  double base_width_ = 0.0;               // horizontal width used when sampling the base layer
  double r_ = 0.0;
  double v_ = 0.0;
};

// Uniform integer in [0, m). Bias is O(m / 2^53), negligible for the message
// and alphabet sizes used here.
inline std::uint64_t uniform_index(std::uint64_t word, std::uint64_t m) {
  return static_cast<std::uint64_t>(unit53(word) * static_cast<double>(m));
}

}  // namespace threeway
