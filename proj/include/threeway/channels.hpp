#pragma once
// The two channel models: a finite-field additive-noise broadcast stage and a
// phase-fading AWGN stage. Each node transmits one symbol stream and hears
// the superposition of the other two (no self-interference term).
//
// AWGN convention: a link is parameterized by its receive SNR gamma_ij;
// the gain magnitude is derived as |G_ij| = sqrt(gamma_ij * N_j / P_i). The
// fading phases theta_ij[t] are i.i.d. uniform on [0, 2*pi), drawn fresh per
// channel use, and are made available only to the receiving side.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "threeway/errors.hpp"
#include "threeway/galois.hpp"
#include "threeway/pmf.hpp"
#include "threeway/rng.hpp"

namespace threeway {

using cvec = std::vector<std::complex<double>>;

struct FfChannelSpec {
  Field field;
  std::array<std::array<felem, 3>, 3> gain{};  // gain[i][j] = G_ij for sender i, receiver j
  std::array<Pmf, 3> noise;                    // one pmf over GF(q) per receiver

  FfChannelSpec(Field f, std::array<std::array<felem, 3>, 3> g, std::array<Pmf, 3> z)
      : field(std::move(f)), gain(g), noise(std::move(z)) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        require(gain[i][j] != 0, Errc::zero_gain, "all cross gains must be nonzero");
        field.check(gain[i][j]);
      }
    for (int j = 0; j < 3; ++j) {
      require(noise[j].size() == field.q(), Errc::alphabet_mismatch,
              "noise pmf alphabet must match field order");
      cdf_[j].resize(field.q());
      double acc = 0.0;
      for (std::size_t v = 0; v < field.q(); ++v) {
        acc += noise[j][v];
        cdf_[j][v] = acc;
      }
      cdf_[j].back() = 1.0;
    }
  }

  felem sample_noise(int receiver, double u) const {
    const auto& c = cdf_[receiver];
    std::size_t lo = 0, hi = c.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (u < c[mid])
        hi = mid;
      else
        lo = mid + 1;
    }
    return static_cast<felem>(lo);
  }

 private:
  std::array<std::vector<double>, 3> cdf_;
};

struct AwgnChannelSpec {
  std::array<std::array<double, 3>, 3> snr{};  // snr[i][j] = gamma_ij, diagonal unused
  std::array<double, 3> power{1.0, 1.0, 1.0};
  std::array<double, 3> noise_power{1.0, 1.0, 1.0};

  AwgnChannelSpec(std::array<std::array<double, 3>, 3> s, std::array<double, 3> p,
                  std::array<double, 3> np)
      : snr(s), power(p), noise_power(np) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        require(snr[i][j] > 0.0, Errc::zero_gain, "link SNRs must be positive");
      }
    for (int i = 0; i < 3; ++i) {
      require(power[i] > 0.0, Errc::out_of_range, "transmit powers must be positive");
      require(noise_power[i] > 0.0, Errc::out_of_range, "noise powers must be positive");
    }
  }

  double gain_mag(int i, int j) const { return std::sqrt(snr[i][j] * noise_power[j] / power[i]); }
};

struct ChannelClass {
  bool sender_symmetrical = false;  // both senders arrive at each receiver with the same SNR
  bool reciprocal = false;          // forward and reverse SNRs coincide for every pair
};

inline ChannelClass classify(const AwgnChannelSpec& ch, double tol = 1e-12) {
  ChannelClass c;
  c.sender_symmetrical = true;
  for (int k = 0; k < 3 && c.sender_symmetrical; ++k) {
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    if (std::abs(ch.snr[i][k] - ch.snr[j][k]) > tol) c.sender_symmetrical = false;
  }
  c.reciprocal = std::abs(ch.snr[0][1] - ch.snr[1][0]) <= tol &&
                 std::abs(ch.snr[0][2] - ch.snr[2][0]) <= tol &&
                 std::abs(ch.snr[1][2] - ch.snr[2][1]) <= tol;
  return c;
}

// Per-receiver slice of a block's fading phases. Decoders only ever see one
// of these, never the full realization.
struct ReceiverPhases {
  int receiver = -1;
  std::array<const std::vector<double>*, 3> from{};  // from[i] for sender i, null when i == receiver

  const std::vector<double>& sender(int i) const {
    require(i != receiver && from[i] != nullptr, Errc::out_of_range, "no phases for this sender");
    return *from[i];
  }
};

struct PhaseRealization {
  // theta[i][j][t] for the ordered pair sender i -> receiver j.
  std::array<std::array<std::vector<double>, 3>, 3> theta;

  ReceiverPhases view(int receiver) const {
    require(receiver >= 0 && receiver < 3, Errc::out_of_range, "receiver index");
    ReceiverPhases v;
    v.receiver = receiver;
    for (int i = 0; i < 3; ++i)
      if (i != receiver) v.from[i] = &theta[i][receiver];
    return v;
  }
};

// Test-only override: pin the fading phases per ordered pair and/or silence
// the additive noise. Production paths never install a hook.
struct TransmitHook {
  std::optional<std::array<std::array<double, 3>, 3>> fixed_phase;
  bool zero_noise = false;
};

struct AwgnTransmitResult {
  std::array<cvec, 3> y;
  PhaseRealization phases;
};

namespace detail {
inline void check_equal_lengths(std::size_t a, std::size_t b, std::size_t c) {
  require(a == b && b == c, Errc::length_mismatch, "input blocks must have equal length");
  require(a > 0, Errc::empty_input, "empty input block");
}
}  // namespace detail

// One block through the phase-fading AWGN stage. Draws are keyed off
// block_seed by (purpose, pair or receiver, t), so a block is reproducible in
// isolation.
inline AwgnTransmitResult awgn_transmit(const AwgnChannelSpec& ch, const cvec& x1, const cvec& x2,
                                        const cvec& x3, std::uint64_t block_seed,
                                        const TransmitHook* hook = nullptr) {
  detail::check_equal_lengths(x1.size(), x2.size(), x3.size());
  const std::size_t n = x1.size();
  const std::array<const cvec*, 3> x{&x1, &x2, &x3};

  AwgnTransmitResult out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) out.phases.theta[i][j].resize(n);

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      auto& th = out.phases.theta[i][j];
      const std::uint64_t pair_code = static_cast<std::uint64_t>(i) * 3 + j;
      for (std::size_t t = 0; t < n; ++t)
        th[t] = (hook && hook->fixed_phase) ? (*hook->fixed_phase)[i][j]
                                            : kTwoPi * unit53(derive(block_seed, tag::phase, pair_code, t));
    }

  for (int j = 0; j < 3; ++j) {
    out.y[j].assign(n, {0.0, 0.0});
    const double sigma = std::sqrt(ch.noise_power[j] / 2.0);
    for (std::size_t t = 0; t < n; ++t) {
      std::complex<double> acc{0.0, 0.0};
      for (int i = 0; i < 3; ++i) {
        if (i == j) continue;
        const double a = ch.gain_mag(i, j);
        const double th = out.phases.theta[i][j][t];
        acc += std::polar(a, th) * (*x[i])[t];
      }
      if (!(hook && hook->zero_noise)) {
        const auto [re, im] = box_muller(derive(block_seed, tag::noise, static_cast<std::uint64_t>(j), t, 0),
                                         derive(block_seed, tag::noise, static_cast<std::uint64_t>(j), t, 1));
        acc += std::complex<double>(sigma * re, sigma * im);
      }
      out.y[j][t] = acc;
    }
  }
  return out;
}

// One block through the finite-field stage: y_j[t] = sum_i G_ij x_i[t] + Z_j[t].
inline std::array<std::vector<felem>, 3> ff_transmit(const FfChannelSpec& ch,
                                                     const std::vector<felem>& x1,
                                                     const std::vector<felem>& x2,
                                                     const std::vector<felem>& x3,
                                                     std::uint64_t block_seed) {
  detail::check_equal_lengths(x1.size(), x2.size(), x3.size());
  const std::size_t n = x1.size();
  const std::array<const std::vector<felem>*, 3> x{&x1, &x2, &x3};
  const Field& f = ch.field;

  std::array<std::vector<felem>, 3> y;
  for (int j = 0; j < 3; ++j) {
    y[j].resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      felem acc = 0;
      for (int i = 0; i < 3; ++i) {
        if (i == j) continue;
        acc = f.add(acc, f.mul(ch.gain[i][j], (*x[i])[t]));
      }
      const double u = unit53(derive(block_seed, tag::noise, static_cast<std::uint64_t>(j), t));
      y[j][t] = f.add(acc, ch.sample_noise(j, u));
    }
  }
  return y;
}

inline double avg_power(const cvec& x) {
  require(!x.empty(), Errc::empty_input, "average power of empty block");
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return s / static_cast<double>(x.size());
}

}  // namespace threeway
