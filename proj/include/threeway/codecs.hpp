#pragma once
// Coding schemes for the three-way channel and their maximum-likelihood
// decoders.
//
// Baseline ("non-cooperative"): every node transmits an independent random
// codeword once; each receiver jointly ML-decodes the two incoming messages,
// i.e. solves a two-user MAC.
//
// Cooperative scheme: B messages per node are sent over B+1 blocks. Nodes 2
// and 3 transmit fresh codewords each block; node 1 decodes both incoming
// messages on the fly and, one block later, transmits a codeword indexed by
// its own message together with the modular sum of the two it just decoded
// (either from a doubly indexed book with M^2 entries or as a superposition
// of two layered books). Nodes 2 and 3 decode backwards from the last block:
// at step b the pair (w1^b, w_other^b) is resolved jointly from block b+1
// (where node 1's codeword pins both, given the receiver's own message) and
// block b (where the other node's codeword is heard directly and node 1's
// still-undecoded signal is treated as Gaussian noise).
//
// Ties in ML metrics are broken toward the lexicographically smallest
// hypothesis and flagged; a flagged decode counts as an error, since any tie
// among distinct hypotheses includes a wrong one.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "threeway/channels.hpp"
#include "threeway/codebook.hpp"
#include "threeway/errors.hpp"
#include "threeway/regions.hpp"

namespace threeway {

// Index carried by node 1 for the pair (w2, w3): their sum mod M. Either
// recipient can strip its own message back out.
inline std::size_t nc_modsum(std::size_t w2, std::size_t w3, std::size_t M) {
  require(M >= 1, Errc::out_of_range, "message count must be positive");
  require(w2 < M && w3 < M, Errc::out_of_range, "message index out of range");
  return (w2 + w3) % M;
}

struct MacDecodeResult {
  std::size_t wi = 0, wj = 0;
  double metric = 0.0;           // optimum of the decoder's objective
  bool tie = false;
  std::size_t tie_wi = 0, tie_wj = 0;  // second-smallest tied hypothesis, valid when tie
};

namespace detail {

// Tracks the two lexicographically smallest argmins of a running minimum, so
// tie reporting does not depend on scan order.
struct PairArgmin {
  double best = std::numeric_limits<double>::infinity();
  std::size_t bp = 0, bq = 0;
  bool tie = false;
  std::size_t sp = 0, sq = 0;

  void offer(double m, std::size_t p, std::size_t q) {
    if (m < best) {
      best = m;
      bp = p;
      bq = q;
      tie = false;
    } else if (m == best) {
      if (std::pair(p, q) < std::pair(bp, bq)) {
        if (!tie || std::pair(bp, bq) < std::pair(sp, sq)) {
          sp = bp;
          sq = bq;
        }
        bp = p;
        bq = q;
      } else if (!tie || std::pair(p, q) < std::pair(sp, sq)) {
        sp = p;
        sq = q;
      }
      tie = true;
    }
  }

  MacDecodeResult result() const { return {bp, bq, best, tie, sp, sq}; }
};

// Wrongness of a decode under the tie rule. When the reported hypothesis is
// correct but tied, the tied alternative decides which components count as
// wrong.
inline std::pair<bool, bool> decode_wrongness(const MacDecodeResult& r, std::size_t truth_i,
                                              std::size_t truth_j) {
  bool wi = r.wi != truth_i, wj = r.wj != truth_j;
  if (!wi && !wj && r.tie) {
    wi = r.tie_wi != truth_i;
    wj = r.tie_wj != truth_j;
  }
  return {wi, wj};
}

}  // namespace detail

// Joint ML decode of (w_i, w_j) from y = g_i x_i + g_j x_j + z over GF(q).
// Exhaustive over hypothesis pairs with branch-and-bound pruning: the
// per-symbol log-probabilities are nonpositive, so a partial sum strictly
// below the incumbent can be abandoned.
inline MacDecodeResult decode_mac_ff(const Field& f, felem g_i, felem g_j, const Pmf& noise,
                                     const FieldCodebook& cb_i, const FieldCodebook& cb_j,
                                     const std::vector<felem>& y) {
  require(g_i != 0 && g_j != 0, Errc::zero_gain, "channel gains must be nonzero");
  require(noise.size() == f.q(), Errc::alphabet_mismatch, "noise pmf alphabet must match field order");
  require(cb_i.q == f.q() && cb_j.q == f.q(), Errc::alphabet_mismatch, "codebook alphabet mismatch");
  require(cb_i.n == cb_j.n && y.size() == cb_i.n, Errc::length_mismatch, "block length mismatch");
  const std::size_t n = y.size();

  std::vector<double> logp(f.q());
  for (std::size_t v = 0; v < f.q(); ++v)
    logp[v] = noise[v] > 0.0 ? std::log(noise[v]) : -std::numeric_limits<double>::infinity();

  auto scale = [&](const FieldCodebook& cb, felem g) {
    std::vector<felem> s(cb.M * n);
    for (std::size_t w = 0; w < cb.M; ++w)
      for (std::size_t t = 0; t < n; ++t) s[w * n + t] = f.mul(g, cb.row(w)[t]);
    return s;
  };
  const std::vector<felem> si = scale(cb_i, g_i);
  const std::vector<felem> sj = scale(cb_j, g_j);

  detail::PairArgmin acc;
  std::vector<felem> yi(n);
  for (std::size_t wi = 0; wi < cb_i.M; ++wi) {
    for (std::size_t t = 0; t < n; ++t) yi[t] = f.sub(y[t], si[wi * n + t]);
    for (std::size_t wj = 0; wj < cb_j.M; ++wj) {
      const felem* row = sj.data() + wj * n;
      double m = 0.0;
      bool pruned = false;
      for (std::size_t t = 0; t < n; ++t) {
        m += logp[f.sub(yi[t], row[t])];
        if (-m > acc.best) {  // cannot reach or tie the incumbent any more
          pruned = true;
          break;
        }
      }
      if (!pruned) acc.offer(-m, wi, wj);
    }
  }
  return acc.result();
}

struct AwgnMacParams {
  double a_i = 0.0, a_j = 0.0;          // gain magnitudes into this receiver
  const std::vector<double>* th_i = nullptr;  // fading phases, sender i -> receiver
  const std::vector<double>* th_j = nullptr;
};

// Joint ML decode of (w_i, w_j) from y = a_i e^{i th_i} x_i + a_j e^{i th_j} x_j + z.
// The squared distance splits as |y - A_i|^2 + |A_j|^2 - 2 Re <y - A_i, A_j>,
// so the pair scan reduces to one complex matrix product evaluated in row
// blocks.
inline MacDecodeResult decode_mac_awgn(const AwgnMacParams& prm, const GaussianCodebook& cb_i,
                                       const GaussianCodebook& cb_j, const cvec& y) {
  require(cb_i.n == cb_j.n && y.size() == cb_i.n, Errc::length_mismatch, "block length mismatch");
  require(prm.th_i && prm.th_j, Errc::empty_input, "phase views required");
  require(prm.th_i->size() == y.size() && prm.th_j->size() == y.size(), Errc::length_mismatch,
          "phase track length mismatch");
  const auto n = static_cast<Eigen::Index>(y.size());
  const auto Mi = static_cast<Eigen::Index>(cb_i.M);
  const auto Mj = static_cast<Eigen::Index>(cb_j.M);

  Eigen::VectorXcd rot_i(n), rot_j(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    rot_i(t) = std::polar(prm.a_i, (*prm.th_i)[static_cast<std::size_t>(t)]);
    rot_j(t) = std::polar(prm.a_j, (*prm.th_j)[static_cast<std::size_t>(t)]);
  }

  CMatrix U = (-(cb_i.table * rot_i.asDiagonal())).eval();
  for (Eigen::Index w = 0; w < Mi; ++w)
    for (Eigen::Index t = 0; t < n; ++t) U(w, t) += y[static_cast<std::size_t>(t)];
  const CMatrix V = cb_j.table * rot_j.asDiagonal();

  const Eigen::VectorXd un = U.rowwise().squaredNorm();
  const Eigen::VectorXd vn = V.rowwise().squaredNorm();

  detail::PairArgmin acc;
  constexpr Eigen::Index kChunk = 256;
  Eigen::MatrixXcd g;
  for (Eigen::Index r0 = 0; r0 < Mi; r0 += kChunk) {
    const Eigen::Index rc = std::min(kChunk, Mi - r0);
    g.noalias() = U.middleRows(r0, rc) * V.adjoint();
    for (Eigen::Index r = 0; r < rc; ++r)
      for (Eigen::Index c = 0; c < Mj; ++c)
        acc.offer(un(r0 + r) + vn(c) - 2.0 * g(r, c).real(), static_cast<std::size_t>(r0 + r),
                  static_cast<std::size_t>(c));
  }
  return acc.result();
}

// ---------------------------------------------------------------------------
// Non-cooperative baseline.

struct NoncoopTrial {
  std::array<std::size_t, 3> w{};               // transmitted message per node
  std::array<MacDecodeResult, 3> decode{};      // decode[k]: receiver k, (wi, wj) with i < j
  std::array<std::array<bool, 3>, 3> pair_error{};  // [receiver][source]
  bool any_error = false;
};

namespace detail {

inline void noncoop_account(NoncoopTrial& trial) {
  for (int k = 0; k < 3; ++k) {
    const int i = k == 0 ? 1 : 0;
    const int j = k == 2 ? 1 : 2;
    const auto [wrong_i, wrong_j] =
        decode_wrongness(trial.decode[k], trial.w[static_cast<std::size_t>(i)], trial.w[static_cast<std::size_t>(j)]);
    trial.pair_error[k][i] = wrong_i;
    trial.pair_error[k][j] = wrong_j;
    trial.any_error = trial.any_error || wrong_i || wrong_j;
  }
}

}  // namespace detail

// One trial of the baseline on the finite-field channel: fresh codebooks and
// messages, one block, each receiver solves its MAC.
inline NoncoopTrial run_noncoop(const FfChannelSpec& ch, const std::array<std::size_t, 3>& M,
                                std::size_t n, std::uint64_t trial_seed) {
  require(n >= 1, Errc::out_of_range, "block length must be positive");
  const std::uint32_t q = ch.field.q();
  std::vector<FieldCodebook> cb;
  cb.reserve(3);
  NoncoopTrial trial;
  for (int i = 0; i < 3; ++i) {
    require(M[i] >= 1, Errc::out_of_range, "codebook size must be positive");
    cb.emplace_back(M[i], n, q, derive(trial_seed, tag::codebook, i + 1, 1));
    trial.w[i] = uniform_index(derive(trial_seed, tag::message, i + 1, 1), M[i]);
  }
  std::array<std::vector<felem>, 3> x;
  for (int i = 0; i < 3; ++i)
    x[i].assign(cb[i].row(trial.w[i]), cb[i].row(trial.w[i]) + n);

  const auto y = ff_transmit(ch, x[0], x[1], x[2], derive(trial_seed, tag::block, 1));

  for (int k = 0; k < 3; ++k) {
    const int i = k == 0 ? 1 : 0;
    const int j = k == 2 ? 1 : 2;
    trial.decode[k] = decode_mac_ff(ch.field, ch.gain[i][k], ch.gain[j][k], ch.noise[k], cb[i], cb[j], y[k]);
  }
  detail::noncoop_account(trial);
  return trial;
}

// Same trial on the phase-fading AWGN channel.
inline NoncoopTrial run_noncoop(const AwgnChannelSpec& ch, const std::array<std::size_t, 3>& M,
                                std::size_t n, std::uint64_t trial_seed) {
  require(n >= 1, Errc::out_of_range, "block length must be positive");
  std::vector<GaussianCodebook> cb;
  cb.reserve(3);
  NoncoopTrial trial;
  for (int i = 0; i < 3; ++i) {
    require(M[i] >= 1, Errc::out_of_range, "codebook size must be positive");
    cb.emplace_back(M[i], n, ch.power[i], derive(trial_seed, tag::codebook, i + 1, 1));
    trial.w[i] = uniform_index(derive(trial_seed, tag::message, i + 1, 1), M[i]);
  }
  cvec x1(cb[0].row(trial.w[0]).begin(), cb[0].row(trial.w[0]).end());
  cvec x2(cb[1].row(trial.w[1]).begin(), cb[1].row(trial.w[1]).end());
  cvec x3(cb[2].row(trial.w[2]).begin(), cb[2].row(trial.w[2]).end());

  const auto res = awgn_transmit(ch, x1, x2, x3, derive(trial_seed, tag::block, 1));

  for (int k = 0; k < 3; ++k) {
    const int i = k == 0 ? 1 : 0;
    const int j = k == 2 ? 1 : 2;
    const auto view = res.phases.view(k);
    AwgnMacParams prm{ch.gain_mag(i, k), ch.gain_mag(j, k), &view.sender(i), &view.sender(j)};
    trial.decode[k] = decode_mac_awgn(prm, cb[i], cb[j], res.y[k]);
  }
  detail::noncoop_account(trial);
  return trial;
}

// ---------------------------------------------------------------------------
// Cooperative scheme.

enum class CoopScheme { double_index, superposition };

struct CoopBlockRecord {
  std::size_t x1_p = 0, x1_s = 0;  // node 1 transmit indices (own message, relayed sum)
  std::size_t x2_w = 0, x3_w = 0;
  MacDecodeResult node1;  // node 1's forward MAC decode, valid for b <= B
};

struct CoopBackRecord {
  MacDecodeResult decode;  // (p, q) = (w1 hypothesis, other node's message hypothesis)
  bool wrong_p = false, wrong_q = false;
};

struct ProtocolTrace {
  std::size_t M = 0, n = 0;
  int B = 0;
  CoopScheme scheme = CoopScheme::double_index;
  double alpha = 1.0;

  std::vector<std::size_t> w1, w2, w3;  // true messages, entry b-1 for block b
  std::vector<CoopBlockRecord> blocks;  // length B+1
  std::vector<CoopBackRecord> back2, back3;  // backward decodes, entry b-1 for step b

  std::vector<std::size_t> w2_at1, w3_at1;  // node 1's running estimates
  std::vector<std::size_t> w1_at2, w3_at2;  // node 2's backward estimates
  std::vector<std::size_t> w1_at3, w2_at3;  // node 3's backward estimates

  std::array<std::array<bool, 3>, 3> pair_error{};  // [receiver][source], any block
  bool any_error = false;
  int wrong_p = 0, wrong_q = 0, wrong_both = 0;  // backward failure classes, nodes 2 and 3
  std::array<double, 3> symbol_power{};          // empirical per-node mean |x|^2 over the run

  std::array<std::vector<cvec>, 3> signals;  // transmitted blocks per node, kept on request
};

// One full run of the cooperative protocol. alpha is the fresh-data power
// fraction and only read by the superposition variant.
inline ProtocolTrace run_coop(const AwgnChannelSpec& ch, std::size_t M, std::size_t n, int B,
                              CoopScheme scheme, double alpha, std::uint64_t trial_seed,
                              bool keep_signals = false) {
  require(M >= 1, Errc::out_of_range, "message count must be positive");
  require(n >= 1, Errc::out_of_range, "block length must be positive");
  require(B >= 1, Errc::out_of_range, "need at least one message block");
  if (scheme == CoopScheme::superposition)
    require(alpha >= 0.0 && alpha <= 1.0, Errc::alpha_out_of_range, "alpha must lie in [0, 1]");

  ProtocolTrace tr;
  tr.M = M;
  tr.n = n;
  tr.B = B;
  tr.scheme = scheme;
  tr.alpha = scheme == CoopScheme::superposition ? alpha : 1.0;

  const int nb = B + 1;
  tr.w1.resize(B);
  tr.w2.resize(B);
  tr.w3.resize(B);
  for (int b = 1; b <= B; ++b) {
    tr.w1[b - 1] = uniform_index(derive(trial_seed, tag::message, 1, b), M);
    tr.w2[b - 1] = uniform_index(derive(trial_seed, tag::message, 2, b), M);
    tr.w3[b - 1] = uniform_index(derive(trial_seed, tag::message, 3, b), M);
  }

  std::vector<GaussianCodebook> cb2, cb3, cbu, cbv;
  std::vector<DoubleIndexCodebook> cb1;
  cb2.reserve(nb);
  cb3.reserve(nb);
  for (int b = 1; b <= nb; ++b) {
    cb2.emplace_back(M, n, ch.power[1], derive(trial_seed, tag::codebook, 2, b));
    cb3.emplace_back(M, n, ch.power[2], derive(trial_seed, tag::codebook, 3, b));
    const std::uint64_t seed1 = derive(trial_seed, tag::codebook, 1, b);
    if (scheme == CoopScheme::double_index) {
      cb1.emplace_back(M, n, ch.power[0], seed1);
    } else {
      cbu.emplace_back(M, n, alpha * ch.power[0], derive(seed1, tag::table_u));
      cbv.emplace_back(M, n, (1.0 - alpha) * ch.power[0], derive(seed1, tag::table_v));
    }
  }

  auto x1_codeword = [&](int b, std::size_t p, std::size_t s) {
    if (scheme == CoopScheme::double_index) return cb1[b - 1].codeword(p, s);
    cvec x(n);
    for (std::size_t t = 0; t < n; ++t)
      x[t] = cbu[b - 1].table(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(t)) +
             cbv[b - 1].table(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t));
    return x;
  };

  // Forward pass: everyone transmits, node 1 decodes each block as it lands.
  tr.blocks.resize(nb);
  tr.w2_at1.assign(B, 0);
  tr.w3_at1.assign(B, 0);
  std::vector<AwgnTransmitResult> rx(nb);
  for (int b = 1; b <= nb; ++b) {
    auto& blk = tr.blocks[b - 1];
    if (b > 1) {
      blk.x1_p = tr.w1[b - 2];
      blk.x1_s = (tr.w2_at1[b - 2] + tr.w3_at1[b - 2]) % M;
    }
    blk.x2_w = b <= B ? tr.w2[b - 1] : 0;
    blk.x3_w = b <= B ? tr.w3[b - 1] : 0;

    const cvec x1 = x1_codeword(b, blk.x1_p, blk.x1_s);
    cvec x2(cb2[b - 1].row(blk.x2_w).begin(), cb2[b - 1].row(blk.x2_w).end());
    cvec x3(cb3[b - 1].row(blk.x3_w).begin(), cb3[b - 1].row(blk.x3_w).end());
    for (std::size_t t = 0; t < n; ++t) {
      tr.symbol_power[0] += std::norm(x1[t]);
      tr.symbol_power[1] += std::norm(x2[t]);
      tr.symbol_power[2] += std::norm(x3[t]);
    }
    if (keep_signals) {
      tr.signals[0].push_back(x1);
      tr.signals[1].push_back(x2);
      tr.signals[2].push_back(x3);
    }

    rx[b - 1] = awgn_transmit(ch, x1, x2, x3, derive(trial_seed, tag::block, b));

    if (b <= B) {
      const auto view = rx[b - 1].phases.view(0);
      AwgnMacParams prm{ch.gain_mag(1, 0), ch.gain_mag(2, 0), &view.sender(1), &view.sender(2)};
      blk.node1 = decode_mac_awgn(prm, cb2[b - 1], cb3[b - 1], rx[b - 1].y[0]);
      tr.w2_at1[b - 1] = blk.node1.wi;
      tr.w3_at1[b - 1] = blk.node1.wj;
      const auto [e2, e3] = detail::decode_wrongness(blk.node1, tr.w2[b - 1], tr.w3[b - 1]);
      tr.pair_error[0][1] = tr.pair_error[0][1] || e2;
      tr.pair_error[0][2] = tr.pair_error[0][2] || e3;
    }
  }
  for (int i = 0; i < 3; ++i) tr.symbol_power[i] /= static_cast<double>(n) * nb;

  // Backward pass, shared between nodes 2 and 3 so the double-index book is
  // streamed once per step.
  tr.back2.resize(B);
  tr.back3.resize(B);
  tr.w1_at2.assign(B, 0);
  tr.w3_at2.assign(B, 0);
  tr.w1_at3.assign(B, 0);
  tr.w2_at3.assign(B, 0);

  const double a12 = ch.gain_mag(0, 1), a13 = ch.gain_mag(0, 2);
  const double a32 = ch.gain_mag(2, 1), a23 = ch.gain_mag(1, 2);
  const double var2_next = ch.noise_power[1];                          // block b+1 at node 2
  const double var2_cur = ch.noise_power[1] + a12 * a12 * ch.power[0];  // node 1 unresolved in block b
  const double var3_next = ch.noise_power[2];
  const double var3_cur = ch.noise_power[2] + a13 * a13 * ch.power[0];

  std::size_t known3_at2 = 0;  // node 2's estimate of w3 for block b+1 (dummy 0 at b = B)
  std::size_t known2_at3 = 0;

  for (int b = B; b >= 1; --b) {
    const auto& nxt = rx[b];      // block b+1
    const auto& cur = rx[b - 1];  // block b

    // Residuals of block b+1 after removing the already-known codeword of the
    // respective third node.
    cvec y2p(nxt.y[1]);
    cvec y3p(nxt.y[2]);
    const auto& th32 = nxt.phases.theta[2][1];
    const auto& th23 = nxt.phases.theta[1][2];
    for (std::size_t t = 0; t < n; ++t) {
      y2p[t] -= std::polar(a32, th32[t]) *
                cb3[b].table(static_cast<Eigen::Index>(known3_at2), static_cast<Eigen::Index>(t));
      y3p[t] -= std::polar(a23, th23[t]) *
                cb2[b].table(static_cast<Eigen::Index>(known2_at3), static_cast<Eigen::Index>(t));
    }

    // Direct-observation distances in block b: the other node's codeword
    // against the received block, node 1's signal counted as noise.
    Eigen::VectorXd d2(static_cast<Eigen::Index>(M)), d3(static_cast<Eigen::Index>(M));
    {
      const auto& ct32 = cur.phases.theta[2][1];
      const auto& ct23 = cur.phases.theta[1][2];
      for (std::size_t w = 0; w < M; ++w) {
        double s2 = 0.0, s3 = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
          s2 += std::norm(cur.y[1][t] - std::polar(a32, ct32[t]) *
                                            cb3[b - 1].table(static_cast<Eigen::Index>(w),
                                                             static_cast<Eigen::Index>(t)));
          s3 += std::norm(cur.y[2][t] - std::polar(a23, ct23[t]) *
                                            cb2[b - 1].table(static_cast<Eigen::Index>(w),
                                                             static_cast<Eigen::Index>(t)));
        }
        d2(static_cast<Eigen::Index>(w)) = s2;
        d3(static_cast<Eigen::Index>(w)) = s3;
      }
    }

    const std::size_t w2b = tr.w2[b - 1];
    const std::size_t w3b = tr.w3[b - 1];
    detail::PairArgmin am2, am3;

    const auto& th12 = nxt.phases.theta[0][1];
    const auto& th13 = nxt.phases.theta[0][2];

    if (scheme == CoopScheme::double_index) {
      // Stream node 1's block-(b+1) book once, feeding both receivers.
      // |y' - rot c|^2 = |y'|^2 - 2 Re(sum conj(y') rot c) + a^2 |c|^2.
      cvec u2(n), u3(n);
      double y2n = 0.0, y3n = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        u2[t] = std::conj(y2p[t]) * std::polar(a12, th12[t]);
        u3[t] = std::conj(y3p[t]) * std::polar(a13, th13[t]);
        y2n += std::norm(y2p[t]);
        y3n += std::norm(y3p[t]);
      }
      const double a12sq = a12 * a12, a13sq = a13 * a13;
      cb1[b].stream([&](std::size_t p, std::size_t s, const std::complex<double>* c) {
        std::complex<double> dot2{0.0, 0.0}, dot3{0.0, 0.0};
        double cn = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
          dot2 += u2[t] * c[t];
          dot3 += u3[t] * c[t];
          cn += std::norm(c[t]);
        }
        const double t2 = y2n - 2.0 * dot2.real() + a12sq * cn;
        const double t3 = y3n - 2.0 * dot3.real() + a13sq * cn;
        const std::size_t q2 = (s + M - w2b) % M;
        const std::size_t q3 = (s + M - w3b) % M;
        am2.offer(t2 / var2_next + d2(static_cast<Eigen::Index>(q2)) / var2_cur, p, q2);
        am3.offer(t3 / var3_next + d3(static_cast<Eigen::Index>(q3)) / var3_cur, p, q3);
      });
    } else {
      // Superposition: the two layers pass through the same physical channel,
      // so the pair metric is again a two-codebook MAC distance, evaluated
      // with one matrix product per receiver.
      auto run_node = [&](const cvec& yp, double a, const std::vector<double>& th, double var_next,
                          const Eigen::VectorXd& dvec, double var_cur, std::size_t own_w,
                          int block_idx, detail::PairArgmin& am) {
        Eigen::VectorXcd rot(static_cast<Eigen::Index>(n));
        for (std::size_t t = 0; t < n; ++t) rot(static_cast<Eigen::Index>(t)) = std::polar(a, th[t]);
        CMatrix W = (-(cbu[static_cast<std::size_t>(block_idx)].table * rot.asDiagonal())).eval();
        for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(M); ++r)
          for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(n); ++t)
            W(r, t) += yp[static_cast<std::size_t>(t)];
        const CMatrix RV = cbv[static_cast<std::size_t>(block_idx)].table * rot.asDiagonal();
        const Eigen::VectorXd wn = W.rowwise().squaredNorm();
        const Eigen::VectorXd vn = RV.rowwise().squaredNorm();
        constexpr Eigen::Index kChunk = 256;
        Eigen::MatrixXcd g;
        for (Eigen::Index r0 = 0; r0 < static_cast<Eigen::Index>(M); r0 += kChunk) {
          const Eigen::Index rc = std::min(kChunk, static_cast<Eigen::Index>(M) - r0);
          g.noalias() = W.middleRows(r0, rc) * RV.adjoint();
          for (Eigen::Index r = 0; r < rc; ++r)
            for (Eigen::Index s = 0; s < static_cast<Eigen::Index>(M); ++s) {
              const double t_next = wn(r0 + r) + vn(s) - 2.0 * g(r, s).real();
              const std::size_t q = (static_cast<std::size_t>(s) + M - own_w) % M;
              am.offer(t_next / var_next + dvec(static_cast<Eigen::Index>(q)) / var_cur,
                       static_cast<std::size_t>(r0 + r), q);
            }
        }
      };
      run_node(y2p, a12, th12, var2_next, d2, var2_cur, w2b, b, am2);
      run_node(y3p, a13, th13, var3_next, d3, var3_cur, w3b, b, am3);
    }

    auto& r2 = tr.back2[b - 1];
    auto& r3 = tr.back3[b - 1];
    r2.decode = am2.result();
    r3.decode = am3.result();
    tr.w1_at2[b - 1] = r2.decode.wi;
    tr.w3_at2[b - 1] = r2.decode.wj;
    tr.w1_at3[b - 1] = r3.decode.wi;
    tr.w2_at3[b - 1] = r3.decode.wj;
    known3_at2 = r2.decode.wj;
    known2_at3 = r3.decode.wj;

    const auto [p2, q2] = detail::decode_wrongness(r2.decode, tr.w1[b - 1], w3b);
    const auto [p3, q3] = detail::decode_wrongness(r3.decode, tr.w1[b - 1], w2b);
    r2.wrong_p = p2;
    r2.wrong_q = q2;
    r3.wrong_p = p3;
    r3.wrong_q = q3;
    for (const auto* r : {&r2, &r3}) {
      if (r->wrong_p && r->wrong_q)
        ++tr.wrong_both;
      else if (r->wrong_p)
        ++tr.wrong_p;
      else if (r->wrong_q)
        ++tr.wrong_q;
    }
    tr.pair_error[1][0] = tr.pair_error[1][0] || p2;
    tr.pair_error[1][2] = tr.pair_error[1][2] || q2;
    tr.pair_error[2][0] = tr.pair_error[2][0] || p3;
    tr.pair_error[2][1] = tr.pair_error[2][1] || q3;
  }

  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 3; ++s) tr.any_error = tr.any_error || tr.pair_error[r][s];
  return tr;
}

// ---------------------------------------------------------------------------
// Predicted operating limits of the cooperative scheme.

struct LabeledBound {
  std::string label;
  double value = 0.0;
};

struct CoopRateBounds {
  std::vector<LabeledBound> bounds;
  double predicted_rate = 0.0;  // min over bounds
  std::array<int, 3> perm{0, 1, 2};  // relabeling applied (see c_r)
  double alpha = std::numeric_limits<double>::quiet_NaN();
};

// Per-decoder rate limits of the cooperative scheme on a reciprocal channel,
// after relabeling so that g23 <= g12 <= g13. Their minimum is the equal rate
// the scheme is expected to sustain as n grows.
inline CoopRateBounds coop_rate_bounds(const AwgnChannelSpec& ch, CoopScheme scheme,
                                       double alpha = 0.5) {
  const CrResult cr = c_r(ch);  // validates reciprocity, supplies the relabeling
  const int n1 = cr.perm[0], n2 = cr.perm[1], n3 = cr.perm[2];
  const double g12 = ch.snr[n1][n2];
  const double g13 = ch.snr[n1][n3];
  const double g23 = ch.snr[n2][n3];

  CoopRateBounds out;
  out.perm = cr.perm;
  if (scheme == CoopScheme::double_index) {
    out.bounds = {
        {"node1:R<log2(1+g12)", std::log2(1.0 + g12)},
        {"node1:R<log2(1+g13)", std::log2(1.0 + g13)},
        {"node1:2R<log2(1+g12+g13)", 0.5 * std::log2(1.0 + g12 + g13)},
        {"node2:R<log2(1+g12)", std::log2(1.0 + g12)},
        {"node2:2R<log2(1+g12+g23)", 0.5 * std::log2(1.0 + g12 + g23)},
        {"node3:R<log2(1+g13)", std::log2(1.0 + g13)},
        {"node3:2R<log2(1+g13+g23)", 0.5 * std::log2(1.0 + g13 + g23)},
    };
  } else {
    require(alpha >= 0.0 && alpha <= 1.0, Errc::alpha_out_of_range, "alpha must lie in [0, 1]");
    const SuperpositionRates r = superposition_rates(g12, g23, alpha);
    out.alpha = alpha;
    out.bounds = {
        {"fresh-layer:R<R'(alpha)", r.r_prime},
        {"relay-layer:R<R''(alpha)", r.r_double_prime},
        {"sum:2R<log2(1+g12+g23)", 0.5 * r.sum_bound},
    };
  }
  double mn = std::numeric_limits<double>::infinity();
  for (const auto& lb : out.bounds) mn = std::min(mn, lb.value);
  out.predicted_rate = mn;
  return out;
}

// Elementary-operation estimates used for the complexity budget.
inline double coop_op_estimate(std::size_t M, std::size_t n, int B, std::size_t trials) {
  return static_cast<double>(M) * static_cast<double>(M) * static_cast<double>(n) *
         static_cast<double>(B) * static_cast<double>(trials);
}

inline double noncoop_op_estimate(const std::array<std::size_t, 3>& M, std::size_t n,
                                  std::size_t trials) {
  const double pairs = static_cast<double>(M[0]) * static_cast<double>(M[1]) +
                       static_cast<double>(M[0]) * static_cast<double>(M[2]) +
                       static_cast<double>(M[1]) * static_cast<double>(M[2]);
  return pairs * static_cast<double>(n) * static_cast<double>(trials);
}

}  // namespace threeway
