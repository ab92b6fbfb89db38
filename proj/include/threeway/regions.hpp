#pragma once
// Rate regions for the three-way channel as explicit constraint lists over
// (R1, R2, R3), plus the closed-form equal-rate capacities for the
// sender-symmetrical and reciprocal AWGN classes and the superposition
// rate formulas. All rates are in bits per channel use (log base 2).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "threeway/channels.hpp"
#include "threeway/errors.hpp"

namespace threeway {

using RateTriple = std::array<double, 3>;

struct RateConstraint {
  std::array<double, 3> coeffs{};  // each entry 0 or 1
  double bound = 0.0;
  std::string label;
};

class RatePolytope {
 public:
  explicit RatePolytope(std::vector<RateConstraint> cons) : cons_(std::move(cons)) {
    require(!cons_.empty(), Errc::empty_input, "rate region needs at least one constraint");
    for (const auto& c : cons_) {
      bool any = false;
      for (double a : c.coeffs) {
        require(a == 0.0 || a == 1.0, Errc::out_of_range, "constraint coefficients must be 0 or 1");
        any = any || a == 1.0;
      }
      require(any, Errc::out_of_range, "constraint with all-zero coefficients");
      require(std::isfinite(c.bound) && c.bound >= 0.0, Errc::out_of_range,
              "constraint bound must be finite and nonnegative");
    }
  }

  const std::vector<RateConstraint>& constraints() const { return cons_; }

  bool contains(const RateTriple& r, double tol = 1e-9) const {
    for (double v : r)
      if (v < -tol) return false;
    for (const auto& c : cons_) {
      const double lhs = c.coeffs[0] * r[0] + c.coeffs[1] * r[1] + c.coeffs[2] * r[2];
      if (lhs > c.bound + tol) return false;
    }
    return true;
  }

  // All vertices of the polytope (intersected with the nonnegative octant),
  // found by enumerating plane triples. With at most a handful of
  // constraints this is cheaper and more transparent than an LP.
  std::vector<RateTriple> vertices(double tol = 1e-9) const {
    for (int coord = 0; coord < 3; ++coord) {
      bool bounded = false;
      for (const auto& c : cons_) bounded = bounded || c.coeffs[coord] == 1.0;
      require(bounded, Errc::unbounded_region,
              "rate " + std::to_string(coord + 1) + " is unbounded");
    }

    struct Plane {
      std::array<double, 3> a;
      double b;
    };
    std::vector<Plane> planes;
    for (const auto& c : cons_) planes.push_back({c.coeffs, c.bound});
    for (int i = 0; i < 3; ++i) {
      Plane p{{0.0, 0.0, 0.0}, 0.0};
      p.a[i] = 1.0;
      planes.push_back(p);
    }

    std::vector<RateTriple> verts;
    const std::size_t np = planes.size();
    for (std::size_t i = 0; i < np; ++i)
      for (std::size_t j = i + 1; j < np; ++j)
        for (std::size_t k = j + 1; k < np; ++k) {
          const auto& A = planes[i].a;
          const auto& B = planes[j].a;
          const auto& C = planes[k].a;
          const double det = A[0] * (B[1] * C[2] - B[2] * C[1]) - A[1] * (B[0] * C[2] - B[2] * C[0]) +
                             A[2] * (B[0] * C[1] - B[1] * C[0]);
          if (std::abs(det) < 1e-12) continue;
          const std::array<double, 3> rhs{planes[i].b, planes[j].b, planes[k].b};
          RateTriple r{};
          // Cramer's rule, one column replaced at a time.
          for (int col = 0; col < 3; ++col) {
            std::array<std::array<double, 3>, 3> m{{A, B, C}};
            m[0][col] = rhs[0];
            m[1][col] = rhs[1];
            m[2][col] = rhs[2];
            const double d = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                             m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                             m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
            r[col] = d / det;
          }
          if (!contains(r, tol)) continue;
          for (auto& c : r)
            if (c == 0.0) c = 0.0;  // fold -0.0
          bool dup = false;
          for (const auto& v : verts)
            dup = dup || (std::abs(v[0] - r[0]) <= tol && std::abs(v[1] - r[1]) <= tol &&
                          std::abs(v[2] - r[2]) <= tol);
          if (!dup) verts.push_back(r);
        }
    std::sort(verts.begin(), verts.end());
    return verts;
  }

  // Largest t with (t, t, t) inside the region.
  double equal_rate_max() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cons_) {
      const double s = c.coeffs[0] + c.coeffs[1] + c.coeffs[2];
      best = std::min(best, c.bound / s);
    }
    return best;
  }

 private:
  std::vector<RateConstraint> cons_;
};

// Every vertex of a lies inside b.
inline bool is_subset(const RatePolytope& a, const RatePolytope& b, double tol = 1e-9) {
  for (const auto& v : a.vertices(tol))
    if (!b.contains(v, tol)) return false;
  return true;
}

namespace detail {
inline std::string rate_label(int i, int j) {
  return "R" + std::to_string(i + 1) + "+R" + std::to_string(j + 1);
}
}  // namespace detail

// Capacity region of the finite-field channel: for each receiver k, the two
// messages it decodes share the field's capacity log2(q) - H(Z_k).
inline RatePolytope ff_outer(const FfChannelSpec& ch) {
  std::vector<RateConstraint> cons;
  const double logq = std::log2(static_cast<double>(ch.field.q()));
  for (int k = 0; k < 3; ++k) {
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    RateConstraint c;
    c.coeffs[i] = c.coeffs[j] = 1.0;
    c.bound = std::max(0.0, logq - entropy(ch.noise[k]));
    c.label = detail::rate_label(std::min(i, j), std::max(i, j)) + "<=log2(q)-H(Z" + std::to_string(k + 1) + ")";
    cons.push_back(c);
  }
  return RatePolytope(std::move(cons));
}

// Cut-set outer bound for the AWGN channel.
inline RatePolytope awgn_outer(const AwgnChannelSpec& ch) {
  std::vector<RateConstraint> cons;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    RateConstraint c;
    c.coeffs[i] = 1.0;
    c.bound = std::log2(1.0 + ch.snr[i][j] + ch.snr[i][k]);
    c.label = "R" + std::to_string(i + 1) + "<=log2(1+g" + std::to_string(i + 1) + std::to_string(j + 1) +
              "+g" + std::to_string(i + 1) + std::to_string(k + 1) + ")";
    cons.push_back(c);
  }
  for (int k = 0; k < 3; ++k) {
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    RateConstraint c;
    c.coeffs[i] = c.coeffs[j] = 1.0;
    c.bound = std::log2(1.0 + ch.snr[i][k] + ch.snr[j][k]);
    c.label = detail::rate_label(std::min(i, j), std::max(i, j)) + "<=log2(1+g" +
              std::to_string(std::min(i, j) + 1) + std::to_string(k + 1) + "+g" +
              std::to_string(std::max(i, j) + 1) + std::to_string(k + 1) + ")";
    cons.push_back(c);
  }
  return RatePolytope(std::move(cons));
}

// Achievable region with independent point-to-point codebooks and joint
// decoding of the two incoming messages at each receiver (a MAC at each
// node). Nine constraints: two single-rate ones per sender, one sum per
// receiving node.
inline RatePolytope awgn_inner(const AwgnChannelSpec& ch) {
  std::vector<RateConstraint> cons;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      if (i == k) continue;
      RateConstraint c;
      c.coeffs[i] = 1.0;
      c.bound = std::log2(1.0 + ch.snr[i][k]);
      c.label = "R" + std::to_string(i + 1) + "<=log2(1+g" + std::to_string(i + 1) +
                std::to_string(k + 1) + ")";
      cons.push_back(c);
    }
  for (int k = 0; k < 3; ++k) {
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    RateConstraint c;
    c.coeffs[i] = c.coeffs[j] = 1.0;
    c.bound = std::log2(1.0 + ch.snr[i][k] + ch.snr[j][k]);
    c.label = detail::rate_label(std::min(i, j), std::max(i, j)) + "<=log2(1+g" +
              std::to_string(std::min(i, j) + 1) + std::to_string(k + 1) + "+g" +
              std::to_string(std::max(i, j) + 1) + std::to_string(k + 1) + ")";
    cons.push_back(c);
  }
  return RatePolytope(std::move(cons));
}

// Equal-rate capacity of a sender-symmetrical channel (both senders reach
// each receiver k at a common SNR gamma_k): (1/2) log2(1 + 2 min_k gamma_k).
inline double c_ss(const AwgnChannelSpec& ch, double tol = 1e-12) {
  require(classify(ch, tol).sender_symmetrical, Errc::not_sender_symmetrical,
          "channel is not sender-symmetrical");
  double gmin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) gmin = std::min(gmin, ch.snr[(k + 1) % 3][k]);
  return 0.5 * std::log2(1.0 + 2.0 * gmin);
}

struct CrResult {
  double value = 0.0;
  // perm[role] = original node index filling that role after relabeling;
  // role 0 is the node outside the weakest pair, roles 1 and 2 order the
  // remaining two so that snr(role0, role1) <= snr(role0, role2).
  std::array<int, 3> perm{0, 1, 2};
};

// Equal-rate capacity of a reciprocal channel. With pair SNRs sorted so that
// s23 <= s12 <= s13 after relabeling, C = (1/2) log2(1 + s12 + s23).
inline CrResult c_r(const AwgnChannelSpec& ch, double tol = 1e-12) {
  require(classify(ch, tol).reciprocal, Errc::not_reciprocal, "channel is not reciprocal");
  auto pair_snr = [&](int a, int b) { return ch.snr[a][b]; };
  // The weakest pair; ties resolved toward smaller node indices for
  // determinism.
  const std::array<std::array<int, 2>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  int weakest = 0;
  for (int t = 1; t < 3; ++t)
    if (pair_snr(pairs[t][0], pairs[t][1]) < pair_snr(pairs[weakest][0], pairs[weakest][1])) weakest = t;
  const int role0 = 3 - pairs[weakest][0] - pairs[weakest][1];
  int a = pairs[weakest][0], b = pairs[weakest][1];
  if (pair_snr(role0, b) < pair_snr(role0, a)) std::swap(a, b);
  CrResult r;
  r.perm = {role0, a, b};
  r.value = 0.5 * std::log2(1.0 + pair_snr(role0, a) + pair_snr(a, b));
  return r;
}

struct SuperpositionRates {
  double r_prime = 0.0;         // rate of the fresh-data layer, log2(1 + alpha*g12)
  double r_double_prime = 0.0;  // relay layer plus direct observation
  double sum_bound = 0.0;       // log2(1 + g12 + g23), the cut through node 2
};

// Rate expressions of the superposition variant on a relabeled reciprocal
// channel with pair SNRs g12 >= g23. alpha is the power fraction of the
// fresh-data layer.
inline SuperpositionRates superposition_rates(double g12, double g23, double alpha) {
  require(g12 > 0.0 && g23 > 0.0, Errc::out_of_range, "SNRs must be positive");
  require(alpha >= 0.0 && alpha <= 1.0, Errc::alpha_out_of_range, "alpha must lie in [0, 1]");
  SuperpositionRates r;
  r.r_prime = std::log2(1.0 + alpha * g12);
  r.r_double_prime = std::log2(1.0 + (1.0 - alpha) * g12) + std::log2(1.0 + g23 / (1.0 + g12));
  r.sum_bound = std::log2(1.0 + g12 + g23);
  return r;
}

// Value of max_alpha min(R'(alpha), R''(alpha)) in closed form, valid when
// the crossing point lies inside [0, 1] (in particular whenever g23 <= g12).
inline double r_triple_prime(double g12, double g23) {
  require(g12 > 0.0 && g23 > 0.0, Errc::out_of_range, "SNRs must be positive");
  const double num = (1.0 + g12) * (g12 + g23);
  const double den = 2.0 * (1.0 + g12) + g23;
  return std::log2(1.0 + num / den);
}

// The maximizing power split for r_triple_prime, clamped to [0, 1].
inline double superposition_alpha_star(double g12, double g23) {
  require(g12 > 0.0 && g23 > 0.0, Errc::out_of_range, "SNRs must be positive");
  const double a = (g12 + g23) * (1.0 + g12) / (g12 * (2.0 * (1.0 + g12) + g23));
  return std::min(1.0, std::max(0.0, a));
}

}  // namespace threeway
