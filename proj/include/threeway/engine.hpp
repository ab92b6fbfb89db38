#pragma once
// Monte Carlo experiment orchestration: seeded trial scheduling, error-count
// aggregation with exact binomial intervals, rate sweeps, capacity reports,
// and the closed-form superposition check.
//
// Determinism contract: a SimResult is a pure function of (config, seed). Each
// trial runs from seed derive(master, tag::trial, index); outcomes land in
// per-trial slots and are aggregated in index order, so the thread budget can
// only change the wall time, never the counts. canonical_bytes() serializes
// everything except the wall time for byte-level comparison.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <json.hpp>

#include "threeway/channels.hpp"
#include "threeway/codecs.hpp"
#include "threeway/errors.hpp"
#include "threeway/regions.hpp"

namespace threeway {

enum class Scheme { noncoop_ff, noncoop_awgn, coop_double_index, coop_superposition };

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::noncoop_ff: return "noncoop_ff";
    case Scheme::noncoop_awgn: return "noncoop_awgn";
    case Scheme::coop_double_index: return "coop_double_index";
    case Scheme::coop_superposition: return "coop_superposition";
  }
  fail(Errc::internal, "unknown scheme");
}

inline Scheme scheme_from_name(const std::string& s) {
  if (s == "noncoop_ff") return Scheme::noncoop_ff;
  if (s == "noncoop_awgn") return Scheme::noncoop_awgn;
  if (s == "coop_double_index") return Scheme::coop_double_index;
  if (s == "coop_superposition") return Scheme::coop_superposition;
  fail(Errc::config_error, "unknown scheme '" + s + "'");
}

inline bool is_coop(Scheme s) {
  return s == Scheme::coop_double_index || s == Scheme::coop_superposition;
}

// Exact (Clopper-Pearson) binomial confidence interval.
struct Confidence {
  double lo = 0.0, hi = 1.0;
};

inline Confidence clopper_pearson(std::uint64_t k, std::uint64_t n, double level = 0.95) {
  require(n >= 1, Errc::empty_input, "interval needs at least one trial");
  require(k <= n, Errc::out_of_range, "successes exceed trials");
  require(level > 0.0 && level < 1.0, Errc::out_of_range, "confidence level must lie in (0, 1)");
  const double a = 1.0 - level;
  Confidence c;
  c.lo = k == 0 ? 0.0
                : boost::math::ibeta_inv(static_cast<double>(k), static_cast<double>(n - k + 1),
                                         a / 2.0);
  c.hi = k == n ? 1.0
                : boost::math::ibeta_inv(static_cast<double>(k + 1), static_cast<double>(n - k),
                                         1.0 - a / 2.0);
  return c;
}

struct SimConfig {
  std::variant<FfChannelSpec, AwgnChannelSpec> channel;
  Scheme scheme = Scheme::noncoop_awgn;
  std::size_t n = 1;
  int B = 1;  // message blocks, cooperative schemes only
  double rate = std::numeric_limits<double>::quiet_NaN();  // nominal equal rate
  std::array<std::size_t, 3> sizes{0, 0, 0};  // explicit codebook sizes (non-cooperative)
  std::size_t M = 0;                          // explicit codebook size (cooperative)
  double alpha = 0.5;                         // superposition power split
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double op_budget = 1e10;
};

struct SimResult {
  Scheme scheme = Scheme::noncoop_awgn;
  std::size_t n = 0;
  int B = 1;
  double rate_nominal = 0.0;
  double rate_realized = 0.0;
  std::array<double, 3> realized_rates{};  // per sender
  double alpha = std::numeric_limits<double>::quiet_NaN();
  std::size_t trials = 0;
  std::array<std::array<std::uint64_t, 3>, 3> pair_errors{};  // [receiver][source]
  std::uint64_t errors_any = 0;
  std::uint64_t wrong_p = 0, wrong_q = 0, wrong_both = 0;  // backward-decode classes
  double pe_hat = 0.0, ci_lo = 0.0, ci_hi = 1.0;
  std::uint64_t seed = 0;
  std::array<double, 3> mean_symbol_power{};  // cooperative runs, else NaN
  double wall_ms = 0.0;

  static std::string csv_header() {
    return "scheme,n,B,rate_nominal,rate_realized,trials,errors_any,pe_hat,ci_lo,ci_hi,seed,"
           "wall_ms";
  }

  std::string csv_row() const {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s,%zu,%d,%.10g,%.10g,%zu,%llu,%.10g,%.10g,%.10g,%llu,%.3f",
                  scheme_name(scheme), n, B, rate_nominal, rate_realized, trials,
                  static_cast<unsigned long long>(errors_any), pe_hat, ci_lo, ci_hi,
                  static_cast<unsigned long long>(seed), wall_ms);
    return buf;
  }

  // Full serialization minus the wall time; two runs of the same config and
  // seed must agree on this byte for byte whatever the thread budget.
  std::string canonical_bytes() const {
    std::string out;
    char buf[160];
    auto put = [&](const char* key, const char* fmt, auto v) {
      std::snprintf(buf, sizeof buf, "%s=", key);
      out += buf;
      std::snprintf(buf, sizeof buf, fmt, v);
      out += buf;
      out += '\n';
    };
    put("scheme", "%s", scheme_name(scheme));
    put("n", "%zu", n);
    put("B", "%d", B);
    put("rate_nominal", "%.17g", rate_nominal);
    put("rate_realized", "%.17g", rate_realized);
    for (int i = 0; i < 3; ++i) {
      std::snprintf(buf, sizeof buf, "realized_rate_%d=%.17g\n", i + 1, realized_rates[i]);
      out += buf;
    }
    put("alpha", "%.17g", alpha);
    put("trials", "%zu", trials);
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s) {
        if (r == s) continue;
        std::snprintf(buf, sizeof buf, "errors_%d_from_%d=%llu\n", r + 1, s + 1,
                      static_cast<unsigned long long>(pair_errors[r][s]));
        out += buf;
      }
    put("errors_any", "%llu", static_cast<unsigned long long>(errors_any));
    put("wrong_p", "%llu", static_cast<unsigned long long>(wrong_p));
    put("wrong_q", "%llu", static_cast<unsigned long long>(wrong_q));
    put("wrong_both", "%llu", static_cast<unsigned long long>(wrong_both));
    put("pe_hat", "%.17g", pe_hat);
    put("ci_lo", "%.17g", ci_lo);
    put("ci_hi", "%.17g", ci_hi);
    put("seed", "%llu", static_cast<unsigned long long>(seed));
    for (int i = 0; i < 3; ++i) {
      std::snprintf(buf, sizeof buf, "mean_symbol_power_%d=%.17g\n", i + 1, mean_symbol_power[i]);
      out += buf;
    }
    return out;
  }
};

namespace detail {

// Number of codewords per codebook implied by the config: explicit sizes win,
// otherwise M_i = round(2^(n R)).
inline std::size_t size_from_rate(std::size_t n, double rate) {
  require(std::isfinite(rate) && rate >= 0.0, Errc::config_error, "rate must be finite and >= 0");
  const double md = std::exp2(static_cast<double>(n) * rate);
  require(md <= 9.0e15, Errc::budget_exceeded, "2^(n*rate) exceeds representable codebook sizes");
  const auto m = static_cast<std::size_t>(std::llround(md));
  return m < 1 ? 1 : m;
}

struct ResolvedSizes {
  std::array<std::size_t, 3> sizes{};  // per sender (non-coop) or all equal (coop)
  double rate_nominal = 0.0;
  std::array<double, 3> realized{};
  double rate_realized = 0.0;
};

inline ResolvedSizes resolve_sizes(const SimConfig& cfg) {
  const bool has_rate = !std::isnan(cfg.rate);
  ResolvedSizes r;
  if (is_coop(cfg.scheme)) {
    require(has_rate != (cfg.M > 0), Errc::config_error,
            "cooperative config needs exactly one of 'rate' or 'M'");
    const std::size_t m = cfg.M > 0 ? cfg.M : size_from_rate(cfg.n, cfg.rate);
    r.sizes = {m, m, m};
  } else {
    require(has_rate != (cfg.sizes[0] > 0), Errc::config_error,
            "non-cooperative config needs exactly one of 'rate' or 'sizes'");
    if (cfg.sizes[0] > 0) {
      for (std::size_t m : cfg.sizes)
        require(m >= 1, Errc::config_error, "codebook sizes must be >= 1");
      r.sizes = cfg.sizes;
    } else {
      const std::size_t m = size_from_rate(cfg.n, cfg.rate);
      r.sizes = {m, m, m};
    }
  }
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    r.realized[i] = std::log2(static_cast<double>(r.sizes[i])) / static_cast<double>(cfg.n);
    sum += r.realized[i];
  }
  r.rate_realized = sum / 3.0;
  r.rate_nominal = has_rate ? cfg.rate : r.rate_realized;
  return r;
}

inline void validate_config(const SimConfig& cfg) {
  require(cfg.trials >= 1, Errc::config_error, "trials must be >= 1");
  require(cfg.n >= 1, Errc::config_error, "n must be >= 1");
  if (cfg.scheme == Scheme::noncoop_ff) {
    require(std::holds_alternative<FfChannelSpec>(cfg.channel), Errc::incompatible_scheme,
            "noncoop_ff needs a finite-field channel spec");
  } else {
    require(std::holds_alternative<AwgnChannelSpec>(cfg.channel), Errc::incompatible_scheme,
            scheme_name(cfg.scheme) + std::string(" needs an AWGN channel spec"));
  }
  if (is_coop(cfg.scheme)) {
    require(cfg.B >= 1, Errc::config_error, "cooperative schemes need B >= 1");
    if (cfg.scheme == Scheme::coop_superposition)
      require(cfg.alpha >= 0.0 && cfg.alpha <= 1.0, Errc::alpha_out_of_range,
              "alpha must lie in [0, 1]");
  }
}

}  // namespace detail

// Estimated elementary metric operations for a config; refused configs fail
// fast instead of running for hours.
inline double op_estimate(const SimConfig& cfg) {
  const auto rs = detail::resolve_sizes(cfg);
  if (is_coop(cfg.scheme))
    return coop_op_estimate(rs.sizes[0], cfg.n, cfg.B, cfg.trials);
  return noncoop_op_estimate(rs.sizes, cfg.n, cfg.trials);
}

inline SimResult monte_carlo(const SimConfig& cfg) {
  detail::validate_config(cfg);
  const auto rs = detail::resolve_sizes(cfg);
  {
    const double est = op_estimate(cfg);
    if (est > cfg.op_budget) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "estimated %.3g metric operations exceed the budget of %.3g", est,
                    cfg.op_budget);
      fail(Errc::budget_exceeded, buf);
    }
  }

  const auto t0 = std::chrono::steady_clock::now();

  struct TrialOutcome {
    std::array<std::array<bool, 3>, 3> pair{};
    bool any = false;
    std::uint32_t wp = 0, wq = 0, wb = 0;
    std::array<double, 3> power{};
  };
  std::vector<TrialOutcome> slots(cfg.trials);

  auto run_one = [&](std::size_t idx) {
    const std::uint64_t trial_seed = derive(cfg.seed, tag::trial, idx);
    TrialOutcome& out = slots[idx];
    if (cfg.scheme == Scheme::noncoop_ff) {
      const auto tr = run_noncoop(std::get<FfChannelSpec>(cfg.channel), rs.sizes, cfg.n, trial_seed);
      out.pair = tr.pair_error;
      out.any = tr.any_error;
      out.power = {std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::quiet_NaN()};
    } else if (cfg.scheme == Scheme::noncoop_awgn) {
      const auto tr = run_noncoop(std::get<AwgnChannelSpec>(cfg.channel), rs.sizes, cfg.n, trial_seed);
      out.pair = tr.pair_error;
      out.any = tr.any_error;
      out.power = {std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::quiet_NaN()};
    } else {
      const auto scheme = cfg.scheme == Scheme::coop_double_index ? CoopScheme::double_index
                                                                  : CoopScheme::superposition;
      const auto tr = run_coop(std::get<AwgnChannelSpec>(cfg.channel), rs.sizes[0], cfg.n, cfg.B,
                               scheme, cfg.alpha, trial_seed);
      out.pair = tr.pair_error;
      out.any = tr.any_error;
      out.wp = static_cast<std::uint32_t>(tr.wrong_p);
      out.wq = static_cast<std::uint32_t>(tr.wrong_q);
      out.wb = static_cast<std::uint32_t>(tr.wrong_both);
      out.power = tr.symbol_power;
    }
  };

  const unsigned nthreads =
      std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.trials)));
  if (nthreads == 1) {
    for (std::size_t i = 0; i < cfg.trials; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mu;
    auto worker = [&] {
      try {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= cfg.trials) return;
          run_one(i);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  SimResult res;
  res.scheme = cfg.scheme;
  res.n = cfg.n;
  res.B = is_coop(cfg.scheme) ? cfg.B : 1;
  res.rate_nominal = rs.rate_nominal;
  res.rate_realized = rs.rate_realized;
  res.realized_rates = rs.realized;
  res.alpha = cfg.scheme == Scheme::coop_superposition
                  ? cfg.alpha
                  : std::numeric_limits<double>::quiet_NaN();
  res.trials = cfg.trials;
  res.seed = cfg.seed;
  if (is_coop(cfg.scheme)) {
    res.mean_symbol_power = {0.0, 0.0, 0.0};
  } else {
    res.mean_symbol_power = {std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::quiet_NaN()};
  }
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    const auto& o = slots[i];
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s) res.pair_errors[r][s] += o.pair[r][s] ? 1 : 0;
    res.errors_any += o.any ? 1 : 0;
    res.wrong_p += o.wp;
    res.wrong_q += o.wq;
    res.wrong_both += o.wb;
    if (is_coop(cfg.scheme))
      for (int k = 0; k < 3; ++k) res.mean_symbol_power[k] += o.power[k];
  }
  if (is_coop(cfg.scheme))
    for (int k = 0; k < 3; ++k) res.mean_symbol_power[k] /= static_cast<double>(cfg.trials);

  res.pe_hat = static_cast<double>(res.errors_any) / static_cast<double>(cfg.trials);
  const Confidence ci = clopper_pearson(res.errors_any, cfg.trials);
  res.ci_lo = ci.lo;
  res.ci_hi = ci.hi;
  res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// One monte_carlo per grid rate, rows in grid order. The grid must be
// strictly ascending.
inline std::vector<SimResult> rate_sweep(const SimConfig& base, const std::vector<double>& rates) {
  require(!rates.empty(), Errc::empty_input, "rate grid is empty");
  for (std::size_t i = 1; i < rates.size(); ++i)
    require(rates[i] > rates[i - 1], Errc::config_error, "rate grid must be strictly ascending");
  std::vector<SimResult> out;
  out.reserve(rates.size());
  for (double r : rates) {
    SimConfig cfg = base;
    cfg.rate = r;
    cfg.sizes = {0, 0, 0};
    cfg.M = 0;
    out.push_back(monte_carlo(cfg));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structured reports.

inline nlohmann::json region_json(const RatePolytope& rp) {
  nlohmann::json j;
  j["constraints"] = nlohmann::json::array();
  for (const auto& c : rp.constraints()) {
    j["constraints"].push_back({{"coeffs", c.coeffs}, {"bound", c.bound}, {"label", c.label}});
  }
  j["vertices"] = rp.vertices();
  j["equal_rate"] = rp.equal_rate_max();
  return j;
}

inline nlohmann::json capacity_report(const FfChannelSpec& ch) {
  nlohmann::json j;
  j["model"] = "ff";
  j["field"] = {{"p", ch.field.p()}, {"m", ch.field.m()}, {"q", ch.field.q()}};
  nlohmann::json ent = nlohmann::json::array();
  for (int k = 0; k < 3; ++k) ent.push_back(entropy(ch.noise[k]));
  j["noise_entropy"] = ent;
  j["capacity"] = region_json(ff_outer(ch));
  return j;
}

inline nlohmann::json capacity_report(const AwgnChannelSpec& ch) {
  nlohmann::json j;
  j["model"] = "awgn";
  j["outer"] = region_json(awgn_outer(ch));
  j["inner"] = region_json(awgn_inner(ch));
  const ChannelClass cls = classify(ch);
  j["classification"] = {{"sender_symmetrical", cls.sender_symmetrical},
                         {"reciprocal", cls.reciprocal}};
  if (cls.sender_symmetrical) j["c_ss"] = c_ss(ch);
  if (cls.reciprocal) {
    const CrResult cr = c_r(ch);
    j["c_r"] = cr.value;
    j["relabel"] = {cr.perm[0] + 1, cr.perm[1] + 1, cr.perm[2] + 1};

    const auto di = coop_rate_bounds(ch, CoopScheme::double_index);
    nlohmann::json dib = nlohmann::json::array();
    for (const auto& b : di.bounds) dib.push_back({{"label", b.label}, {"value", b.value}});
    j["coop_bounds"]["double_index"] = {{"bounds", dib}, {"predicted_rate", di.predicted_rate}};

    const int n1 = cr.perm[0], n2 = cr.perm[1], n3 = cr.perm[2];
    const double g12 = ch.snr[n1][n2], g23 = ch.snr[n2][n3];
    const double astar = superposition_alpha_star(g12, g23);
    const auto sp = coop_rate_bounds(ch, CoopScheme::superposition, astar);
    nlohmann::json spb = nlohmann::json::array();
    for (const auto& b : sp.bounds) spb.push_back({{"label", b.label}, {"value", b.value}});
    j["coop_bounds"]["superposition"] = {{"alpha_star", astar},
                                         {"bounds", spb},
                                         {"predicted_rate", sp.predicted_rate},
                                         {"r_triple_prime", r_triple_prime(g12, g23)}};
  }
  return j;
}

inline nlohmann::json capacity_report(const std::variant<FfChannelSpec, AwgnChannelSpec>& ch) {
  return std::visit([](const auto& c) { return capacity_report(c); }, ch);
}

// ---------------------------------------------------------------------------
// Closed-form check of the relay-layer gain claim on a log-spaced grid.

struct SuperpositionCheckRow {
  double g12 = 0.0, g23 = 0.0;
  double r3 = 0.0;      // achievable equal rate of the superposition scheme
  double bound = 0.0;   // 0.5 log2(1 + g12 + g23)
  double margin = 0.0;  // r3 - bound
};

struct SuperpositionCheck {
  std::vector<SuperpositionCheckRow> rows;
  double min_margin = std::numeric_limits<double>::infinity();
  bool pass = false;  // all margins >= -1e-9
};

inline SuperpositionCheck check_superposition(double g12_lo, double g12_hi, double g23_lo,
                                              double g23_hi, std::size_t grid) {
  require(grid >= 2, Errc::config_error, "grid needs at least two points per axis");
  require(g12_lo > 0.0 && g23_lo > 0.0, Errc::config_error, "ranges must be positive");
  require(g12_hi > g12_lo && g23_hi > g23_lo, Errc::config_error, "ranges must be increasing");

  auto logspace = [&](double lo, double hi, std::size_t k) {
    std::vector<double> v(k);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t i = 0; i < k; ++i)
      v[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(k - 1));
    return v;
  };
  const auto gs12 = logspace(g12_lo, g12_hi, grid);
  const auto gs23 = logspace(g23_lo, g23_hi, grid);

  SuperpositionCheck out;
  for (double g12 : gs12)
    for (double g23 : gs23) {
      if (g23 > g12) continue;  // claim is stated for g23 <= g12
      SuperpositionCheckRow row;
      row.g12 = g12;
      row.g23 = g23;
      row.r3 = r_triple_prime(g12, g23);
      row.bound = 0.5 * std::log2(1.0 + g12 + g23);
      row.margin = row.r3 - row.bound;
      out.min_margin = std::min(out.min_margin, row.margin);
      out.rows.push_back(row);
    }
  out.pass = !out.rows.empty() && out.min_margin >= -1e-9;
  return out;
}

}  // namespace threeway
