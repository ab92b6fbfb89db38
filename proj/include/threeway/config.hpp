#pragma once
// JSON ingestion for channel specs and simulation configs.
//
// Channel objects:
//   {"model": "ff", "field": {"p": 2, "m": 1},
//    "gains": [[null,1,1],[1,null,1],[1,1,null]],
//    "noise_pmfs": [[0.89,0.11],[1,0],[1,0]]}
//   {"model": "awgn", "snr": [[null,6,8],[6,null,1],[8,1,null]],
//    "powers": [1,1,1], "noise_powers": [1,1,1]}
// Diagonal matrix entries are ignored (null recommended).
//
// A simulation config is the channel object with the experiment keys merged
// in: scheme, n, B, rate | sizes | M, alpha, trials, seed, threads, op_budget.

#include <fstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "threeway/channels.hpp"
#include "threeway/engine.hpp"
#include "threeway/errors.hpp"

namespace threeway {

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::config_error, "cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::config_error, "cannot parse '" + path + "': " + e.what());
  }
}

namespace detail {

inline const nlohmann::json& cfg_at(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  require(it != j.end(), Errc::config_error, std::string("missing config key '") + key + "'");
  return *it;
}

template <class T>
T cfg_get(const nlohmann::json& j, const char* key) {
  try {
    return cfg_at(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::config_error, std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
T cfg_get_or(const nlohmann::json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::config_error, std::string("bad value for '") + key + "': " + e.what());
  }
}

// Off-diagonal entries of a 3x3 config matrix; the diagonal may hold null (or
// anything else) and is never read.
template <class T>
std::array<std::array<T, 3>, 3> cfg_matrix(const nlohmann::json& j, const char* key) {
  const auto& m = cfg_at(j, key);
  require(m.is_array() && m.size() == 3, Errc::config_error,
          std::string("'") + key + "' must be a 3x3 matrix");
  std::array<std::array<T, 3>, 3> out{};
  for (int i = 0; i < 3; ++i) {
    const auto& row = m[static_cast<std::size_t>(i)];
    require(row.is_array() && row.size() == 3, Errc::config_error,
            std::string("'") + key + "' must be a 3x3 matrix");
    for (int k = 0; k < 3; ++k) {
      if (i == k) continue;
      try {
        out[i][k] = row[static_cast<std::size_t>(k)].get<T>();
      } catch (const nlohmann::json::exception& e) {
        fail(Errc::config_error, std::string("bad entry in '") + key + "': " + e.what());
      }
    }
  }
  return out;
}

}  // namespace detail

inline std::variant<FfChannelSpec, AwgnChannelSpec> parse_channel(const nlohmann::json& j) {
  const auto model = detail::cfg_get<std::string>(j, "model");
  if (model == "ff") {
    const auto& fj = detail::cfg_at(j, "field");
    Field field(detail::cfg_get<std::uint32_t>(fj, "p"), detail::cfg_get<std::uint32_t>(fj, "m"));
    const auto gains_raw = detail::cfg_matrix<std::uint32_t>(j, "gains");
    std::array<std::array<felem, 3>, 3> gains{};
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) {
        if (i == k) continue;
        require(gains_raw[i][k] < field.q(), Errc::config_error,
                "gain entries must be field elements");
        gains[i][k] = static_cast<felem>(gains_raw[i][k]);
      }
    const auto& pj = detail::cfg_at(j, "noise_pmfs");
    require(pj.is_array() && pj.size() == 3, Errc::config_error,
            "'noise_pmfs' must hold three arrays");
    auto pmf_of = [&](std::size_t k) {
      try {
        return Pmf(pj[k].get<std::vector<double>>());
      } catch (const nlohmann::json::exception& e) {
        fail(Errc::config_error, std::string("bad entry in 'noise_pmfs': ") + e.what());
      }
    };
    return FfChannelSpec(std::move(field), gains, {pmf_of(0), pmf_of(1), pmf_of(2)});
  }
  if (model == "awgn") {
    const auto snr = detail::cfg_matrix<double>(j, "snr");
    const auto powers = detail::cfg_get_or<std::array<double, 3>>(j, "powers", {1.0, 1.0, 1.0});
    const auto noise =
        detail::cfg_get_or<std::array<double, 3>>(j, "noise_powers", {1.0, 1.0, 1.0});
    return AwgnChannelSpec(snr, powers, noise);
  }
  fail(Errc::config_error, "unknown channel model '" + model + "'");
}

inline SimConfig parse_sim_config(const nlohmann::json& j) {
  SimConfig cfg{parse_channel(j)};
  cfg.scheme = scheme_from_name(detail::cfg_get<std::string>(j, "scheme"));
  cfg.n = detail::cfg_get<std::size_t>(j, "n");
  cfg.B = detail::cfg_get_or<int>(j, "B", 1);
  cfg.trials = detail::cfg_get<std::size_t>(j, "trials");
  cfg.seed = detail::cfg_get_or<std::uint64_t>(j, "seed", 0);
  cfg.alpha = detail::cfg_get_or<double>(j, "alpha", 0.5);
  cfg.threads = detail::cfg_get_or<unsigned>(j, "threads", 1);
  cfg.op_budget = detail::cfg_get_or<double>(j, "op_budget", 1e10);

  const bool has_rate = j.contains("rate");
  const bool has_sizes = j.contains("sizes");
  const bool has_m = j.contains("M");
  require(int(has_rate) + int(has_sizes) + int(has_m) == 1, Errc::config_error,
          "specify exactly one of 'rate', 'sizes', or 'M'");
  if (has_rate) cfg.rate = detail::cfg_get<double>(j, "rate");
  if (has_sizes) {
    require(!is_coop(cfg.scheme), Errc::config_error,
            "cooperative schemes take a single 'M', not 'sizes'");
    cfg.sizes = detail::cfg_get<std::array<std::size_t, 3>>(j, "sizes");
  }
  if (has_m) {
    require(is_coop(cfg.scheme), Errc::config_error,
            "non-cooperative schemes take 'sizes', not 'M'");
    cfg.M = detail::cfg_get<std::size_t>(j, "M");
  }

  detail::validate_config(cfg);
  return cfg;
}

}  // namespace threeway
