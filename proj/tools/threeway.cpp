// Command-line front end: capacity reports, seeded Monte Carlo simulation,
// rate sweeps, and the closed-form superposition check.
//
// Exit codes: 0 success, 1 bad configuration or usage, 2 complexity budget
// exceeded, 3 internal invariant violation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "threeway/config.hpp"
#include "threeway/engine.hpp"

namespace {

using threeway::Errc;

std::pair<double, double> parse_range(const std::string& s) {
  const auto cut = s.find(':');
  threeway::require(cut != std::string::npos && cut + 1 < s.size(), Errc::config_error,
                    "range must look like lo:hi");
  try {
    return {std::stod(s.substr(0, cut)), std::stod(s.substr(cut + 1))};
  } catch (const std::exception&) {
    threeway::fail(Errc::config_error, "cannot parse range '" + s + "'");
  }
}

std::vector<double> parse_grid(const std::string& s) {
  const auto c1 = s.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : s.find(':', c1 + 1);
  threeway::require(c2 != std::string::npos && c2 + 1 < s.size(), Errc::config_error,
                    "grid must look like start:stop:count");
  double start = 0.0, stop = 0.0;
  long long count = 0;
  try {
    start = std::stod(s.substr(0, c1));
    stop = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    count = std::stoll(s.substr(c2 + 1));
  } catch (const std::exception&) {
    threeway::fail(Errc::config_error, "cannot parse grid '" + s + "'");
  }
  threeway::require(count >= 1, Errc::config_error, "grid count must be >= 1");
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    v.push_back(start);
  } else {
    for (long long i = 0; i < count; ++i)
      v.push_back(start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return v;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  threeway::require(out.good(), Errc::config_error, "cannot open '" + path + "' for writing");
  out << content;
  threeway::require(out.good(), Errc::config_error, "failed writing '" + path + "'");
}

void apply_overrides(threeway::SimConfig& cfg, const std::optional<std::uint64_t>& seed,
                     const std::optional<std::size_t>& trials,
                     const std::optional<unsigned>& threads) {
  if (seed) cfg.seed = *seed;
  if (trials) cfg.trials = *trials;
  if (threads) cfg.threads = *threads;
  threeway::detail::validate_config(cfg);
}

int run(int argc, char** argv) {
  CLI::App app{"Capacity bounds and Monte Carlo simulation for three-way conferencing channels"};
  app.require_subcommand(1);

  std::string config_path, out_path, rates_spec, g12_spec = "0.01:100", g23_spec = "0.01:100";
  std::size_t grid = 200;
  std::optional<std::uint64_t> seed_opt;
  std::optional<std::size_t> trials_opt;
  std::optional<unsigned> threads_opt;

  auto* cap = app.add_subcommand("capacity", "Report rate regions and closed-form limits");
  cap->add_option("--config", config_path, "channel JSON")->required();
  cap->add_option("--out", out_path, "write the JSON report here instead of stdout");

  auto* sim = app.add_subcommand("simulate", "Run one seeded Monte Carlo experiment");
  sim->add_option("--config", config_path, "simulation JSON")->required();
  sim->add_option("--out", out_path, "CSV output path")->required();
  sim->add_option("--seed", seed_opt, "override the master seed");
  sim->add_option("--trials", trials_opt, "override the trial count");
  sim->add_option("--threads", threads_opt, "override the thread budget");

  auto* swp = app.add_subcommand("sweep", "Repeat an experiment across a rate grid");
  swp->add_option("--config", config_path, "simulation JSON")->required();
  swp->add_option("--rates", rates_spec, "rate grid start:stop:count")->required();
  swp->add_option("--out", out_path, "CSV output path")->required();
  swp->add_option("--seed", seed_opt, "override the master seed");
  swp->add_option("--trials", trials_opt, "override the trial count");
  swp->add_option("--threads", threads_opt, "override the thread budget");

  auto* sup = app.add_subcommand("check-superposition",
                                 "Compare the layered-scheme rate against 0.5*log2(1+g12+g23)");
  sup->add_option("--g12", g12_spec, "g12 range lo:hi (log-spaced)");
  sup->add_option("--g23", g23_spec, "g23 range lo:hi (log-spaced)");
  sup->add_option("--grid", grid, "points per axis");
  sup->add_option("--out", out_path, "CSV output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (*cap) {
    const auto channel = threeway::parse_channel(threeway::load_json_file(config_path));
    const std::string report = threeway::capacity_report(channel).dump(2) + "\n";
    if (out_path.empty())
      std::cout << report;
    else
      write_file(out_path, report);
    return 0;
  }

  if (*sim) {
    auto cfg = threeway::parse_sim_config(threeway::load_json_file(config_path));
    apply_overrides(cfg, seed_opt, trials_opt, threads_opt);
    const auto res = threeway::monte_carlo(cfg);
    write_file(out_path, threeway::SimResult::csv_header() + "\n" + res.csv_row() + "\n");
    std::printf("pe_hat=%.6g ci=[%.6g,%.6g] errors=%llu/%zu wall_ms=%.0f\n", res.pe_hat, res.ci_lo,
                res.ci_hi, static_cast<unsigned long long>(res.errors_any), res.trials,
                res.wall_ms);
    return 0;
  }

  if (*swp) {
    auto cfg = threeway::parse_sim_config(threeway::load_json_file(config_path));
    apply_overrides(cfg, seed_opt, trials_opt, threads_opt);
    const auto rows = threeway::rate_sweep(cfg, parse_grid(rates_spec));
    std::string csv = threeway::SimResult::csv_header() + "\n";
    for (const auto& r : rows) csv += r.csv_row() + "\n";
    write_file(out_path, csv);
    std::printf("wrote %zu rows to %s\n", rows.size(), out_path.c_str());
    return 0;
  }

  if (*sup) {
    const auto [g12_lo, g12_hi] = parse_range(g12_spec);
    const auto [g23_lo, g23_hi] = parse_range(g23_spec);
    const auto chk = threeway::check_superposition(g12_lo, g12_hi, g23_lo, g23_hi, grid);
    std::string csv = "g12,g23,r_triple_prime,equal_rate_bound,margin\n";
    char buf[256];
    for (const auto& row : chk.rows) {
      std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g\n", row.g12, row.g23, row.r3,
                    row.bound, row.margin);
      csv += buf;
    }
    write_file(out_path, csv);
    std::printf("verdict=%s min_margin=%.6g points=%zu\n", chk.pass ? "pass" : "fail",
                chk.min_margin, chk.rows.size());
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const threeway::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.code()) {
      case Errc::budget_exceeded: return 2;
      case Errc::internal: return 3;
      default: return 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
}
