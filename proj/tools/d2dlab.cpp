// Command-line front end: config-driven sweeps, bundled experiments and the
// power-coordination optimizer, all writing the same CSV schema.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "d2d/analytic.hpp"
#include "d2d/optimize.hpp"
#include "d2d/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitUnstable = 3;

struct Overrides {
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool timing = false;
};

void apply_overrides(d2d::SweepSpec& spec, const Overrides& ov) {
  if (ov.trials) spec.trials = *ov.trials;
  if (ov.seed) spec.seed = *ov.seed;
  if (ov.workers) spec.workers = *ov.workers;
  if (ov.timing) spec.measure_wall_time = true;
}

// Runs one sweep and writes its CSV; returns whether any analytic cell was
// refused as unstable (the file is still written in full).
bool run_and_write(const d2d::SweepSpec& spec, const std::string& path) {
  const std::vector<d2d::SweepRow> rows = d2d::run_sweep(spec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw d2d::ConfigError("cannot open output file '" + path + "'");
  d2d::write_csv(out, spec, rows);
  out.close();
  std::cout << path << ": " << rows.size() << " rows\n";
  return d2d::any_analytic_failure(rows);
}

d2d::Selection scheme_from(const std::string& v) {
  if (v == "bulk") return d2d::Selection::Bulk;
  if (v == "per_subcarrier") return d2d::Selection::PerSubcarrier;
  if (v == "random") return d2d::Selection::Random;
  throw d2d::ConfigError("unknown scheme '" + v + "'");
}

d2d::Duplex duplex_from(const std::string& v) {
  if (v == "full") return d2d::Duplex::Full;
  if (v == "half") return d2d::Duplex::Half;
  if (v == "ideal_full") return d2d::Duplex::IdealFull;
  throw d2d::ConfigError("unknown duplex '" + v + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relay-assisted D2D outage laboratory"};
  app.require_subcommand(1);

  // --- run: one sweep from a config file ---------------------------------
  std::string run_config, run_out;
  Overrides run_ov;
  CLI::App* run = app.add_subcommand("run", "Run a sweep described by a config file");
  run->add_option("--config", run_config, "Config file (key = value lines)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "Output CSV path")->required();
  run->add_option("--trials", run_ov.trials, "Override Monte Carlo trials per row");
  run->add_option("--seed", run_ov.seed, "Override the random seed");
  run->add_option("--workers", run_ov.workers, "Override the worker thread count");
  run->add_flag("--timing", run_ov.timing, "Record wall-clock per row (breaks byte-identical reruns)");

  // --- experiment: bundled presets ----------------------------------------
  std::string exp_name, exp_out;
  Overrides exp_ov;
  CLI::App* exp = app.add_subcommand("experiment", "Run a bundled experiment preset");
  exp->add_option("name", exp_name, "Preset name (fig2..fig7)")->required();
  exp->add_option("--out", exp_out, "Output directory for the preset's CSV files")->required();
  exp->add_option("--trials", exp_ov.trials, "Override Monte Carlo trials per row");
  exp->add_option("--seed", exp_ov.seed, "Override the random seed");
  exp->add_option("--workers", exp_ov.workers, "Override the worker thread count");
  exp->add_flag("--timing", exp_ov.timing, "Record wall-clock per row");

  // --- optimize: power coordination factor --------------------------------
  std::string opt_config, opt_mode, opt_scheme = "per_subcarrier", opt_duplex = "full";
  int opt_grid = 99;
  std::uint64_t opt_trials = 1000000, opt_seed = 1;
  CLI::App* opt = app.add_subcommand("optimize", "Search the power coordination factor");
  opt->add_option("--config", opt_config, "Config file providing the base parameters")
      ->required()
      ->check(CLI::ExistingFile);
  opt->add_option("--mode", opt_mode, "Power control mode: dynamic or static")
      ->required()
      ->check(CLI::IsMember({"dynamic", "static"}));
  opt->add_option("--scheme", opt_scheme, "Selection scheme for the achieved outage")
      ->check(CLI::IsMember({"bulk", "per_subcarrier", "random"}));
  opt->add_option("--duplex", opt_duplex, "Duplex mode")
      ->check(CLI::IsMember({"full", "half", "ideal_full"}));
  opt->add_option("--grid", opt_grid, "Grid points for the oracle")->check(CLI::Range(3, 100000));
  opt->add_option("--trials", opt_trials, "Monte Carlo trials per grid point (random scheme)");
  opt->add_option("--seed", opt_seed, "Random seed for the grid oracle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      d2d::SweepSpec spec = d2d::parse_config_file(run_config);
      apply_overrides(spec, run_ov);
      const bool unstable = run_and_write(spec, run_out);
      return unstable ? kExitUnstable : kExitOk;
    }

    if (*exp) {
      std::vector<d2d::NamedSweep> sweeps = d2d::builtin_experiment(exp_name);
      std::filesystem::create_directories(exp_out);
      bool unstable = false;
      for (d2d::NamedSweep& ns : sweeps) {
        apply_overrides(ns.spec, exp_ov);
        const std::filesystem::path path =
            std::filesystem::path(exp_out) / (exp_name + ns.suffix + ".csv");
        unstable = run_and_write(ns.spec, path.string()) || unstable;
      }
      return unstable ? kExitUnstable : kExitOk;
    }

    if (*opt) {
      const d2d::SweepSpec spec = d2d::parse_config_file(opt_config);
      const d2d::PowerControl mode = opt_mode == "dynamic" ? d2d::PowerControl::Dynamic
                                                           : d2d::PowerControl::Static;
      const d2d::Selection scheme = scheme_from(opt_scheme);
      const d2d::Duplex duplex = duplex_from(opt_duplex);
      const d2d::AlphaSearchResult sub =
          d2d::suboptimal_alpha(spec.base, mode, scheme == d2d::Selection::Random
                                                     ? d2d::Selection::PerSubcarrier
                                                     : scheme,
                                duplex);
      const d2d::AlphaSearchResult star = d2d::optimal_alpha_grid(
          spec.base, mode, scheme, duplex, opt_grid, opt_trials, opt_seed);
      std::printf("mode=%s scheme=%s duplex=%s\n", opt_mode.c_str(), opt_scheme.c_str(),
                  opt_duplex.c_str());
      std::printf("suboptimal: alpha=%.9f surrogate_sir=%.6e outage=%.6e unimodal=%s\n",
                  sub.alpha, sub.objective, sub.achieved_outage.probability,
                  sub.unimodal ? "yes" : "no");
      std::printf("grid_oracle: alpha=%.9f outage=%.6e grid_points=%d\n", star.alpha,
                  star.achieved_outage.probability, opt_grid);
      return kExitOk;
    }
  } catch (const d2d::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const d2d::AnalyticInstability& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnstable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
