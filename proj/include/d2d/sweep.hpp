#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2d/link.hpp"
#include "d2d/params.hpp"

namespace d2d {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One parameter sweep: a base configuration, the parameter(s) to vary, the
// scheme/mode/duplex combinations to evaluate at every point, and the Monte
// Carlo budget. Compound keys join several parameters with '+' so they move
// together (peak powers, symmetric link gains).
struct SweepSpec {
  NetworkParams base = default_params();
  std::string swept_key = "s";     // field name(s); "_db" suffix selects dB input
  bool swept_in_db = false;
  std::vector<double> values;      // in dB when swept_in_db, else linear
  std::vector<Selection> schemes = {Selection::Bulk, Selection::PerSubcarrier};
  std::vector<PowerControl> modes = {PowerControl::Dynamic, PowerControl::Static};
  std::vector<Duplex> duplexes = {Duplex::Full};
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 1;
  int workers = 0;                 // 0: decide from the hardware
  bool emit_analytic = true;
  bool emit_mc = true;
  // Measure the cellular uplink's outage instead of the D2D link's; this is
  // Monte Carlo only, so the analytic column is empty.
  bool cellular = false;
  // Append the surrogate-search and grid-oracle coordination factors as two
  // extra columns (used by the alpha sweep experiment).
  bool alpha_markers = false;
  // Record wall-clock per row. Off by default so reruns with the same seed
  // produce byte-identical files.
  bool measure_wall_time = false;
};

struct SweepRow {
  double value_db = 0.0;
  double value_linear = 0.0;
  Selection scheme = Selection::Bulk;
  PowerControl mode = PowerControl::Dynamic;
  Duplex duplex = Duplex::Full;
  double analytic = 0.0;           // NaN when unavailable or not requested
  bool analytic_failed = false;    // true when the engine reported instability
  OutageEstimate mc{};
  bool has_mc = false;
  double alpha_subopt = 0.0;       // filled only when alpha_markers is set
  double alpha_star = 0.0;
  double wall_ms = 0.0;
};

// Evaluates the sweep row by row: values outermost, then scheme, mode,
// duplex. Every Monte Carlo estimate reuses the spec seed, so rows that
// differ only in scheme or in a nested count share their random draws and
// the documented orderings hold exactly, not just statistically.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

// True when any row's analytic evaluation was refused as unstable.
bool any_analytic_failure(const std::vector<SweepRow>& rows);

// Writes the pinned CSV schema (two extra alpha columns when the spec asks
// for markers): LF line endings, %.12e for every real-valued column.
void write_csv(std::ostream& os, const SweepSpec& spec, const std::vector<SweepRow>& rows);

// Flat key=value configuration. '#' starts a comment. Keys are the network
// parameter names (with optional _db suffix), the sweep block (sweep.key,
// sweep.values) and the run controls (schemes, modes, duplexes, trials,
// seed, workers, emit_analytic, emit_mc, cellular, alpha_markers,
// measure_wall_time). Unknown keys are rejected.
SweepSpec parse_config(std::istream& in);
SweepSpec parse_config_file(const std::string& path);

// A named preset may expand to several sweeps written side by side (one CSV
// each); the suffix distinguishes the output files.
struct NamedSweep {
  std::string suffix;
  SweepSpec spec;
};

// Bundled experiment presets fig2..fig7. Unknown names are rejected.
std::vector<NamedSweep> builtin_experiment(const std::string& name);

}  // namespace d2d
