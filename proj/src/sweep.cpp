#include "d2d/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "d2d/analytic.hpp"
#include "d2d/optimize.hpp"

namespace d2d {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value '" + v + "' for " + key);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw ConfigError("config: bad count '" + v + "' for " + key);
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: bad flag '" + v + "' for " + key);
}

Selection parse_scheme(const std::string& v) {
  if (v == "bulk") return Selection::Bulk;
  if (v == "per_subcarrier") return Selection::PerSubcarrier;
  if (v == "random") return Selection::Random;
  throw ConfigError("config: unknown scheme '" + v + "'");
}

PowerControl parse_mode(const std::string& v) {
  if (v == "dynamic") return PowerControl::Dynamic;
  if (v == "static") return PowerControl::Static;
  throw ConfigError("config: unknown mode '" + v + "'");
}

Duplex parse_duplex(const std::string& v) {
  if (v == "full") return Duplex::Full;
  if (v == "half") return Duplex::Half;
  if (v == "ideal_full") return Duplex::IdealFull;
  throw ConfigError("config: unknown duplex '" + v + "'");
}

double* double_field(NetworkParams& p, const std::string& name) {
  if (name == "mu_sr") return &p.mu_sr;
  if (name == "mu_rd") return &p.mu_rd;
  if (name == "mu_sb") return &p.mu_sb;
  if (name == "mu_rb") return &p.mu_rb;
  if (name == "mu_cr") return &p.mu_cr;
  if (name == "mu_cd") return &p.mu_cd;
  if (name == "mu_cb") return &p.mu_cb;
  if (name == "phi_bar") return &p.phi_bar;
  if (name == "p_c") return &p.p_c;
  if (name == "p_s_max") return &p.p_s_max;
  if (name == "p_r_max") return &p.p_r_max;
  if (name == "xi") return &p.xi;
  if (name == "s") return &p.s;
  if (name == "alpha") return &p.alpha;
  if (name == "kappa") return &p.kappa;
  return nullptr;
}

int* int_field(NetworkParams& p, const std::string& name) {
  if (name == "n_relays") return &p.n_relays;
  if (name == "n_subcarriers") return &p.n_subcarriers;
  return nullptr;
}

// Strips a trailing "_db" and reports whether it was present.
std::string strip_db(const std::string& key, bool* in_db) {
  if (key.size() > 3 && key.compare(key.size() - 3, 3, "_db") == 0) {
    *in_db = true;
    return key.substr(0, key.size() - 3);
  }
  *in_db = false;
  return key;
}

// Assigns one parameter by name; `value` arrives in the key's declared unit.
void apply_param(NetworkParams& p, const std::string& name, bool in_db, double value,
                 const std::string& context) {
  if (double* f = double_field(p, name)) {
    *f = in_db ? db_to_linear(value) : value;
    return;
  }
  if (int* f = int_field(p, name)) {
    if (in_db) throw ConfigError(context + ": counts cannot be given in dB");
    const double r = std::round(value);
    if (!(std::fabs(value - r) < 1e-9) || r < 1.0)
      throw ConfigError(context + ": '" + name + "' needs a positive integer");
    *f = static_cast<int>(r);
    return;
  }
  throw ConfigError(context + ": unknown parameter '" + name + "'");
}

// Swept key, possibly compound ("p_s_max+p_r_max"); every part must agree
// on whether it carries the _db suffix.
struct SweptKey {
  std::vector<std::string> names;
  bool in_db = false;
};

SweptKey resolve_swept_key(const std::string& key) {
  SweptKey out;
  NetworkParams probe = default_params();
  bool first = true;
  for (const std::string& part : split(key, '+')) {
    if (part.empty()) throw ConfigError("config: empty name in sweep.key");
    bool in_db = false;
    const std::string name = strip_db(part, &in_db);
    if (double_field(probe, name) == nullptr && int_field(probe, name) == nullptr)
      throw ConfigError("config: sweep.key names unknown parameter '" + name + "'");
    if (first) {
      out.in_db = in_db;
      first = false;
    } else if (in_db != out.in_db) {
      throw ConfigError("config: sweep.key parts disagree on the _db suffix");
    }
    out.names.push_back(name);
  }
  return out;
}

void format_real(std::string& line, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  line += buf;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw ConfigError("sweep: no values to sweep");
  if (spec.schemes.empty() || spec.modes.empty() || spec.duplexes.empty())
    throw ConfigError("sweep: schemes, modes and duplexes must be non-empty");
  if (spec.emit_mc && spec.trials == 0)
    throw ConfigError("sweep: trials must be positive when Monte Carlo is enabled");
  // swept_key is canonical (suffix-free) in parsed and preset specs, with
  // swept_in_db carrying the unit; a suffixed key string is also accepted,
  // but then the flag must not contradict it.
  const SweptKey key = resolve_swept_key(spec.swept_key);
  if (key.in_db && !spec.swept_in_db)
    throw ConfigError("sweep: swept_in_db disagrees with the key suffix");

  // The markers are a property of the base configuration, one pair per
  // (scheme, mode): computed lazily since the grid oracle is not free.
  std::map<std::pair<int, int>, std::pair<double, double>> markers;
  auto marker_for = [&](Selection scheme, PowerControl mode) {
    const auto k = std::make_pair(static_cast<int>(scheme), static_cast<int>(mode));
    auto it = markers.find(k);
    if (it != markers.end()) return it->second;
    const double sub = suboptimal_alpha(spec.base, mode).alpha;
    const std::uint64_t grid_trials = std::min<std::uint64_t>(spec.trials, 200000);
    const double star =
        optimal_alpha_grid(spec.base, mode, scheme, spec.duplexes.front(), 99,
                           grid_trials, spec.seed)
            .alpha;
    return markers.emplace(k, std::make_pair(sub, star)).first->second;
  };

  std::vector<SweepRow> rows;
  rows.reserve(spec.values.size() * spec.schemes.size() * spec.modes.size() *
               spec.duplexes.size());
  for (double v : spec.values) {
    NetworkParams params = spec.base;
    for (const std::string& name : key.names)
      apply_param(params, name, spec.swept_in_db, v, "sweep");
    try {
      params.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("sweep: value makes parameters invalid: ") + e.what());
    }
    const double linear = spec.swept_in_db ? db_to_linear(v) : v;
    const double in_db = spec.swept_in_db ? v : linear_to_db(v);
    for (Selection scheme : spec.schemes) {
      for (PowerControl mode : spec.modes) {
        for (Duplex duplex : spec.duplexes) {
          SweepRow row;
          row.value_db = in_db;
          row.value_linear = linear;
          row.scheme = scheme;
          row.mode = mode;
          row.duplex = duplex;
          row.analytic = kNan;
          const auto t0 = std::chrono::steady_clock::now();
          if (!spec.cellular && spec.emit_analytic && scheme != Selection::Random) {
            try {
              row.analytic = analytic_outage(params, scheme, mode, duplex);
            } catch (const AnalyticInstability&) {
              row.analytic_failed = true;
            }
          }
          if (spec.emit_mc) {
            row.mc = spec.cellular
                         ? cellular_outage(params, mode, duplex, scheme, spec.trials,
                                           spec.seed, spec.workers)
                         : estimate_outage(params, mode, duplex, scheme, spec.trials,
                                           spec.seed, spec.workers);
            row.has_mc = true;
          }
          if (spec.measure_wall_time) {
            const auto t1 = std::chrono::steady_clock::now();
            row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
          }
          if (spec.alpha_markers) {
            const auto m = marker_for(scheme, mode);
            row.alpha_subopt = m.first;
            row.alpha_star = m.second;
          }
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

bool any_analytic_failure(const std::vector<SweepRow>& rows) {
  return std::any_of(rows.begin(), rows.end(),
                     [](const SweepRow& r) { return r.analytic_failed; });
}

void write_csv(std::ostream& os, const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  std::string line =
      "swept_value_db,swept_value_linear,scheme,mode,duplex,analytic,"
      "mc_estimate,mc_halfwidth,trials,seed,wall_ms";
  if (spec.alpha_markers) line += ",alpha_subopt,alpha_star";
  os << line << '\n';
  for (const SweepRow& r : rows) {
    line.clear();
    format_real(line, r.value_db);
    line += ',';
    format_real(line, r.value_linear);
    line += ',';
    line += to_string(r.scheme);
    line += ',';
    line += to_string(r.mode);
    line += ',';
    line += to_string(r.duplex);
    line += ',';
    format_real(line, r.analytic);
    line += ',';
    format_real(line, r.has_mc ? r.mc.probability : kNan);
    line += ',';
    format_real(line, r.has_mc ? r.mc.half_width : kNan);
    line += ',';
    line += std::to_string(r.has_mc ? r.mc.trials : 0);
    line += ',';
    line += std::to_string(spec.seed);
    line += ',';
    format_real(line, r.wall_ms);
    if (spec.alpha_markers) {
      line += ',';
      format_real(line, r.alpha_subopt);
      line += ',';
      format_real(line, r.alpha_star);
    }
    os << line << '\n';
  }
}

SweepSpec parse_config(std::istream& in) {
  SweepSpec spec;
  spec.values.clear();
  bool have_key = false;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");

    if (key == "sweep.key") {
      const SweptKey resolved = resolve_swept_key(value);  // validates names
      spec.swept_in_db = resolved.in_db;
      // Strip the suffixes: SweepSpec carries dB-ness separately.
      std::string plain;
      for (const std::string& n : resolved.names) {
        if (!plain.empty()) plain += '+';
        plain += n;
      }
      spec.swept_key = plain;
      have_key = true;
    } else if (key == "sweep.values") {
      for (const std::string& part : split(value, ',')) {
        if (part.empty()) continue;
        spec.values.push_back(parse_double("sweep.values", part));
      }
      if (spec.values.empty()) throw ConfigError("config: sweep.values is empty");
    } else if (key == "schemes") {
      spec.schemes.clear();
      for (const std::string& part : split(value, ','))
        if (!part.empty()) spec.schemes.push_back(parse_scheme(part));
    } else if (key == "modes") {
      spec.modes.clear();
      for (const std::string& part : split(value, ','))
        if (!part.empty()) spec.modes.push_back(parse_mode(part));
    } else if (key == "duplexes") {
      spec.duplexes.clear();
      for (const std::string& part : split(value, ','))
        if (!part.empty()) spec.duplexes.push_back(parse_duplex(part));
    } else if (key == "trials") {
      spec.trials = parse_u64(key, value);
    } else if (key == "seed") {
      spec.seed = parse_u64(key, value);
    } else if (key == "workers") {
      spec.workers = static_cast<int>(parse_u64(key, value));
    } else if (key == "emit_analytic") {
      spec.emit_analytic = parse_bool(key, value);
    } else if (key == "emit_mc") {
      spec.emit_mc = parse_bool(key, value);
    } else if (key == "cellular") {
      spec.cellular = parse_bool(key, value);
    } else if (key == "alpha_markers") {
      spec.alpha_markers = parse_bool(key, value);
    } else if (key == "measure_wall_time") {
      spec.measure_wall_time = parse_bool(key, value);
    } else {
      bool in_db = false;
      const std::string name = strip_db(key, &in_db);
      apply_param(spec.base, name, in_db, parse_double(key, value),
                  "config line " + std::to_string(lineno));
    }
  }
  if (!have_key) throw ConfigError("config: missing sweep.key");
  if (spec.values.empty()) throw ConfigError("config: missing sweep.values");
  try {
    spec.base.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid base parameters: ") + e.what());
  }
  return spec;
}

SweepSpec parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in);
}

namespace {

std::vector<double> linspace_db(double lo, double hi, double step) {
  std::vector<double> v;
  for (double x = lo; x <= hi + 1e-9; x += step) v.push_back(x);
  return v;
}

SweepSpec section_v_spec() {
  SweepSpec s;
  s.base = default_params();
  s.trials = 1000000;
  s.seed = 1;
  return s;
}

}  // namespace

std::vector<NamedSweep> builtin_experiment(const std::string& name) {
  std::vector<NamedSweep> out;
  if (name == "fig2") {
    // Outage against the peak transmit power for every (N, K) pairing of
    // {2,4}; one file per pairing so each keeps the pinned schema.
    for (int n : {2, 4}) {
      for (int k : {2, 4}) {
        SweepSpec s = section_v_spec();
        s.base.n_relays = n;
        s.base.n_subcarriers = k;
        s.swept_key = "p_s_max+p_r_max";
        s.swept_in_db = true;
        s.values = linspace_db(-10.0, 30.0, 5.0);
        out.push_back({"_n" + std::to_string(n) + "_k" + std::to_string(k), s});
      }
    }
  } else if (name == "fig3") {
    // Outage against the D2D desired-link quality, with the random-selection
    // baseline alongside both selection schemes.
    SweepSpec s = section_v_spec();
    s.swept_key = "mu_sr+mu_rd";
    s.swept_in_db = true;
    s.values = linspace_db(20.0, 40.0, 2.0);
    s.schemes = {Selection::Bulk, Selection::PerSubcarrier, Selection::Random};
    out.push_back({"", s});
  } else if (name == "fig4") {
    // (a) reporter-path gains up, outage up; (b) cross-interference gains.
    SweepSpec a = section_v_spec();
    a.swept_key = "mu_sb+mu_rb";
    a.swept_in_db = true;
    a.values = linspace_db(0.0, 20.0, 2.0);
    out.push_back({"_a", a});
    SweepSpec b = section_v_spec();
    b.swept_key = "mu_cr+mu_cd";
    b.swept_in_db = true;
    b.values = linspace_db(-4.0, 10.0, 2.0);
    out.push_back({"_b", b});
  } else if (name == "fig5") {
    // Static-control protection factor study: D2D outage and the cellular
    // uplink's outage against the reporter gain, for three kappa settings.
    for (int kappa : {2, 4, 8}) {
      SweepSpec s = section_v_spec();
      s.base.kappa = kappa;
      s.swept_key = "mu_cb";
      s.swept_in_db = true;
      s.values = linspace_db(10.0, 30.0, 2.0);
      out.push_back({"_kappa" + std::to_string(kappa), s});
      SweepSpec c = s;
      c.cellular = true;
      c.emit_analytic = false;
      out.push_back({"_kappa" + std::to_string(kappa) + "_cellular", c});
    }
  } else if (name == "fig6") {
    // Residual self-interference sweep across the three duplex modes.
    SweepSpec s = section_v_spec();
    s.swept_key = "phi_bar";
    s.swept_in_db = true;
    s.values = linspace_db(-10.0, 25.0, 5.0);
    s.modes = {PowerControl::Dynamic};
    s.duplexes = {Duplex::Full, Duplex::Half, Duplex::IdealFull};
    out.push_back({"", s});
  } else if (name == "fig7") {
    // Power coordination factor sweep with the optimizer's pick and the
    // grid oracle's pick recorded per (scheme, mode).
    SweepSpec s = section_v_spec();
    s.swept_key = "alpha";
    s.swept_in_db = false;
    s.values.clear();
    for (int i = 1; i <= 19; ++i) s.values.push_back(0.05 * i);
    s.alpha_markers = true;
    out.push_back({"", s});
  } else {
    throw ConfigError("unknown experiment '" + name + "'");
  }
  return out;
}

}  // namespace d2d
