#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "d2d/analytic.hpp"
#include "d2d/sweep.hpp"
#include "doctest.h"

using namespace d2d;

namespace {

SweepSpec tiny_spec() {
  SweepSpec s;
  s.base = default_params();
  s.base.n_relays = 2;
  s.base.n_subcarriers = 2;
  s.swept_key = "s";
  s.swept_in_db = false;
  s.values = {1.0, 2.0};
  s.schemes = {Selection::Bulk};
  s.modes = {PowerControl::Dynamic};
  s.duplexes = {Duplex::Full};
  s.trials = 4000;
  s.seed = 3;
  s.workers = 1;
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("config parsing: full round trip") {
  std::istringstream in(
      "# comment line\n"
      "mu_sr_db = 30        # inline comment\n"
      "n_relays = 2\n"
      "n_subcarriers = 3\n"
      "kappa = 8\n"
      "trials = 5000\n"
      "seed = 9\n"
      "workers = 2\n"
      "schemes = bulk, per_subcarrier, random\n"
      "modes = dynamic\n"
      "duplexes = full, half, ideal_full\n"
      "emit_analytic = false\n"
      "alpha_markers = on\n"
      "sweep.key = p_s_max_db+p_r_max_db\n"
      "sweep.values = -10, 0, 10\n");
  SweepSpec s = parse_config(in);
  CHECK(s.base.mu_sr == doctest::Approx(1000.0).epsilon(1e-12));
  CHECK(s.base.n_relays == 2);
  CHECK(s.base.n_subcarriers == 3);
  CHECK(s.base.kappa == 8.0);
  CHECK(s.trials == 5000);
  CHECK(s.seed == 9);
  CHECK(s.workers == 2);
  REQUIRE(s.schemes.size() == 3);
  CHECK(s.schemes[2] == Selection::Random);
  REQUIRE(s.modes.size() == 1);
  CHECK(s.modes[0] == PowerControl::Dynamic);
  REQUIRE(s.duplexes.size() == 3);
  CHECK(s.duplexes[1] == Duplex::Half);
  CHECK_FALSE(s.emit_analytic);
  CHECK(s.emit_mc);
  CHECK(s.alpha_markers);
  CHECK(s.swept_key == "p_s_max+p_r_max");  // suffix moves into the flag
  CHECK(s.swept_in_db);
  REQUIRE(s.values.size() == 3);
  CHECK(s.values[1] == 0.0);
}

TEST_CASE("config parsing: rejections") {
  auto reject = [](const char* text) {
    std::istringstream in(text);
    CHECK_THROWS_AS(parse_config(in), ConfigError);
  };
  reject("bogus = 3\nsweep.key = s\nsweep.values = 1\n");
  reject("mu_sr = 1000\n");                             // no sweep block
  reject("sweep.key = s\n");                            // no values
  reject("sweep.key = s+mu_sr_db\nsweep.values = 1\n"); // mixed units
  reject("sweep.key = s\nsweep.values = 1, x\n");
  reject("schemes = bulky\nsweep.key = s\nsweep.values = 1\n");
  reject("modes = off\nsweep.key = s\nsweep.values = 1\n");
  reject("duplexes = simplex\nsweep.key = s\nsweep.values = 1\n");
  reject("mu_sr = abc\nsweep.key = s\nsweep.values = 1\n");
  reject("just a line\nsweep.key = s\nsweep.values = 1\n");
  reject("n_relays = 2.5\nsweep.key = s\nsweep.values = 1\n");
  reject("n_relays = 0\nsweep.key = s\nsweep.values = 1\n");
  reject("n_relays_db = 2\nsweep.key = s\nsweep.values = 1\n");
  reject("trials = 10x\nsweep.key = s\nsweep.values = 1\n");
  reject("cellular = maybe\nsweep.key = s\nsweep.values = 1\n");
  reject("alpha = 1.5\nsweep.key = s\nsweep.values = 1\n");  // invalid base
  reject("sweep.key = \nsweep.values = 1\n");
}

TEST_CASE("run_sweep: rows, ordering and shared-draw inequalities") {
  SweepSpec s = tiny_spec();
  s.schemes = {Selection::Bulk, Selection::PerSubcarrier};
  auto rows = run_sweep(s);
  REQUIRE(rows.size() == 4);  // values outermost, then scheme

  CHECK(rows[0].value_linear == 1.0);
  CHECK(rows[0].value_db == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(rows[0].scheme == Selection::Bulk);
  CHECK(rows[1].scheme == Selection::PerSubcarrier);
  CHECK(rows[2].value_linear == 2.0);
  CHECK(rows[2].value_db == doctest::Approx(10.0 * std::log10(2.0)).epsilon(1e-12));

  for (const auto& r : rows) {
    CHECK(r.has_mc);
    CHECK(r.mc.trials == 4000);
    CHECK_FALSE(r.analytic_failed);
    CHECK(std::isfinite(r.analytic));
    CHECK(r.analytic >= 0.0);
    CHECK(r.analytic <= 1.0);
  }
  // harsher threshold, more outage
  CHECK(rows[2].analytic > rows[0].analytic);
  // same draws, so the per-subcarrier refinement wins pointwise
  CHECK(rows[1].mc.probability <= rows[0].mc.probability);
  CHECK_FALSE(any_analytic_failure(rows));
}

TEST_CASE("run_sweep: dB-keyed values fill both value columns") {
  SweepSpec s = tiny_spec();
  s.swept_in_db = true;
  s.values = {0.0, 3.0};
  s.emit_mc = false;
  auto rows = run_sweep(s);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].value_db == 0.0);
  CHECK(rows[0].value_linear == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rows[1].value_db == 3.0);
  CHECK(rows[1].value_linear == doctest::Approx(std::pow(10.0, 0.3)).epsilon(1e-15));
  CHECK_FALSE(rows[0].has_mc);
}

TEST_CASE("run_sweep: refusals") {
  CHECK_THROWS_AS(
      [] {
        SweepSpec s = tiny_spec();
        s.values.clear();
        run_sweep(s);
      }(),
      ConfigError);
  CHECK_THROWS_AS(
      [] {
        SweepSpec s = tiny_spec();
        s.trials = 0;
        run_sweep(s);
      }(),
      ConfigError);
  CHECK_THROWS_AS(
      [] {
        SweepSpec s = tiny_spec();
        s.swept_key = "s_db";  // suffixed key text contradicts the unit flag
        s.swept_in_db = false;
        run_sweep(s);
      }(),
      ConfigError);
  CHECK_THROWS_AS(
      [] {
        SweepSpec s = tiny_spec();
        s.values = {-1.0};  // invalid threshold
        run_sweep(s);
      }(),
      ConfigError);
  CHECK_THROWS_AS(
      [] {
        SweepSpec s = tiny_spec();
        s.schemes.clear();
        run_sweep(s);
      }(),
      ConfigError);
}

TEST_CASE("run_sweep: cellular rows are monte carlo only") {
  SweepSpec s = tiny_spec();
  s.cellular = true;
  s.values = {1.0};
  s.trials = 2000;
  s.modes = {PowerControl::Dynamic, PowerControl::Static};
  auto rows = run_sweep(s);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(std::isnan(r.analytic));
    CHECK(r.has_mc);
  }
  // dynamic control protects the uplink by construction
  CHECK(rows[0].mc.probability == 0.0);
  CHECK(rows[1].mc.probability > 0.0);
}

TEST_CASE("run_sweep: alpha markers are a base-config property") {
  SweepSpec s = tiny_spec();
  s.swept_key = "alpha";
  s.values = {0.3, 0.5};
  s.schemes = {Selection::PerSubcarrier};
  s.trials = 2000;
  s.alpha_markers = true;
  auto rows = run_sweep(s);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].alpha_subopt == rows[1].alpha_subopt);
  CHECK(rows[0].alpha_star == rows[1].alpha_star);
  CHECK(rows[0].alpha_subopt > 0.0);
  CHECK(rows[0].alpha_subopt < 1.0);
  CHECK(rows[0].alpha_star > 0.0);
  CHECK(rows[0].alpha_star < 1.0);
}

TEST_CASE("run_sweep: unstable analytic request degrades to monte carlo") {
  SweepSpec s = tiny_spec();
  s.base.n_relays = kMaxAnalyticRelays + 1;
  s.values = {1.0};
  s.trials = 1000;
  auto rows = run_sweep(s);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].analytic_failed);
  CHECK(std::isnan(rows[0].analytic));
  CHECK(rows[0].has_mc);
  CHECK(any_analytic_failure(rows));
}

TEST_CASE("csv writer") {
  SweepSpec s = tiny_spec();
  s.values = {1.0};
  s.trials = 1000;
  auto rows = run_sweep(s);

  std::ostringstream os;
  write_csv(os, s, rows);
  const std::string text = os.str();
  CHECK(text.find('\r') == std::string::npos);

  std::istringstream lines(text);
  std::string header;
  REQUIRE(std::getline(lines, header));
  CHECK(header ==
        "swept_value_db,swept_value_linear,scheme,mode,duplex,analytic,"
        "mc_estimate,mc_halfwidth,trials,seed,wall_ms");

  std::string row;
  REQUIRE(std::getline(lines, row));
  auto cols = split_csv_line(row);
  REQUIRE(cols.size() == 11);
  const std::regex sci(R"(-?\d\.\d{12}e[+-]\d{2,3})");
  CHECK(std::regex_match(cols[0], sci));
  CHECK(std::regex_match(cols[1], sci));
  CHECK(cols[2] == "bulk");
  CHECK(cols[3] == "dynamic");
  CHECK(cols[4] == "full");
  CHECK(std::regex_match(cols[5], sci));
  CHECK(std::regex_match(cols[6], sci));
  CHECK(std::regex_match(cols[7], sci));
  CHECK(cols[8] == "1000");
  CHECK(cols[9] == "3");
  CHECK(std::regex_match(cols[10], sci));
  CHECK(cols[10].substr(0, 5) == "0.000");  // timing off by default

  SUBCASE("reruns are byte-identical") {
    auto again = run_sweep(s);
    std::ostringstream os2;
    write_csv(os2, s, again);
    CHECK(os2.str() == text);
  }

  SUBCASE("suppressed analytic column prints nan") {
    SweepSpec off = s;
    off.emit_analytic = false;
    auto r2 = run_sweep(off);
    std::ostringstream os2;
    write_csv(os2, off, r2);
    std::istringstream l2(os2.str());
    std::string h2, d2;
    std::getline(l2, h2);
    std::getline(l2, d2);
    CHECK(split_csv_line(d2)[5] == "nan");
  }

  SUBCASE("marker columns extend the header") {
    SweepSpec m = s;
    m.swept_key = "alpha";
    m.values = {0.4};
    m.alpha_markers = true;
    m.emit_mc = false;
    auto r2 = run_sweep(m);
    std::ostringstream os2;
    write_csv(os2, m, r2);
    std::istringstream l2(os2.str());
    std::string h2, d2;
    std::getline(l2, h2);
    CHECK(h2 ==
          "swept_value_db,swept_value_linear,scheme,mode,duplex,analytic,"
          "mc_estimate,mc_halfwidth,trials,seed,wall_ms,alpha_subopt,alpha_star");
    std::getline(l2, d2);
    CHECK(split_csv_line(d2).size() == 13);
  }

  SUBCASE("wall clock column is opt-in") {
    SweepSpec t = s;
    t.measure_wall_time = true;
    auto r2 = run_sweep(t);
    std::ostringstream os2;
    write_csv(os2, t, r2);
    std::istringstream l2(os2.str());
    std::string h2, d2;
    std::getline(l2, h2);
    std::getline(l2, d2);
    const double ms = std::stod(split_csv_line(d2)[10]);
    CHECK(ms > 0.0);
  }
}

TEST_CASE("experiment presets") {
  SUBCASE("peak power study") {
    auto fig2 = builtin_experiment("fig2");
    REQUIRE(fig2.size() == 4);
    CHECK(fig2[0].suffix == "_n2_k2");
    CHECK(fig2[3].suffix == "_n4_k4");
    for (const auto& ns : fig2) {
      CHECK(ns.spec.swept_key == "p_s_max+p_r_max");
      CHECK(ns.spec.swept_in_db);
      REQUIRE(ns.spec.values.size() == 9);
      CHECK(ns.spec.values.front() == -10.0);
      CHECK(ns.spec.values.back() == 30.0);
      CHECK(ns.spec.trials == 1000000);
      CHECK(ns.spec.seed == 1);
    }
    CHECK(fig2[1].spec.base.n_relays == 2);
    CHECK(fig2[1].spec.base.n_subcarriers == 4);
  }
  SUBCASE("desired link quality with random baseline") {
    auto fig3 = builtin_experiment("fig3");
    REQUIRE(fig3.size() == 1);
    CHECK(fig3[0].spec.swept_key == "mu_sr+mu_rd");
    CHECK(fig3[0].spec.values.size() == 11);
    REQUIRE(fig3[0].spec.schemes.size() == 3);
    CHECK(fig3[0].spec.schemes[2] == Selection::Random);
  }
  SUBCASE("reporter and cross paths") {
    auto fig4 = builtin_experiment("fig4");
    REQUIRE(fig4.size() == 2);
    CHECK(fig4[0].suffix == "_a");
    CHECK(fig4[0].spec.swept_key == "mu_sb+mu_rb");
    CHECK(fig4[1].suffix == "_b");
    CHECK(fig4[1].spec.swept_key == "mu_cr+mu_cd");
    CHECK(fig4[1].spec.values.front() == -4.0);
  }
  SUBCASE("protection factor pairs d2d and cellular sweeps") {
    auto fig5 = builtin_experiment("fig5");
    REQUIRE(fig5.size() == 6);
    CHECK(fig5[0].suffix == "_kappa2");
    CHECK(fig5[1].suffix == "_kappa2_cellular");
    CHECK(fig5[1].spec.cellular);
    CHECK_FALSE(fig5[1].spec.emit_analytic);
    CHECK_FALSE(fig5[0].spec.cellular);
    CHECK(fig5[4].spec.base.kappa == 8.0);
    for (const auto& ns : fig5) CHECK(ns.spec.swept_key == "mu_cb");
  }
  SUBCASE("self-interference across duplex modes") {
    auto fig6 = builtin_experiment("fig6");
    REQUIRE(fig6.size() == 1);
    CHECK(fig6[0].spec.swept_key == "phi_bar");
    CHECK(fig6[0].spec.values.size() == 8);
    REQUIRE(fig6[0].spec.modes.size() == 1);
    CHECK(fig6[0].spec.duplexes.size() == 3);
  }
  SUBCASE("coordination factor with markers") {
    auto fig7 = builtin_experiment("fig7");
    REQUIRE(fig7.size() == 1);
    CHECK(fig7[0].spec.swept_key == "alpha");
    CHECK_FALSE(fig7[0].spec.swept_in_db);
    REQUIRE(fig7[0].spec.values.size() == 19);
    CHECK(fig7[0].spec.values.front() == doctest::Approx(0.05));
    CHECK(fig7[0].spec.values.back() == doctest::Approx(0.95));
    CHECK(fig7[0].spec.alpha_markers);
  }
  SUBCASE("unknown names are rejected") {
    CHECK_THROWS_AS(builtin_experiment("fig9"), ConfigError);
  }
}
