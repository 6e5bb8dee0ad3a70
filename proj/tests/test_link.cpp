#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "d2d/link.hpp"
#include "doctest.h"

using namespace d2d;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A fully hand-specified single-relay, single-subcarrier draw.
ChannelRealization tiny_realization() {
  ChannelRealization ch;
  ch.resize(1, 1);
  ch.g_sr = {8.0};
  ch.g_rd = {6.0};
  ch.g_cr = {0.5};
  ch.g_rb = {2.0};
  ch.phi = {1.5};
  ch.g_cd = {0.25};
  ch.g_sb = {4.0};
  ch.g_cb = {2.0};
  return ch;
}

NetworkParams tiny_params() {
  NetworkParams p = default_params();
  p.n_relays = 1;
  p.n_subcarriers = 1;
  p.alpha = 0.5;
  p.p_c = 1.0;
  p.xi = 1.0;
  p.kappa = 4.0;
  p.p_s_max = 10.0;
  p.p_r_max = 10.0;
  return p;
}

}  // namespace

TEST_CASE("power control tracks the reporter gain and respects the caps") {
  ChannelRealization ch = tiny_realization();
  NetworkParams p = tiny_params();

  // dynamic: alpha p_c g_cb / (xi g_sb) = 0.5 * 2 / 4
  CHECK(source_power(0, ch, p, PowerControl::Dynamic) == doctest::Approx(0.25));
  // static: alpha p_c kappa / (xi g_sb) = 0.5 * 4 / 4
  CHECK(source_power(0, ch, p, PowerControl::Static) == doctest::Approx(0.5));
  // relay budget is the complementary share over g_rb
  CHECK(relay_power(0, 0, ch, p, PowerControl::Dynamic) == doctest::Approx(0.5));

  p.p_s_max = 0.2;
  CHECK(source_power(0, ch, p, PowerControl::Dynamic) == doctest::Approx(0.2));

  SUBCASE("zero uplink gain hits the cap instead of dividing by zero") {
    ch.g_sb[0] = 0.0;
    CHECK(source_power(0, ch, p, PowerControl::Dynamic) == doctest::Approx(p.p_s_max));
  }
}

TEST_CASE("hop SIRs") {
  ChannelRealization ch = tiny_realization();
  NetworkParams p = tiny_params();
  const double ps = 0.25, pr = 0.5;

  // full duplex: residual self-interference enters the first hop
  CHECK(sir_first_hop(0, 0, ch, p, PowerControl::Dynamic, Duplex::Full) ==
        doctest::Approx(8.0 * ps / (0.5 + 1.5)));
  // half and ideal-full zero that term
  CHECK(sir_first_hop(0, 0, ch, p, PowerControl::Dynamic, Duplex::Half) ==
        doctest::Approx(8.0 * ps / 0.5));
  CHECK(sir_first_hop(0, 0, ch, p, PowerControl::Dynamic, Duplex::IdealFull) ==
        doctest::Approx(8.0 * ps / 0.5));

  CHECK(sir_second_hop(0, 0, ch, p, PowerControl::Dynamic) ==
        doctest::Approx(6.0 * pr / 0.25));

  CHECK(sir_end_to_end(0, 0, ch, p, PowerControl::Dynamic, Duplex::Full) ==
        doctest::Approx(std::min(8.0 * ps / 2.0, 6.0 * pr / 0.25)));

  SUBCASE("zero interference yields +infinity") {
    ch.g_cr[0] = 0.0;
    ch.phi[0] = 0.0;
    CHECK(sir_first_hop(0, 0, ch, p, PowerControl::Dynamic, Duplex::Full) == kInf);
    ch.g_cd[0] = 0.0;
    CHECK(sir_second_hop(0, 0, ch, p, PowerControl::Dynamic) == kInf);
  }
}

TEST_CASE("relay selection against a brute-force reference") {
  NetworkParams p = default_params();
  p.n_relays = 3;
  p.n_subcarriers = 2;
  CounterRng rng(31);

  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    ChannelRealization ch = sample_realization(p, rng, trial);

    std::vector<double> e2e(6);
    for (int n = 0; n < 3; ++n)
      for (int k = 0; k < 2; ++k)
        e2e[ch.idx(n, k)] =
            sir_end_to_end(n, k, ch, p, PowerControl::Dynamic, Duplex::Full);

    auto bulk = select_relays(ch, p, PowerControl::Dynamic, Duplex::Full,
                              Selection::Bulk, rng, trial);
    int want = 0;
    double best = -kInf;
    for (int n = 0; n < 3; ++n) {
      const double worst = std::min(e2e[ch.idx(n, 0)], e2e[ch.idx(n, 1)]);
      if (worst > best) {
        best = worst;
        want = n;
      }
    }
    REQUIRE(bulk.size() == 2);
    CHECK(bulk[0] == want);
    CHECK(bulk[1] == want);

    auto per = select_relays(ch, p, PowerControl::Dynamic, Duplex::Full,
                             Selection::PerSubcarrier, rng, trial);
    for (int k = 0; k < 2; ++k) {
      int wk = 0;
      double bk = -kInf;
      for (int n = 0; n < 3; ++n)
        if (e2e[ch.idx(n, k)] > bk) {
          bk = e2e[ch.idx(n, k)];
          wk = n;
        }
      CHECK(per[k] == wk);
    }

    auto rnd = select_relays(ch, p, PowerControl::Dynamic, Duplex::Full,
                             Selection::Random, rng, trial);
    CHECK(rnd[0] >= 0);
    CHECK(rnd[0] < 3);
    CHECK(rnd[1] == rnd[0]);
  }

  SUBCASE("ties resolve to the lowest relay index") {
    ChannelRealization ch = sample_realization(p, rng, 123);
    // clone relay 0's channels into relay 2: identical end-to-end SIRs
    for (int k = 0; k < 2; ++k) {
      ch.g_sr[ch.idx(2, k)] = ch.g_sr[ch.idx(0, k)];
      ch.g_rd[ch.idx(2, k)] = ch.g_rd[ch.idx(0, k)];
      ch.g_cr[ch.idx(2, k)] = ch.g_cr[ch.idx(0, k)];
      ch.g_rb[ch.idx(2, k)] = ch.g_rb[ch.idx(0, k)];
      ch.phi[ch.idx(2, k)] = ch.phi[ch.idx(0, k)];
    }
    // suppress relay 1 so 0 and 2 tie for the top
    for (int k = 0; k < 2; ++k) ch.g_sr[ch.idx(1, k)] = 1e-9;
    auto bulk = select_relays(ch, p, PowerControl::Dynamic, Duplex::Full,
                              Selection::Bulk, rng, 123);
    CHECK(bulk[0] == 0);
    auto per = select_relays(ch, p, PowerControl::Dynamic, Duplex::Full,
                             Selection::PerSubcarrier, rng, 123);
    CHECK(per[0] == 0);
    CHECK(per[1] == 0);
  }
}

TEST_CASE("outage indicator agrees with the selected worst-subcarrier SIR") {
  NetworkParams p = default_params();
  p.n_relays = 2;
  p.n_subcarriers = 3;
  p.s = 8.0;  // harsh threshold so both outcomes occur within a few hundred trials
  CounterRng rng(77);
  for (auto duplex : {Duplex::Full, Duplex::Half, Duplex::IdealFull}) {
    const double thr = duplex == Duplex::Half ? p.s * (p.s + 2.0) : p.s;
    int outages = 0;
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
      ChannelRealization ch = sample_realization(p, rng, trial);
      auto sel = select_relays(ch, p, PowerControl::Dynamic, duplex,
                               Selection::PerSubcarrier, rng, trial);
      double worst = kInf;
      for (int k = 0; k < 3; ++k)
        worst = std::min(
            worst, sir_end_to_end(sel[k], k, ch, p, PowerControl::Dynamic, duplex));
      const bool want = worst < thr;
      CHECK(is_outage(ch, p, PowerControl::Dynamic, duplex,
                      Selection::PerSubcarrier, rng, trial) == want);
      outages += want;
    }
    CHECK(outages > 0);  // the regime is not degenerate
  }
}

TEST_CASE("wilson half-width") {
  CHECK(wilson_half_width(0, 0) == 0.0);
  // zero successes still give a strictly positive interval
  CHECK(wilson_half_width(0, 1000) > 0.0);
  CHECK(wilson_half_width(0, 1000) < 4.0 / 1000.0);
  // shrinks like 1/sqrt(n)
  CHECK(wilson_half_width(100, 10000) > wilson_half_width(1000, 100000));
  // agrees with the normal approximation when n is large and p moderate
  const double hw = wilson_half_width(5000, 10000);
  CHECK(hw == doctest::Approx(1.959963984540054 * 0.5 / 100.0).epsilon(1e-3));
}

TEST_CASE("monte carlo estimates and their exact structural identities") {
  NetworkParams p = default_params();
  p.n_relays = 2;
  p.n_subcarriers = 2;
  const std::uint64_t trials = 20000;
  const std::uint64_t seed = 11;

  auto run = [&](const NetworkParams& q, PowerControl m, Duplex d, Selection s) {
    return estimate_outage(q, m, d, s, trials, seed, 1);
  };

  OutageEstimate bulk = run(p, PowerControl::Dynamic, Duplex::Full, Selection::Bulk);
  OutageEstimate per =
      run(p, PowerControl::Dynamic, Duplex::Full, Selection::PerSubcarrier);
  OutageEstimate rnd = run(p, PowerControl::Dynamic, Duplex::Full, Selection::Random);

  CHECK(bulk.trials == trials);
  CHECK(bulk.source == OutageEstimate::Source::MonteCarlo);
  CHECK(bulk.half_width > 0.0);

  SUBCASE("selection quality ordering holds trial by trial") {
    // with shared draws these are exact inequalities, not statistical ones
    CHECK(per.probability <= bulk.probability);
    CHECK(bulk.probability <= rnd.probability);
  }

  SUBCASE("worker count cannot change the estimate") {
    OutageEstimate three = estimate_outage(p, PowerControl::Dynamic, Duplex::Full,
                                           Selection::Bulk, trials, seed, 3);
    CHECK(three.probability == bulk.probability);
    CHECK(three.trials == bulk.trials);
  }

  SUBCASE("outage is monotone in the threshold") {
    NetworkParams hard = p;
    hard.s = 2.0;
    OutageEstimate b2 = run(hard, PowerControl::Dynamic, Duplex::Full, Selection::Bulk);
    CHECK(b2.probability >= bulk.probability);
  }

  SUBCASE("outage is monotone in the subcarrier count") {
    NetworkParams wide = p;
    wide.n_subcarriers = 4;
    for (Selection s : {Selection::Bulk, Selection::PerSubcarrier, Selection::Random}) {
      OutageEstimate narrow = run(p, PowerControl::Dynamic, Duplex::Full, s);
      OutageEstimate wide_est = run(wide, PowerControl::Dynamic, Duplex::Full, s);
      CHECK(wide_est.probability >= narrow.probability);
    }
  }

  SUBCASE("more relays never hurt bulk or per-subcarrier selection") {
    NetworkParams more = p;
    more.n_relays = 4;
    for (Selection s : {Selection::Bulk, Selection::PerSubcarrier}) {
      OutageEstimate few = run(p, PowerControl::Dynamic, Duplex::Full, s);
      OutageEstimate many = run(more, PowerControl::Dynamic, Duplex::Full, s);
      CHECK(many.probability <= few.probability);
    }
  }

  SUBCASE("half duplex equals ideal full duplex at the two-slot threshold") {
    NetworkParams q = p;
    q.s = p.s * (p.s + 2.0);
    OutageEstimate half = run(p, PowerControl::Dynamic, Duplex::Half, Selection::Bulk);
    OutageEstimate ideal =
        run(q, PowerControl::Dynamic, Duplex::IdealFull, Selection::Bulk);
    CHECK(half.probability == ideal.probability);  // exact: same draws, same test
  }

  SUBCASE("interference-limited scaling: doubling every power changes nothing") {
    NetworkParams scaled = p;
    scaled.p_c *= 2.0;
    scaled.p_s_max *= 2.0;
    scaled.p_r_max *= 2.0;
    scaled.phi_bar *= 2.0;
    // phi_bar scales the sampled self-interference power linearly, so each
    // trial's SIRs are bitwise-identical ratios
    OutageEstimate base = run(p, PowerControl::Dynamic, Duplex::Full, Selection::Bulk);
    OutageEstimate twice =
        run(scaled, PowerControl::Dynamic, Duplex::Full, Selection::Bulk);
    CHECK(twice.probability == base.probability);
  }

  SUBCASE("single relay, single subcarrier: every scheme coincides") {
    NetworkParams one = p;
    one.n_relays = 1;
    one.n_subcarriers = 1;
    OutageEstimate b = run(one, PowerControl::Dynamic, Duplex::Full, Selection::Bulk);
    OutageEstimate pe =
        run(one, PowerControl::Dynamic, Duplex::Full, Selection::PerSubcarrier);
    OutageEstimate r = run(one, PowerControl::Dynamic, Duplex::Full, Selection::Random);
    CHECK(b.probability == pe.probability);
    CHECK(b.probability == r.probability);
  }
}

TEST_CASE("cellular uplink protection") {
  NetworkParams p = default_params();
  p.n_relays = 2;
  p.n_subcarriers = 2;
  const std::uint64_t trials = 20000;

  SUBCASE("dynamic control never violates the threshold") {
    // the budget split makes the uplink SIR exactly xi when no cap binds,
    // and caps only ever reduce interference
    OutageEstimate c = cellular_outage(p, PowerControl::Dynamic, Duplex::Full,
                                       Selection::Bulk, trials, 3, 1);
    CHECK(c.probability == 0.0);
  }

  SUBCASE("static control violates it with positive probability") {
    OutageEstimate c = cellular_outage(p, PowerControl::Static, Duplex::Full,
                                       Selection::Bulk, trials, 3, 1);
    CHECK(c.probability > 0.0);
    CHECK(c.probability < 1.0);
  }

  SUBCASE("a tiny static surrogate makes violations vanish") {
    NetworkParams q = p;
    q.kappa = 1e-9;
    OutageEstimate c = cellular_outage(q, PowerControl::Static, Duplex::Full,
                                       Selection::Bulk, trials, 3, 1);
    CHECK(c.probability == 0.0);
  }
}
