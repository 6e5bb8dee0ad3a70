#include "d2d/link.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace d2d {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZ95 = 1.959963984540054;  // Phi^{-1}(0.975)

double wilson_hw(double p_hat, double n) {
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  return kZ95 * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)) / denom;
}

// Ratio with the +infinity convention for a zero denominator.
inline double guarded_ratio(double num, double den) {
  return den == 0.0 ? kInf : num / den;
}

// min(limit / gain, cap) without dividing in the capped branch; correct
// for gain == 0 (cap) and limit == 0 (zero power).
inline double capped_ratio(double limit, double gain, double cap) {
  return limit < gain * cap ? limit / gain : cap;
}

inline double duplex_threshold(const NetworkParams& p, Duplex d) {
  return d == Duplex::Half ? p.s * (p.s + 2.0) : p.s;
}

}  // namespace

double wilson_half_width(std::uint64_t successes, std::uint64_t n) {
  if (n == 0) return 0.0;
  return wilson_hw(static_cast<double>(successes) / static_cast<double>(n),
                   static_cast<double>(n));
}

double source_power(int subcarrier, const ChannelRealization& ch, const NetworkParams& p,
                    PowerControl mode) {
  const double gref = mode == PowerControl::Dynamic ? ch.g_cb[subcarrier] : p.kappa;
  return capped_ratio(p.alpha * p.p_c * gref / p.xi, ch.g_sb[subcarrier], p.p_s_max);
}

double relay_power(int relay, int subcarrier, const ChannelRealization& ch,
                   const NetworkParams& p, PowerControl mode) {
  const double gref = mode == PowerControl::Dynamic ? ch.g_cb[subcarrier] : p.kappa;
  return capped_ratio((1.0 - p.alpha) * p.p_c * gref / p.xi,
                      ch.g_rb[ch.idx(relay, subcarrier)], p.p_r_max);
}

double sir_first_hop(int relay, int subcarrier, const ChannelRealization& ch,
                     const NetworkParams& p, PowerControl mode, Duplex duplex) {
  const int i = ch.idx(relay, subcarrier);
  const double self_intf = duplex == Duplex::Full ? ch.phi[i] : 0.0;
  const double num = ch.g_sr[i] * source_power(subcarrier, ch, p, mode);
  return guarded_ratio(num, p.p_c * ch.g_cr[i] + self_intf);
}

double sir_second_hop(int relay, int subcarrier, const ChannelRealization& ch,
                      const NetworkParams& p, PowerControl mode) {
  const int i = ch.idx(relay, subcarrier);
  const double num = ch.g_rd[i] * relay_power(relay, subcarrier, ch, p, mode);
  return guarded_ratio(num, p.p_c * ch.g_cd[subcarrier]);
}

double sir_end_to_end(int relay, int subcarrier, const ChannelRealization& ch,
                      const NetworkParams& p, PowerControl mode, Duplex duplex) {
  return std::min(sir_first_hop(relay, subcarrier, ch, p, mode, duplex),
                  sir_second_hop(relay, subcarrier, ch, p, mode));
}

std::vector<int> select_relays(const ChannelRealization& ch, const NetworkParams& p,
                               PowerControl mode, Duplex duplex, Selection scheme,
                               const CounterRng& rng, std::uint64_t trial) {
  const int N = p.n_relays;
  const int K = p.n_subcarriers;
  std::vector<int> sel(static_cast<std::size_t>(K), 0);
  switch (scheme) {
    case Selection::Bulk: {
      int best_n = 0;
      double best = -kInf;
      for (int n = 0; n < N; ++n) {
        double worst = kInf;
        for (int k = 0; k < K; ++k)
          worst = std::min(worst, sir_end_to_end(n, k, ch, p, mode, duplex));
        if (worst > best) {
          best = worst;
          best_n = n;
        }
      }
      std::fill(sel.begin(), sel.end(), best_n);
      break;
    }
    case Selection::PerSubcarrier: {
      for (int k = 0; k < K; ++k) {
        int best_n = 0;
        double best = -kInf;
        for (int n = 0; n < N; ++n) {
          const double v = sir_end_to_end(n, k, ch, p, mode, duplex);
          if (v > best) {
            best = v;
            best_n = n;
          }
        }
        sel[k] = best_n;
      }
      break;
    }
    case Selection::Random: {
      const double u = rng.uniform(trial, stream_id(Fade::SELECT, 0, 0));
      const int n = std::min(static_cast<int>(u * N), N - 1);
      std::fill(sel.begin(), sel.end(), n);
      break;
    }
  }
  return sel;
}

bool is_outage(const ChannelRealization& ch, const NetworkParams& p, PowerControl mode,
               Duplex duplex, Selection scheme, const CounterRng& rng, std::uint64_t trial) {
  const auto sel = select_relays(ch, p, mode, duplex, scheme, rng, trial);
  const double thr = duplex_threshold(p, duplex);
  for (int k = 0; k < p.n_subcarriers; ++k) {
    if (sir_end_to_end(sel[k], k, ch, p, mode, duplex) < thr) return true;
  }
  return false;
}

namespace {

// Per-worker scratch for the Monte Carlo kernels.
struct Scratch {
  std::vector<double> gref;    // reporter gain (or kappa) per subcarrier
  std::vector<double> ps;      // source power per subcarrier
  std::vector<double> den2;    // p_c * g_cd per subcarrier
  std::vector<double> colmax;  // per-subcarrier max over relays
  void resize(int K) {
    gref.resize(K);
    ps.resize(K);
    den2.resize(K);
    colmax.resize(K);
  }
};

// One trial of the D2D outage indicator. Draws only the streams the
// scheme needs; stream ids match sample_realization, so this agrees
// bit-for-bit with is_outage on the sampled realization.
bool d2d_trial(const NetworkParams& p, PowerControl mode, Duplex duplex, Selection scheme,
               const CounterRng& rng, std::uint64_t trial, Scratch& w) {
  const int N = p.n_relays;
  const int K = p.n_subcarriers;
  const bool dynamic = mode == PowerControl::Dynamic;
  const bool use_phi = duplex == Duplex::Full;
  const double thr = duplex_threshold(p, duplex);
  const double c_src = p.alpha * p.p_c / p.xi;
  const double c_rel = (1.0 - p.alpha) * p.p_c / p.xi;

  for (int k = 0; k < K; ++k) {
    const auto sk = static_cast<std::uint32_t>(k);
    const double gref =
        dynamic ? rng.exponential(p.mu_cb, trial, stream_id(Fade::CB, 0, sk)) : p.kappa;
    w.gref[k] = gref;
    const double g_sb = rng.exponential(p.mu_sb, trial, stream_id(Fade::SB, 0, sk));
    w.ps[k] = capped_ratio(c_src * gref, g_sb, p.p_s_max);
    w.den2[k] = p.p_c * rng.exponential(p.mu_cd, trial, stream_id(Fade::CD, 0, sk));
  }

  auto link_sir = [&](int n, int k) {
    const auto rn = static_cast<std::uint32_t>(n);
    const auto sk = static_cast<std::uint32_t>(k);
    const double g_sr = rng.exponential(p.mu_sr, trial, stream_id(Fade::SR, rn, sk));
    const double g_cr = rng.exponential(p.mu_cr, trial, stream_id(Fade::CR, rn, sk));
    const double self =
        use_phi ? rng.exponential(p.phi_bar, trial, stream_id(Fade::PHI, rn, sk)) : 0.0;
    const double h1 = guarded_ratio(g_sr * w.ps[k], p.p_c * g_cr + self);
    const double g_rb = rng.exponential(p.mu_rb, trial, stream_id(Fade::RB, rn, sk));
    const double pr = capped_ratio(c_rel * w.gref[k], g_rb, p.p_r_max);
    const double g_rd = rng.exponential(p.mu_rd, trial, stream_id(Fade::RD, rn, sk));
    const double h2 = guarded_ratio(g_rd * pr, w.den2[k]);
    return std::min(h1, h2);
  };

  switch (scheme) {
    case Selection::Bulk: {
      double best = -kInf;
      for (int n = 0; n < N; ++n) {
        double worst = kInf;
        for (int k = 0; k < K; ++k) worst = std::min(worst, link_sir(n, k));
        best = std::max(best, worst);
      }
      return best < thr;
    }
    case Selection::PerSubcarrier: {
      for (int k = 0; k < K; ++k) w.colmax[k] = -kInf;
      for (int n = 0; n < N; ++n)
        for (int k = 0; k < K; ++k) w.colmax[k] = std::max(w.colmax[k], link_sir(n, k));
      double worst = kInf;
      for (int k = 0; k < K; ++k) worst = std::min(worst, w.colmax[k]);
      return worst < thr;
    }
    default: {
      const double u = rng.uniform(trial, stream_id(Fade::SELECT, 0, 0));
      const int n = std::min(static_cast<int>(u * N), N - 1);
      double worst = kInf;
      for (int k = 0; k < K; ++k) worst = std::min(worst, link_sir(n, k));
      return worst < thr;
    }
  }
}

int resolve_workers(int workers, std::uint64_t trials) {
  if (workers <= 0) {
    const unsigned hc = std::thread::hardware_concurrency();
    workers = hc == 0 ? 1 : static_cast<int>(hc);
  }
  const std::uint64_t cap = std::max<std::uint64_t>(trials, 1);
  return static_cast<int>(std::min<std::uint64_t>(workers, cap));
}

// Run fn(trial) over [0, trials) split across workers, summing the
// returned per-worker tallies. fn must be pure in (trial).
template <class PerTrial>
double parallel_tally(std::uint64_t trials, int workers, PerTrial fn) {
  if (workers == 1) {
    double acc = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) acc += fn(t);
    return acc;
  }
  std::vector<double> partial(static_cast<std::size_t>(workers), 0.0);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const std::uint64_t chunk = trials / workers;
  const std::uint64_t rem = trials % workers;
  std::uint64_t lo = 0;
  for (int wi = 0; wi < workers; ++wi) {
    const std::uint64_t hi = lo + chunk + (static_cast<std::uint64_t>(wi) < rem ? 1 : 0);
    pool.emplace_back([&partial, wi, lo, hi, &fn]() {
      double acc = 0.0;
      for (std::uint64_t t = lo; t < hi; ++t) acc += fn(t);
      partial[static_cast<std::size_t>(wi)] = acc;
    });
    lo = hi;
  }
  for (auto& th : pool) th.join();
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

}  // namespace

OutageEstimate estimate_outage(const NetworkParams& p, PowerControl mode, Duplex duplex,
                               Selection scheme, std::uint64_t trials, std::uint64_t seed,
                               int workers) {
  p.validate();
  const CounterRng rng(seed);
  const int w = resolve_workers(workers, trials);
  const double hits = parallel_tally(trials, w, [&](std::uint64_t t) {
    thread_local Scratch local;
    local.resize(p.n_subcarriers);
    return d2d_trial(p, mode, duplex, scheme, rng, t, local) ? 1.0 : 0.0;
  });
  OutageEstimate est;
  est.trials = trials;
  est.source = OutageEstimate::Source::MonteCarlo;
  const auto successes = static_cast<std::uint64_t>(hits + 0.5);
  est.probability = trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
  est.half_width = wilson_half_width(successes, trials);
  return est;
}

OutageEstimate cellular_outage(const NetworkParams& p, PowerControl mode, Duplex duplex,
                               Selection scheme, std::uint64_t trials, std::uint64_t seed,
                               int workers) {
  p.validate();
  const CounterRng rng(seed);
  const int w = resolve_workers(workers, trials);
  const double frac_sum = parallel_tally(trials, w, [&](std::uint64_t t) {
    thread_local ChannelRealization ch;
    sample_realization(p, rng, t, &ch);
    const auto sel = select_relays(ch, p, mode, duplex, scheme, rng, t);
    int bad = 0;
    for (int k = 0; k < p.n_subcarriers; ++k) {
      const double intf = source_power(k, ch, p, mode) * ch.g_sb[k] +
                          relay_power(sel[k], k, ch, p, mode) * ch.g_rb[ch.idx(sel[k], k)];
      // Outage only when the protection constraint is violated beyond
      // rounding: under Dynamic control the SIR sits exactly on xi
      // whenever both peak caps are slack.
      if (p.p_c * ch.g_cb[k] < p.xi * intf * (1.0 - 1e-12)) ++bad;
    }
    return static_cast<double>(bad) / p.n_subcarriers;
  });
  OutageEstimate est;
  est.trials = trials;
  est.source = OutageEstimate::Source::MonteCarlo;
  est.probability = trials ? frac_sum / static_cast<double>(trials) : 0.0;
  est.half_width = trials ? wilson_hw(est.probability, static_cast<double>(trials)) : 0.0;
  return est;
}

}  // namespace d2d
