#include "d2d/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "d2d/kahan.hpp"
#include "d2d/quadrature.hpp"
#include "d2d/special.hpp"

namespace d2d {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Tolerance band for final signed sums: raw values outside [-band, 1+band]
// indicate the alternating expansion has broken down.
constexpr double kProbabilityBand = 1e-6;

// A closed-form branch is rejected when its compensated absolute term mass
// exceeds this multiple of the result (roughly four decades of cancellation,
// leaving ~1e-12 relative accuracy in double).
constexpr double kCancellationRatio = 1e4;

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

EffectiveParams::EffectiveParams(const NetworkParams& params, Duplex duplex)
    : p(params) {
  switch (duplex) {
    case Duplex::Full:
      s_eff = p.s;
      phi_eff = p.phi_bar;
      break;
    case Duplex::Half:
      // Two slots per hop: the end-to-end rate target doubles, which maps
      // the SIR threshold s to s*(s+2), and reception is interference-free
      // from the relay's own transmitter.
      s_eff = p.s * (p.s + 2.0);
      phi_eff = 0.0;
      break;
    case Duplex::IdealFull:
    default:
      s_eff = p.s;
      phi_eff = 0.0;
      break;
  }
}

std::vector<Composition> compositions(int n, int parts) {
  if (n < 0) throw std::invalid_argument("compositions: negative total");
  if (parts < 1) throw std::invalid_argument("compositions: need at least one part");
  std::vector<Composition> out;
  Composition cur;
  cur.counts.assign(static_cast<std::size_t>(parts), 0);
  auto rec = [&](auto&& self, int part, int remaining) -> void {
    if (part == parts - 1) {
      cur.counts[static_cast<std::size_t>(part)] = remaining;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      cur.counts[static_cast<std::size_t>(part)] = v;
      self(self, part + 1, remaining - v);
    }
  };
  rec(rec, 0, n);
  return out;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  // The running product is exact for every case the expansions reach
  // (n <= kMaxAnalyticRelays keeps all values far below 2^53); round to
  // kill the last-bit drift of the divisions.
  return std::round(c);
}

double hop1_outage_cond(double p_s, const EffectiveParams& ep) {
  if (!(p_s > 0.0)) return 1.0;
  const double a = p_s * ep.p.mu_sr;
  const double b = ep.p.p_c * ep.p.mu_cr * ep.s_eff;
  const double c = ep.phi_eff * ep.s_eff;
  // 1 - a^2/((a+b)(a+c)) rearranged so tiny outages keep full relative
  // precision instead of cancelling against 1.
  return (a * (b + c) + b * c) / ((a + b) * (a + c));
}

double hop2_outage_cond(double g_bar, double h_bar, const EffectiveParams& ep) {
  const NetworkParams& p = ep.p;
  if (!(h_bar > 0.0)) return 0.0;
  if (!(g_bar > 0.0)) return 1.0;
  const double x = p.p_c * h_bar * ep.s_eff / (p.p_r_max * p.mu_rd);
  // Probability the relay-BS gain forces the power cap to stay slack.
  const double q_e = std::exp(-(1.0 - p.alpha) * p.p_c * g_bar / (p.p_r_max * p.mu_rb * p.xi));
  const double gd = (1.0 - p.alpha) * p.mu_rd * g_bar;
  const double hb = p.mu_rb * h_bar * p.xi * ep.s_eff;
  // Both summands are non-negative, so small outage probabilities do not
  // suffer the 1 - (near-one) cancellation of the textbook form.
  return -std::expm1(-x) + std::exp(-x) * q_e * hb / (gd + hb);
}

double e2e_outage_from_hops(double x1, double x2) {
  return x1 + x2 - x1 * x2;
}

double interference_cdf(double z, const EffectiveParams& ep) {
  if (!(z > 0.0)) return 0.0;
  const double m1 = ep.p.p_c * ep.p.mu_cr;
  const double m2 = ep.phi_eff;
  if (m2 <= 0.0) return -std::expm1(-z / m1);
  if (std::fabs(m1 - m2) < 1e-9 * std::max(m1, m2)) {
    // Sum of two i.i.d. exponentials: Erlang-2.
    const double m = 0.5 * (m1 + m2);
    return -std::expm1(-z / m) - (z / m) * std::exp(-z / m);
  }
  return (m1 * (-std::expm1(-z / m1)) - m2 * (-std::expm1(-z / m2))) / (m1 - m2);
}

double hop1_ratio_cdf(double w, const EffectiveParams& ep) {
  if (!(w > 0.0)) return 0.0;
  if (std::isinf(w)) return 1.0;
  const double a = ep.p.mu_sr;
  const double b = ep.p.p_c * ep.p.mu_cr * w;
  const double c = ep.phi_eff * w;
  return (a * (b + c) + b * c) / ((a + b) * (a + c));
}

namespace {

// Geometry of the first-hop moment integral over the source-to-BS gain l:
// below u0 the power cap binds (constant success probability), above it the
// success probability is a rational function of l with poles -a1, -a2.
struct Hop1Geometry {
  double u0;        // cap boundary in l
  double b;         // 1 / mu_sb
  double a1;        // always finite, positive
  double a2;        // second pole; infinite when self-interference is absent
  double t_cap;     // success probability while the cap binds
  bool two_poles;
};

Hop1Geometry hop1_geometry(double g_bar, const EffectiveParams& ep) {
  const NetworkParams& p = ep.p;
  Hop1Geometry g{};
  g.u0 = p.alpha * p.p_c * g_bar / (p.p_s_max * p.xi);
  g.b = 1.0 / p.mu_sb;
  g.a1 = p.alpha * g_bar * p.mu_sr / (p.xi * p.mu_cr * ep.s_eff);
  g.two_poles = ep.phi_eff > 0.0;
  g.a2 = g.two_poles
             ? p.alpha * p.p_c * g_bar * p.mu_sr / (ep.phi_eff * p.xi * ep.s_eff)
             : kInf;
  g.t_cap = 1.0 - hop1_outage_cond(p.p_s_max, ep);
  return g;
}

// Success probability at source-BS gain l in the uncapped region, written as
// a product of ratios so it stays accurate for poles anywhere in (0, 1e300).
double hop1_success_at(double l, const Hop1Geometry& g) {
  double t = 1.0 / (1.0 + l / g.a1);
  if (g.two_poles) t /= 1.0 + l / g.a2;
  return t;
}

// Matching outage probability, exact for values near zero.
double hop1_outage_at(double l, const Hop1Geometry& g) {
  if (!g.two_poles) return l / (l + g.a1);
  return (l / (l + g.a1)) * ((l + g.a1 + g.a2) / (l + g.a2));
}

// Tail of the first-hop success moment by direct quadrature of the defining
// integral; used whenever the partial-fraction route is ill-conditioned.
double hop1_success_moment_quad(int p, const Hop1Geometry& g, double mu_sb) {
  auto f = [&](double x) { return std::pow(hop1_success_at(g.u0 + x, g), p); };
  const QuadratureResult tail = integrate_exp_expectation(f, mu_sb, 1e-10, 0.0);
  return -std::expm1(-g.b * g.u0) * std::pow(g.t_cap, p) +
         std::exp(-g.b * g.u0) * tail.value;
}

}  // namespace

double hop1_success_moment(int p, double g_bar, const EffectiveParams& ep) {
  if (p < 0) throw std::invalid_argument("hop1_success_moment: negative exponent");
  if (!(g_bar >= 0.0)) throw std::invalid_argument("hop1_success_moment: negative gain");
  if (p == 0) return 1.0;
  if (g_bar == 0.0) return 0.0;  // zero reporter gain means zero source power
  const Hop1Geometry g = hop1_geometry(g_bar, ep);

  const double cap_term = -std::expm1(-g.b * g.u0) * std::pow(g.t_cap, p);

  // Closed-form tail: (a1*a2)^p / mu_sb * integral of e^{-b l} / prod(l+a)^p.
  // The prefactor and the integral separately span enormous ranges while
  // their product is at most 1, so compose them through logs when either
  // would overflow on its own.
  const double dp = static_cast<double>(p);
  const double log_scale =
      dp * (std::log(g.a1) + (g.two_poles ? std::log(g.a2) : 0.0));
  double tail = std::numeric_limits<double>::quiet_NaN();
  if (std::isfinite(log_scale)) {
    std::vector<double> poles;
    poles.push_back(g.a1);
    if (g.two_poles) poles.push_back(g.a2);
    double abs_sum = 0.0;
    double chi = std::numeric_limits<double>::quiet_NaN();
    try {
      chi = exp_poly_integral(p, poles, g.b, g.u0, &abs_sum);
    } catch (const std::invalid_argument&) {
      chi = std::numeric_limits<double>::quiet_NaN();  // pole merge rejected
    }
    if (std::isfinite(chi) && chi >= 0.0 && abs_sum <= kCancellationRatio * chi) {
      if (chi == 0.0) {
        tail = 0.0;  // integrand underflowed: tail is below 1e-300 * cap term
      } else if (std::fabs(log_scale) < 600.0) {
        const double scale = g.two_poles ? std::pow(g.a1, dp) * std::pow(g.a2, dp)
                                         : std::pow(g.a1, dp);
        tail = scale * chi / ep.p.mu_sb;
      } else {
        tail = std::exp(log_scale + std::log(chi) - std::log(ep.p.mu_sb));
      }
    }
  }
  double value = cap_term + tail;
  if (!std::isfinite(value) || value < -1e-12 || value > 1.0 + 1e-12) {
    value = hop1_success_moment_quad(p, g, ep.p.mu_sb);
  }
  return clamp01(value);
}

double hop1_outage_moment(int n, double g_bar, const EffectiveParams& ep) {
  if (n < 0) throw std::invalid_argument("hop1_outage_moment: negative exponent");
  if (n == 0) return 1.0;
  if (g_bar == 0.0) return 1.0;  // zero power: the first hop always fails
  KahanSum acc;
  double sign = 1.0;
  for (int p = 0; p <= n; ++p) {
    acc.add(sign * binomial(n, p) * hop1_success_moment(p, g_bar, ep));
    sign = -sign;
  }
  const double value = acc.value();
  // The signed sum collapses to E[Xi1^n]; when Xi1 is small the terms cancel
  // almost completely and the defining integral is the honest evaluation.
  const bool ill = !std::isfinite(value) ||
                   acc.abs_sum * 1e-13 > 1e-9 * std::max(std::fabs(value), 1e-300);
  if (!ill) return clamp01(value);
  const Hop1Geometry g = hop1_geometry(g_bar, ep);
  auto f = [&](double x) { return std::pow(hop1_outage_at(g.u0 + x, g), n); };
  const QuadratureResult tail = integrate_exp_expectation(f, ep.p.mu_sb, 1e-10, 0.0);
  const double cap = -std::expm1(-g.b * g.u0) *
                     std::pow(hop1_outage_cond(ep.p.p_s_max, ep), n);
  return clamp01(cap + std::exp(-g.b * g.u0) * tail.value);
}

namespace {

// Rate of the second-hop exponential kernel in the CUE-destination gain.
double hop2_lambda(int p, const EffectiveParams& ep) {
  return static_cast<double>(p) * ep.p.p_c * ep.s_eff / (ep.p.p_r_max * ep.p.mu_rd) +
         1.0 / ep.p.mu_cd;
}

double hop2_qe(double g_bar, const EffectiveParams& ep) {
  const NetworkParams& p = ep.p;
  return std::exp(-(1.0 - p.alpha) * p.p_c * g_bar / (p.p_r_max * p.mu_rb * p.xi));
}

}  // namespace

double hop2_moment_kernel(int p, int q, double g_bar, const EffectiveParams& ep) {
  if (p < 0 || q < 0 || q > p)
    throw std::invalid_argument("hop2_moment_kernel: need 0 <= q <= p");
  if (!(g_bar >= 0.0)) throw std::invalid_argument("hop2_moment_kernel: negative gain");
  const double lambda = hop2_lambda(p, ep);
  if (q == 0) return 1.0 / (ep.p.mu_cd * lambda);
  if (g_bar == 0.0) return 0.0;
  const double a3 = (1.0 - ep.p.alpha) * ep.p.mu_rd * g_bar /
                    (ep.p.mu_rb * ep.p.xi * ep.s_eff);
  const double s = upper_gamma_scaled_zq(q, a3 * lambda);
  return std::pow(hop2_qe(g_bar, ep), q) * s / (ep.p.mu_cd * lambda);
}

double hop2_success_moment(int n, double g_bar, const EffectiveParams& ep) {
  if (n < 0) throw std::invalid_argument("hop2_success_moment: negative exponent");
  if (n == 0) return 1.0;
  if (g_bar == 0.0) return 0.0;
  const double q_e = hop2_qe(g_bar, ep);
  // Every term is non-negative: no cancellation regardless of scale.
  KahanSum acc;
  for (int q = 0; q <= n; ++q) {
    acc.add(binomial(n, q) * std::pow(1.0 - q_e, n - q) *
            hop2_moment_kernel(n, q, g_bar, ep));
  }
  return clamp01(acc.value());
}

double hop2_outage_moment(int n, double g_bar, const EffectiveParams& ep) {
  if (n < 0) throw std::invalid_argument("hop2_outage_moment: negative exponent");
  if (n == 0) return 1.0;
  if (g_bar == 0.0) return 1.0;
  KahanSum acc;
  double sign = 1.0;
  for (int p = 0; p <= n; ++p) {
    acc.add(sign * binomial(n, p) * hop2_success_moment(p, g_bar, ep));
    sign = -sign;
  }
  const double value = acc.value();
  const bool ill = !std::isfinite(value) ||
                   acc.abs_sum * 1e-13 > 1e-9 * std::max(std::fabs(value), 1e-300);
  if (!ill) return clamp01(value);
  auto f = [&](double h) { return std::pow(hop2_outage_cond(g_bar, h, ep), n); };
  return clamp01(integrate_exp_expectation(f, ep.p.mu_cd, 1e-10, 0.0).value);
}

namespace {

// Joint success moment of one relay-subcarrier pair conditioned on the
// reporter gain: the two hops see independent fading, so the conditional
// expectation factorizes.
double pair_success_moment(int n, double g_bar, const EffectiveParams& ep) {
  const double h1 = hop1_success_moment(n, g_bar, ep);
  if (h1 == 0.0) return 0.0;
  return h1 * hop2_success_moment(n, g_bar, ep);
}

// Averages f over the reporter gain, or evaluates it at the pinned value
// for static power control.
double reporter_average(const std::function<double(double)>& f,
                        const NetworkParams& p, std::optional<double> fixed_g) {
  if (fixed_g) return f(*fixed_g);
  const QuadratureResult r = integrate_exp_expectation(f, p.mu_cb, 1e-9, 1e-13);
  return r.value;
}

double checked_probability(double raw, const char* what) {
  if (!std::isfinite(raw) || raw < -kProbabilityBand || raw > 1.0 + kProbabilityBand) {
    throw AnalyticInstability(std::string(what) +
                              ": signed expansion left [0,1] beyond tolerance");
  }
  return clamp01(raw);
}

double outage_bulk(const NetworkParams& p, Duplex duplex, std::optional<double> fixed_g) {
  const EffectiveParams ep(p, duplex);
  const int n_relays = p.n_relays;
  const int n_sub = p.n_subcarriers;
  // Per-relay probability that every subcarrier clears the threshold enters
  // through its signed binomial complement; subcarriers are statistically
  // identical so the product over them is a K-th power.
  std::vector<double> phi(static_cast<std::size_t>(n_relays) + 1, 1.0);
  for (int n = 1; n <= n_relays; ++n) {
    phi[static_cast<std::size_t>(n)] = reporter_average(
        [&](double g) { return pair_success_moment(n, g, ep); }, p, fixed_g);
  }
  KahanSum acc;
  double sign = 1.0;
  for (int n = 0; n <= n_relays; ++n) {
    acc.add(sign * binomial(n_relays, n) *
            std::pow(phi[static_cast<std::size_t>(n)], n_sub));
    sign = -sign;
  }
  return checked_probability(acc.value(), "bulk outage");
}

double outage_per_subcarrier(const NetworkParams& p, Duplex duplex,
                             std::optional<double> fixed_g) {
  const EffectiveParams ep(p, duplex);
  const int n_relays = p.n_relays;
  // Conditional probability that one subcarrier is in outage across all
  // relays: inclusion-exclusion over the per-relay success moments.
  auto per_subcarrier_cond = [&](double g) {
    KahanSum acc;
    double sign = 1.0;
    for (int j = 0; j <= n_relays; ++j) {
      acc.add(sign * binomial(n_relays, j) * pair_success_moment(j, g, ep));
      sign = -sign;
    }
    return acc.value();
  };
  const double psi = checked_probability(
      reporter_average(per_subcarrier_cond, p, fixed_g), "per-subcarrier outage");
  // 1 - (1-psi)^K evaluated without cancellation for tiny psi.
  return clamp01(-std::expm1(static_cast<double>(p.n_subcarriers) * std::log1p(-psi)));
}

double dispatch(const NetworkParams& p, Selection scheme, Duplex duplex,
                std::optional<double> fixed_g) {
  p.validate();
  if (scheme == Selection::Random)
    throw std::invalid_argument("analytic outage: random selection has no closed form");
  if (p.n_relays > kMaxAnalyticRelays)
    throw AnalyticInstability("analytic outage: relay count exceeds the stable expansion range");
  return scheme == Selection::Bulk ? outage_bulk(p, duplex, fixed_g)
                                   : outage_per_subcarrier(p, duplex, fixed_g);
}

}  // namespace

double analytic_outage(const NetworkParams& params, Selection scheme,
                       PowerControl mode, Duplex duplex) {
  std::optional<double> fixed_g;
  if (mode == PowerControl::Static) fixed_g = params.kappa;
  return dispatch(params, scheme, duplex, fixed_g);
}

double analytic_outage_fixed_gbar(const NetworkParams& params, Selection scheme,
                                  Duplex duplex, double g_bar) {
  if (!(g_bar >= 0.0))
    throw std::invalid_argument("analytic outage: reporter gain must be non-negative");
  return dispatch(params, scheme, duplex, g_bar);
}

}  // namespace d2d
