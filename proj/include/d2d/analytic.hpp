#pragma once

#include <stdexcept>
#include <vector>

#include "d2d/params.hpp"

namespace d2d {

// Raised when an alternating outage expansion has lost too much precision
// to be trusted (large relay counts) or an intermediate leaves its
// mathematically required range by more than the tolerance band.
class AnalyticInstability : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Relay counts above this make the signed binomial expansion unreliable in
// double precision; the Monte Carlo path has no such restriction.
inline constexpr int kMaxAnalyticRelays = 12;

// Duplex handling collapses to two effective scalars: the SIR threshold the
// decoder actually has to clear and the residual self-interference power.
//   Full      -> (s, phi_bar)   Half -> (s*(s+2), 0)   IdealFull -> (s, 0)
// Everything downstream is written against these, so one analytic code path
// serves all three modes.
struct EffectiveParams {
  NetworkParams p;
  double s_eff;
  double phi_eff;
  EffectiveParams(const NetworkParams& params, Duplex duplex);
};

// One weak composition of an exponent into a fixed number of parts.
struct Composition {
  std::vector<int> counts;
};

// All weak compositions of n into `parts` non-negative parts, lexicographic
// in the leading part. Size is C(n+parts-1, parts-1). Used to expand
// multinomial powers of per-hop outage indicators.
std::vector<Composition> compositions(int n, int parts);

// Exact binomial coefficient as a double (n up to the point where the
// running-product evaluation stays within integer-exact range).
double binomial(int n, int k);

// --- conditional building blocks -----------------------------------------
// First-hop outage probability given the realized source power.
double hop1_outage_cond(double p_s, const EffectiveParams& ep);
// Second-hop outage probability conditioned on the reporter gain g_bar
// (CUE to BS) and the CUE-to-destination gain h_bar; relay fading and the
// relay-to-BS gain are integrated out.
double hop2_outage_cond(double g_bar, double h_bar, const EffectiveParams& ep);
// Two-hop outage from per-hop outages of a decode-and-forward pair.
double e2e_outage_from_hops(double x1, double x2);
// CDF of the first-hop interference power (CUE term plus residual
// self-interference); handles the degenerate equal-mean case.
double interference_cdf(double z, const EffectiveParams& ep);
// CDF of the ratio (desired first-hop gain) / (interference power).
double hop1_ratio_cdf(double w, const EffectiveParams& ep);

// --- moments over the residual randomness, conditioned on g_bar ----------
// E[(1 - Xi1)^p | g_bar]: p-th moment of the first-hop success probability
// over the source-to-BS gain that drives the power cap.
double hop1_success_moment(int p, double g_bar, const EffectiveParams& ep);
// E[Xi1^n | g_bar]: alternating binomial over hop1_success_moment with a
// quadrature fallback when the signed sum is ill-conditioned.
double hop1_outage_moment(int n, double g_bar, const EffectiveParams& ep);
// Kernel of the second-hop moment expansion: requires 0 <= q <= p.
double hop2_moment_kernel(int p, int q, double g_bar, const EffectiveParams& ep);
// E[(1 - Xi2)^n | g_bar]: positive binomial over the kernel.
double hop2_success_moment(int n, double g_bar, const EffectiveParams& ep);
// E[Xi2^n | g_bar]: alternating binomial with quadrature fallback.
double hop2_outage_moment(int n, double g_bar, const EffectiveParams& ep);

// --- outage probabilities -------------------------------------------------
// Closed-form/quadrature outage for the requested selection scheme, power
// control mode and duplex mode. Random selection has no analytic form and
// throws std::invalid_argument. Throws AnalyticInstability when n_relays
// exceeds kMaxAnalyticRelays or the final signed sum leaves [0,1] by more
// than 1e-6 before clamping.
double analytic_outage(const NetworkParams& params, Selection scheme,
                       PowerControl mode, Duplex duplex);

// Same quantity with the reporter gain pinned at g_bar instead of averaged
// over its distribution. Static power control is exactly this evaluated at
// g_bar = kappa; exposed so that identity is testable.
double analytic_outage_fixed_gbar(const NetworkParams& params, Selection scheme,
                                  Duplex duplex, double g_bar);

}  // namespace d2d
