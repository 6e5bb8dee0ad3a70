#include "d2d/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "d2d/analytic.hpp"

namespace d2d {

double surrogate_sir_dynamic(double alpha, const NetworkParams& p) {
  // The two per-hop surrogates are capped ramps in the reporter gain g, and
  // min(min(ag, b), min(cg, d)) = min(min(a, c) g, min(b, d)), so the whole
  // objective collapses to one capped ramp averaged over g ~ Exp(mu_cb).
  // The piecewise branch structure in alpha is exactly the behaviour of
  // these two mins; evaluating them directly keeps every branch and the
  // boundary between them continuous by construction.
  const double a1 = p.mu_sr / (p.p_c * p.mu_cr + p.phi_bar);
  const double a2 = p.mu_rd / (p.p_c * p.mu_cd);
  const double slope = std::min(a1 * alpha * p.p_c / (p.xi * p.mu_sb),
                                a2 * (1.0 - alpha) * p.p_c / (p.xi * p.mu_rb));
  const double cap = std::min(a1 * p.p_s_max, a2 * p.p_r_max);
  if (slope <= 0.0) return 0.0;
  // E[min(slope*g, cap)] = slope * mu * (1 - e^{-cap/(slope*mu)}).
  return slope * p.mu_cb * (-std::expm1(-cap / (slope * p.mu_cb)));
}

double surrogate_sir_static(double alpha, const NetworkParams& p) {
  const double s1 = p.mu_sr * std::min(alpha * p.p_c * p.kappa / (p.xi * p.mu_sb), p.p_s_max) /
                    (p.p_c * p.mu_cr + p.phi_bar);
  const double s2 = p.mu_rd *
                    std::min((1.0 - alpha) * p.p_c * p.kappa / (p.xi * p.mu_rb), p.p_r_max) /
                    (p.p_c * p.mu_cd);
  return std::min(s1, s2);
}

GoldenResult maximize_quasiconcave(const std::function<double(double)>& objective,
                                   double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("maximize_quasiconcave: tol must be positive");
  constexpr double kInvPhi = 0.61803398874989484820;
  double a = 0.0, b = 1.0;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  double best_x = fc >= fd ? c : d;
  double best_f = std::max(fc, fd);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = objective(c);
      if (fc >= best_f) { best_f = fc; best_x = c; }
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = objective(d);
      if (fd >= best_f) { best_f = fd; best_x = d; }
    }
  }
  const double xm = 0.5 * (a + b);
  const double fm = objective(xm);
  if (fm >= best_f) { best_f = fm; best_x = xm; }
  GoldenResult r;
  // For a unimodal objective the best sample always ends up inside the final
  // bracket; a best point stranded outside signals the ordering assumption
  // broke, in which case the best-seen point is still the honest answer.
  // Ties update best_x above (>=) so that plateaus follow the bracket:
  // a flat objective is weakly quasi-concave, not an ordering violation.
  if (best_x < a - tol || best_x > b + tol) {
    r.x = best_x;
    r.value = best_f;
    r.unimodal = false;
    return r;
  }
  r.x = best_x;
  r.value = best_f;
  r.unimodal = true;
  return r;
}

AlphaSearchResult suboptimal_alpha(const NetworkParams& params, PowerControl mode,
                                   Selection achieved_scheme, Duplex duplex) {
  params.validate();
  auto objective = [&](double alpha) {
    return mode == PowerControl::Dynamic ? surrogate_sir_dynamic(alpha, params)
                                         : surrogate_sir_static(alpha, params);
  };
  const GoldenResult g = maximize_quasiconcave(objective, 1e-6);
  AlphaSearchResult r;
  r.alpha = g.x;
  r.objective = g.value;
  r.method = AlphaSearchResult::Method::SurrogateSearch;
  r.unimodal = g.unimodal;
  NetworkParams at = params;
  at.alpha = g.x;
  r.achieved_outage.probability = analytic_outage(at, achieved_scheme, mode, duplex);
  r.achieved_outage.half_width = 0.0;
  r.achieved_outage.trials = 0;
  r.achieved_outage.source = OutageEstimate::Source::Analytic;
  return r;
}

AlphaSearchResult optimal_alpha_grid(const NetworkParams& params, PowerControl mode,
                                     Selection scheme, Duplex duplex, int grid_points,
                                     std::uint64_t trials, std::uint64_t seed) {
  params.validate();
  if (grid_points < 3) throw std::invalid_argument("optimal_alpha_grid: need at least 3 points");
  AlphaSearchResult best;
  best.method = AlphaSearchResult::Method::GridOracle;
  bool first = true;
  for (int i = 1; i <= grid_points; ++i) {
    const double alpha = static_cast<double>(i) / static_cast<double>(grid_points + 1);
    NetworkParams at = params;
    at.alpha = alpha;
    OutageEstimate est;
    if (scheme == Selection::Random) {
      // Independent seed per grid point keeps the points statistically
      // independent while the whole scan stays reproducible.
      est = estimate_outage(at, mode, duplex, scheme, trials,
                            seed + static_cast<std::uint64_t>(i));
    } else {
      est.probability = analytic_outage(at, scheme, mode, duplex);
      est.half_width = 0.0;
      est.trials = 0;
      est.source = OutageEstimate::Source::Analytic;
    }
    if (first || est.probability < best.achieved_outage.probability) {
      first = false;
      best.alpha = alpha;
      best.objective = est.probability;
      best.achieved_outage = est;
    }
  }
  return best;
}

}  // namespace d2d
