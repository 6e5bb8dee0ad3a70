#pragma once

#include <cmath>
#include <queue>
#include <vector>

namespace d2d {

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;  // accumulated error estimate
  int subdivisions = 0;
  bool converged = false;
};

namespace quad_detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15).
inline constexpr double kXgk[8] = {
    0.9914553711208126392068547, 0.9491079123427585245261897,
    0.8648644233597690727897128, 0.7415311855993944398638648,
    0.5860872354676911302941448, 0.4058451513773971669066064,
    0.2077849550078984676006894, 0.0};
inline constexpr double kWgk[8] = {
    0.0229353220105292249637320, 0.0630920926299785532907007,
    0.1047900103222501838398763, 0.1406532597155259187451896,
    0.1690047266392679028265834, 0.1903505780647854099132564,
    0.2044329400752988924141620, 0.2094821410847278280129992};
inline constexpr double kWg[4] = {
    0.1294849661688696932706114, 0.2797053914892766679014678,
    0.3818300505051189449503698, 0.4179591836734693877551020};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment eval_segment(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv1[7], fv2[7];
  const double fc = f(c);
  double gauss = kWg[3] * fc;
  double kron = kWgk[7] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    fv1[j] = f(c - x);
    fv2[j] = f(c + x);
    const double fsum = fv1[j] + fv2[j];
    kron += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  // Integrated deviation from the mean: the scale against which the
  // Gauss/Kronrod discrepancy is judged (QUADPACK's resasc).
  const double mean = kron * 0.5;
  double resasc = kWgk[7] * std::fabs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::fabs(fv1[j] - mean) + std::fabs(fv2[j] - mean));
  resasc *= std::fabs(h);

  Segment s;
  s.a = a;
  s.b = b;
  s.value = kron * h;
  double err = std::fabs((kron - gauss) * h);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  s.error = err;
  return s;
}

}  // namespace quad_detail

// Globally adaptive Gauss-Kronrod integration over a chain of segments
// [edges[0], edges[1]], [edges[1], edges[2]], ...: the segment with the
// largest error estimate is bisected until the summed error meets
// max(abs_tol, rel_tol * |integral|) or the subdivision budget runs out.
// Seeding with several segments matters: a lone panel whose Gauss and
// Kronrod rules happen to agree can hide narrow features between its
// nodes, and the error estimate never recovers from that first impression.
template <class F>
QuadratureResult integrate_segments(F&& f, const std::vector<double>& edges,
                                    double rel_tol = 1e-8, double abs_tol = 0.0,
                                    int max_subdiv = 2000) {
  using quad_detail::Segment;
  QuadratureResult res;
  std::priority_queue<Segment> heap;
  double total = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i] == edges[i + 1]) continue;
    Segment s = quad_detail::eval_segment(f, edges[i], edges[i + 1]);
    total += s.value;
    err += s.error;
    heap.push(s);
  }
  if (heap.empty()) {
    res.converged = true;
    return res;
  }
  int splits = 0;
  double stuck = 0.0;  // error pinned in intervals already at double resolution
  while (!heap.empty() &&
         err + stuck > std::max(abs_tol, rel_tol * std::fabs(total)) &&
         stuck <= std::max(abs_tol, rel_tol * std::fabs(total)) &&
         splits < max_subdiv) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Exhausted at double resolution: the residual error is irreducible,
      // so retire the interval instead of spinning on it. Keeping its error
      // in the total is what lets an unresolvable endpoint singularity
      // surface as converged = false rather than a silently wrong value.
      err -= worst.error;
      stuck += worst.error;
      continue;
    }
    Segment left = quad_detail::eval_segment(f, worst.a, mid);
    Segment right = quad_detail::eval_segment(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++splits;
  }
  res.value = total;
  res.abs_error = err + stuck;
  res.subdivisions = splits;
  res.converged = res.abs_error <= std::max(abs_tol, rel_tol * std::fabs(total));
  return res;
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, double rel_tol = 1e-8,
                           double abs_tol = 0.0, int max_subdiv = 2000) {
  return integrate_segments(static_cast<F&&>(f), std::vector<double>{a, b}, rel_tol,
                            abs_tol, max_subdiv);
}

namespace quad_detail {

// Largest double below 1. Transform nodes are clamped here: a Kronrod node
// inside the last ulp-wide panel rounds to exactly 1, where the maps below
// would evaluate f at infinity.
inline constexpr double kOneBelowOne = 0x1.fffffffffffffp-1;

// Initial partition of [0,1] for the exponential-expectation transform:
// geometric toward both endpoints so that integrand variation living at any
// scale from 2^-44 up spans several panels and cannot slip between the
// nodes of a single wide one. Variation below 2^-44 carries at most
// ~6e-14 of mass, beneath every tolerance used here.
inline const std::vector<double>& unit_geometric_edges() {
  static const std::vector<double> edges = [] {
    std::vector<double> e;
    e.push_back(0.0);
    for (int k = 44; k >= 1; --k) e.push_back(std::ldexp(1.0, -k));
    for (int k = 2; k <= 44; ++k) e.push_back(1.0 - std::ldexp(1.0, -k));
    e.push_back(1.0);
    return e;
  }();
  return edges;
}

}  // namespace quad_detail

// E[f(X)] for X ~ Exp(mean). The substitution t = 1 - exp(-x/mean) maps
// the weighted semi-infinite integral onto the unit interval exactly, so
// the exponential density never has to be evaluated.
template <class F>
QuadratureResult integrate_exp_expectation(F&& f, double mean, double rel_tol = 1e-8,
                                           double abs_tol = 0.0, int max_subdiv = 2000) {
  auto g = [&f, mean](double t) {
    if (t > quad_detail::kOneBelowOne) t = quad_detail::kOneBelowOne;
    return f(-mean * std::log1p(-t));
  };
  return integrate_segments(g, quad_detail::unit_geometric_edges(), rel_tol, abs_tol,
                            max_subdiv);
}

// Integral of f over [lo, infinity), via t = 1 - exp(-(x-lo)/scale).
// f must decay at least as fast as exp(-(x-lo)/scale), i.e. scale must sit
// at or above the decay length of f; otherwise the transformed integrand
// has a singularity at t = 1 whose mass extends past double resolution.
// Such tails come back with a finite value and converged = false.
template <class F>
QuadratureResult integrate_semi_infinite(F&& f, double lo, double scale,
                                         double rel_tol = 1e-8, double abs_tol = 0.0,
                                         int max_subdiv = 2000) {
  auto g = [&f, lo, scale](double t) {
    if (t > quad_detail::kOneBelowOne) t = quad_detail::kOneBelowOne;
    const double x = lo - scale * std::log1p(-t);
    return f(x) * scale / (1.0 - t);
  };
  return integrate_segments(g, quad_detail::unit_geometric_edges(), rel_tol, abs_tol,
                            max_subdiv);
}

}  // namespace d2d
