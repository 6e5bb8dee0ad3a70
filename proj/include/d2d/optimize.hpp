#pragma once

#include <cstdint>
#include <functional>

#include "d2d/link.hpp"
#include "d2d/params.hpp"

namespace d2d {

struct AlphaSearchResult {
  enum class Method { SurrogateSearch, GridOracle };
  double alpha = 0.5;
  // Surrogate SIR value at alpha for the search method, the outage
  // probability itself for the grid oracle.
  double objective = 0.0;
  OutageEstimate achieved_outage{};
  Method method = Method::SurrogateSearch;
  bool unimodal = true;
};

// Mean of the capped end-to-end SIR surrogate over the reporter gain under
// dynamic power control. Quasi-concave in alpha on (0,1).
double surrogate_sir_dynamic(double alpha, const NetworkParams& params);

// Same surrogate with every channel gain replaced by its mean (static power
// control): the smaller of the two per-hop mean SIRs.
double surrogate_sir_static(double alpha, const NetworkParams& params);

struct GoldenResult {
  double x = 0.0;
  double value = 0.0;
  bool unimodal = true;  // false when samples contradict a unimodal shape
};

// Golden-section maximization on the open interval (0,1). Deterministic;
// tracks the best sampled point so a non-unimodal objective still returns
// the best value seen, flagged via `unimodal`.
GoldenResult maximize_quasiconcave(const std::function<double(double)>& objective,
                                   double tol = 1e-6);

// Surrogate-based power coordination factor: maximizes the mode's surrogate
// SIR and reports the analytic outage achieved at that alpha.
AlphaSearchResult suboptimal_alpha(const NetworkParams& params, PowerControl mode,
                                   Selection achieved_scheme = Selection::PerSubcarrier,
                                   Duplex duplex = Duplex::Full);

// Brute-force reference: evaluates the outage on a uniform alpha grid over
// (0,1) (endpoints excluded) and returns the argmin, ties to the smaller
// alpha. Uses the analytic engine where it exists and Monte Carlo with
// `trials` samples per point for random selection.
AlphaSearchResult optimal_alpha_grid(const NetworkParams& params, PowerControl mode,
                                     Selection scheme, Duplex duplex, int grid_points,
                                     std::uint64_t trials, std::uint64_t seed);

}  // namespace d2d
