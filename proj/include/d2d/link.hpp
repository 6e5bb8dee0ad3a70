#pragma once

#include <cstdint>
#include <vector>

#include "d2d/channel.hpp"
#include "d2d/params.hpp"
#include "d2d/rng.hpp"

namespace d2d {

// Result of an outage evaluation. Monte Carlo estimates carry a Wilson
// 95% confidence half-width; analytic values set half_width and trials
// to zero.
struct OutageEstimate {
  enum class Source { Analytic, MonteCarlo };
  double probability = 0.0;
  double half_width = 0.0;
  std::uint64_t trials = 0;
  Source source = Source::MonteCarlo;
};

// Wilson score 95% confidence half-width for x successes in n trials.
double wilson_half_width(std::uint64_t successes, std::uint64_t n);

// Interference-budget power control. Dynamic tracks the realized
// reporter-uplink gain g_cb; Static replaces it with the constant kappa.
// Both are clipped at the peak power.
double source_power(int subcarrier, const ChannelRealization& ch, const NetworkParams& p,
                    PowerControl mode);
double relay_power(int relay, int subcarrier, const ChannelRealization& ch,
                   const NetworkParams& p, PowerControl mode);

// Hop SIRs. The first hop sees cellular interference plus (in Full
// duplex) the residual self-interference; Half and IdealFull zero the
// self-interference term. A zero denominator yields +infinity.
double sir_first_hop(int relay, int subcarrier, const ChannelRealization& ch,
                     const NetworkParams& p, PowerControl mode, Duplex duplex);
double sir_second_hop(int relay, int subcarrier, const ChannelRealization& ch,
                      const NetworkParams& p, PowerControl mode);

// Decode-and-forward end-to-end SIR: the minimum of the two hops.
double sir_end_to_end(int relay, int subcarrier, const ChannelRealization& ch,
                      const NetworkParams& p, PowerControl mode, Duplex duplex);

// Relay chosen for each subcarrier. Bulk assigns one relay (the argmax
// of the per-relay worst subcarrier) to every subcarrier; PerSubcarrier
// picks the per-subcarrier best; Random draws one relay uniformly and
// uses it for all subcarriers. Ties resolve to the lowest index.
std::vector<int> select_relays(const ChannelRealization& ch, const NetworkParams& p,
                               PowerControl mode, Duplex duplex, Selection scheme,
                               const CounterRng& rng, std::uint64_t trial);

// Whether the D2D link is in outage for this trial: the worst selected
// subcarrier SIR falls below the duplex-resolved threshold (s for Full
// and IdealFull, s(s+2) for Half, which forwards in two slots).
bool is_outage(const ChannelRealization& ch, const NetworkParams& p, PowerControl mode,
               Duplex duplex, Selection scheme, const CounterRng& rng, std::uint64_t trial);

// Monte Carlo outage probability over `trials` independent realizations.
// workers <= 0 uses the hardware thread count; the estimate is identical
// for any worker count because the generator is counter-based.
OutageEstimate estimate_outage(const NetworkParams& p, PowerControl mode, Duplex duplex,
                               Selection scheme, std::uint64_t trials, std::uint64_t seed,
                               int workers = 0);

// Monte Carlo cellular uplink outage (SIR at the base station below xi),
// averaged over subcarriers. Under Dynamic control with slack peak caps
// the protection holds with equality; outage is declared only when the
// SIR is below xi by more than a relative 1e-12 guard so that boundary
// rounding does not register as outage.
OutageEstimate cellular_outage(const NetworkParams& p, PowerControl mode, Duplex duplex,
                               Selection scheme, std::uint64_t trials, std::uint64_t seed,
                               int workers = 0);

}  // namespace d2d
