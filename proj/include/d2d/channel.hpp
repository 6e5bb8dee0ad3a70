#pragma once

#include <cstdint>
#include <vector>

#include "d2d/params.hpp"
#include "d2d/rng.hpp"

namespace d2d {

// One joint draw of every channel power gain for a single trial.
// Per-(relay, subcarrier) arrays are relay-major.
struct ChannelRealization {
  int n_relays = 0;
  int n_subcarriers = 0;
  std::vector<double> g_sr;  // source -> relay           [n_relays * n_subcarriers]
  std::vector<double> g_rd;  // relay -> destination      [n_relays * n_subcarriers]
  std::vector<double> g_cr;  // cellular -> relay         [n_relays * n_subcarriers]
  std::vector<double> g_rb;  // relay -> base station     [n_relays * n_subcarriers]
  std::vector<double> phi;   // residual self-interference[n_relays * n_subcarriers]
  std::vector<double> g_cd;  // cellular -> destination   [n_subcarriers]
  std::vector<double> g_sb;  // source -> base station    [n_subcarriers]
  std::vector<double> g_cb;  // cellular -> base station  [n_subcarriers]

  int idx(int relay, int subcarrier) const { return relay * n_subcarriers + subcarrier; }
  void resize(int relays, int subcarriers);
};

// CDF of the exponential distribution with the given mean.
double exp_cdf(double x, double mean);

// Draw every gain for one trial. Streams are keyed by
// (family, relay, subcarrier), so the same (seed, trial) always yields
// the same realization regardless of call order.
void sample_realization(const NetworkParams& params, const CounterRng& rng,
                        std::uint64_t trial, ChannelRealization* out);
ChannelRealization sample_realization(const NetworkParams& params, const CounterRng& rng,
                                      std::uint64_t trial);

}  // namespace d2d
