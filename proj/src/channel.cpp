#include "d2d/channel.hpp"

#include <cmath>

namespace d2d {

void ChannelRealization::resize(int relays, int subcarriers) {
  n_relays = relays;
  n_subcarriers = subcarriers;
  const std::size_t nk = static_cast<std::size_t>(relays) * subcarriers;
  g_sr.resize(nk);
  g_rd.resize(nk);
  g_cr.resize(nk);
  g_rb.resize(nk);
  phi.resize(nk);
  g_cd.resize(subcarriers);
  g_sb.resize(subcarriers);
  g_cb.resize(subcarriers);
}

double exp_cdf(double x, double mean) {
  if (x <= 0.0) return 0.0;
  return -std::expm1(-x / mean);
}

void sample_realization(const NetworkParams& params, const CounterRng& rng,
                        std::uint64_t trial, ChannelRealization* out) {
  const int N = params.n_relays;
  const int K = params.n_subcarriers;
  if (out->n_relays != N || out->n_subcarriers != K) out->resize(N, K);
  for (int n = 0; n < N; ++n) {
    const std::uint32_t rn = static_cast<std::uint32_t>(n);
    for (int k = 0; k < K; ++k) {
      const std::uint32_t sk = static_cast<std::uint32_t>(k);
      const int i = out->idx(n, k);
      out->g_sr[i] = rng.exponential(params.mu_sr, trial, stream_id(Fade::SR, rn, sk));
      out->g_rd[i] = rng.exponential(params.mu_rd, trial, stream_id(Fade::RD, rn, sk));
      out->g_cr[i] = rng.exponential(params.mu_cr, trial, stream_id(Fade::CR, rn, sk));
      out->g_rb[i] = rng.exponential(params.mu_rb, trial, stream_id(Fade::RB, rn, sk));
      out->phi[i] = rng.exponential(params.phi_bar, trial, stream_id(Fade::PHI, rn, sk));
    }
  }
  for (int k = 0; k < K; ++k) {
    const std::uint32_t sk = static_cast<std::uint32_t>(k);
    out->g_cd[k] = rng.exponential(params.mu_cd, trial, stream_id(Fade::CD, 0, sk));
    out->g_sb[k] = rng.exponential(params.mu_sb, trial, stream_id(Fade::SB, 0, sk));
    out->g_cb[k] = rng.exponential(params.mu_cb, trial, stream_id(Fade::CB, 0, sk));
  }
}

ChannelRealization sample_realization(const NetworkParams& params, const CounterRng& rng,
                                      std::uint64_t trial) {
  ChannelRealization r;
  sample_realization(params, rng, trial, &r);
  return r;
}

}  // namespace d2d
