#pragma once

#include <string>

namespace d2d {

// Power-style decibel conversion, x dB -> 10^(x/10).
double db_to_linear(double x_db);
double linear_to_db(double x);

// How the source/relay transmit powers track the reporter uplink.
enum class PowerControl { Dynamic, Static };

// How the forwarding relay is chosen.
enum class Selection { Bulk, PerSubcarrier, Random };

// Relay duplexing. IdealFull is full-duplex with the residual
// self-interference forced to zero (an upper-bound reference).
enum class Duplex { Full, Half, IdealFull };

const char* to_string(PowerControl m);
const char* to_string(Selection s);
const char* to_string(Duplex d);

// Scenario description. Channel gains are exponential (Rayleigh power
// fading); mu_* are their means in linear scale. Powers and thresholds
// are in the same normalized units throughout.
struct NetworkParams {
  double mu_sr = 1.0;    // source -> relay
  double mu_rd = 1.0;    // relay -> destination
  double mu_sb = 1.0;    // source -> base station (uplink interference)
  double mu_rb = 1.0;    // relay -> base station
  double mu_cr = 1.0;    // cellular user -> relay (downlink interference)
  double mu_cd = 1.0;    // cellular user -> destination
  double mu_cb = 1.0;    // cellular user -> base station (reporter link)
  double phi_bar = 1.0;  // mean residual self-interference at the relay
  double p_c = 1.0;      // cellular user transmit power
  double p_s_max = 1.0;  // source peak power
  double p_r_max = 1.0;  // relay peak power
  double xi = 1.0;       // cellular SIR protection threshold
  double s = 1.0;        // device-to-device SIR threshold
  double alpha = 0.5;    // source share of the interference budget, in (0,1)
  double kappa = 1.0;    // static power control surrogate for the reporter gain
  int n_relays = 1;
  int n_subcarriers = 1;

  // Throws std::invalid_argument on the first violated constraint.
  void validate() const;
};

// Reference scenario used by the bundled experiments: strong D2D hops
// (30 dB), moderate leakage to the base station (10 dB), weak cellular
// interference (2 dB), 20 dB reporter link, 5 dB self-interference.
NetworkParams default_params();

}  // namespace d2d
