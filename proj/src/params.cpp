#include "d2d/params.hpp"

#include <cmath>
#include <stdexcept>

namespace d2d {

double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }

double linear_to_db(double x) { return 10.0 * std::log10(x); }

const char* to_string(PowerControl m) {
  return m == PowerControl::Dynamic ? "dynamic" : "static";
}

const char* to_string(Selection s) {
  switch (s) {
    case Selection::Bulk: return "bulk";
    case Selection::PerSubcarrier: return "per_subcarrier";
    default: return "random";
  }
}

const char* to_string(Duplex d) {
  switch (d) {
    case Duplex::Full: return "full";
    case Duplex::Half: return "half";
    default: return "ideal_full";
  }
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("NetworkParams: " + what);
}

void require_positive(double v, const char* name) {
  require(std::isfinite(v) && v > 0.0, std::string(name) + " must be positive and finite");
}

}  // namespace

void NetworkParams::validate() const {
  require_positive(mu_sr, "mu_sr");
  require_positive(mu_rd, "mu_rd");
  require_positive(mu_sb, "mu_sb");
  require_positive(mu_rb, "mu_rb");
  require_positive(mu_cr, "mu_cr");
  require_positive(mu_cd, "mu_cd");
  require_positive(mu_cb, "mu_cb");
  require_positive(phi_bar, "phi_bar");
  require_positive(p_c, "p_c");
  require_positive(p_s_max, "p_s_max");
  require_positive(p_r_max, "p_r_max");
  require_positive(xi, "xi");
  require_positive(s, "s");
  require_positive(kappa, "kappa");
  require(std::isfinite(alpha) && alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  require(n_relays >= 1, "n_relays must be at least 1");
  require(n_subcarriers >= 1, "n_subcarriers must be at least 1");
  // Stream ids pack relay and subcarrier indices into 14 bits each.
  require(n_relays < (1 << 14), "n_relays exceeds the supported range");
  require(n_subcarriers < (1 << 14), "n_subcarriers exceeds the supported range");
}

NetworkParams default_params() {
  NetworkParams p;
  p.mu_sr = db_to_linear(30.0);
  p.mu_rd = db_to_linear(30.0);
  p.mu_sb = db_to_linear(10.0);
  p.mu_rb = db_to_linear(10.0);
  p.mu_cr = db_to_linear(2.0);
  p.mu_cd = db_to_linear(2.0);
  p.mu_cb = db_to_linear(20.0);
  p.phi_bar = db_to_linear(5.0);
  p.p_c = 1.0;
  p.p_s_max = 1.0;
  p.p_r_max = 1.0;
  p.xi = 1.0;
  p.s = 1.0;
  p.alpha = 0.5;
  p.kappa = 4.0;
  p.n_relays = 4;
  p.n_subcarriers = 4;
  return p;
}

}  // namespace d2d
