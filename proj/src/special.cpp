#include "d2d/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "d2d/kahan.hpp"
#include "d2d/quadrature.hpp"

namespace d2d {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Continued-fraction factor h in Gamma(a, x) = exp(-x) x^a h (Legendre
// fraction, modified Lentz). Reliable once x is not much smaller than |a|.
double gamma_cf_h(int a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 10000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= 1e-16) break;
  }
  return h;
}

// Downward recurrence exp(x)*Gamma(a-1, x) = (exp(x)*Gamma(a, x) - x^(a-1)) / (a-1).
double recurse_down(double r, int from_a, int to_a, double x) {
  for (int a = from_a; a > to_a; --a) {
    r = (r - std::pow(x, a - 1)) / (a - 1);
  }
  return r;
}

}  // namespace

double exp_e1(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("exp_e1: x must be positive");
  if (x < 1.1) {
    // E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)
    double term = 1.0;
    double acc = 0.0;
    for (int k = 1; k <= 40; ++k) {
      term *= -x / k;
      const double add = -term / k;
      acc += add;
      if (std::fabs(add) < 1e-18 * std::fabs(acc)) break;
    }
    return acc - kEulerGamma - std::log(x);
  }
  return std::exp(-x) * gamma_cf_h(0, x);
}

double upper_gamma_scaled(int a, double x) {
  if (a > 1) throw std::invalid_argument("upper_gamma_scaled: a must be <= 1");
  if (!(x > 0.0)) throw std::invalid_argument("upper_gamma_scaled: x must be positive");
  if (a == 1) return 1.0;
  if (x < 1.1) {
    const double r0 = std::exp(x) * exp_e1(x);
    return recurse_down(r0, 0, a, x);
  }
  // Start the recurrence where the continued fraction converges well
  // (|a0| of order x) and walk down; each step contracts the error.
  const int a0 = std::max(a, 1 - static_cast<int>(std::floor(x)));
  const double r0 = std::exp(a0 * std::log(x)) * gamma_cf_h(a0, x);
  return recurse_down(r0, a0, a, x);
}

double upper_gamma(int a, double x) {
  if (a == 1) return std::exp(-x);
  return std::exp(-x) * upper_gamma_scaled(a, x);
}

double upper_gamma_scaled_zq(int q, double z) {
  if (q < 0) throw std::invalid_argument("upper_gamma_scaled_zq: q must be >= 0");
  if (q == 0) return 1.0;
  if (!(z > 0.0)) return 0.0;  // z -> 0 limit for q >= 1
  if (z < 1.1) {
    // Upward recurrence S(j) = z (1 - S(j-1)) / (j-1) from S(1) = z e^z E1(z);
    // contracting for z below the index.
    double s = z * std::exp(z) * exp_e1(z);
    for (int j = 2; j <= q; ++j) s = z * (1.0 - s) / (j - 1);
    return s;
  }
  if (z >= static_cast<double>(q)) {
    // z^q * (z^{1-q} h) = z h: no explicit powers, safe for huge z.
    return z * gamma_cf_h(1 - q, z);
  }
  return std::pow(z, q) * upper_gamma_scaled(1 - q, z);
}

std::vector<PartialFractionTerm> partial_fractions(
    const std::vector<std::pair<double, int>>& roots) {
  if (roots.empty()) throw std::invalid_argument("partial_fractions: no roots");
  for (const auto& [a, m] : roots) {
    if (!(a > 0.0) || !std::isfinite(a))
      throw std::invalid_argument("partial_fractions: roots must be positive and finite");
    if (m < 1) throw std::invalid_argument("partial_fractions: multiplicity must be >= 1");
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      const double gap = std::fabs(roots[i].first - roots[j].first);
      if (gap <= 1e-9 * std::max(roots[i].first, roots[j].first))
        throw std::invalid_argument(
            "partial_fractions: near-equal roots must be merged into one multiplicity");
    }
  }

  std::vector<PartialFractionTerm> out;
  out.reserve(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double ai = roots[i].first;
    const int mi = roots[i].second;
    // Around x = -a_i write prod_{j != i} (x + a_j)^{-m_j} = exp(h(x)) and
    // expand exp of the Taylor series of h; the series coefficients come
    // from the standard exponential-of-power-series recurrence.
    double b0 = 1.0;
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (j == i) continue;
      const double d = roots[j].first - ai;
      for (int r = 0; r < roots[j].second; ++r) b0 /= d;
    }
    std::vector<double> c(static_cast<std::size_t>(mi), 0.0);  // c[r], r >= 1 used
    for (int r = 1; r < mi; ++r) {
      double acc = 0.0;
      for (std::size_t j = 0; j < roots.size(); ++j) {
        if (j == i) continue;
        const double d = roots[j].first - ai;
        acc += roots[j].second * ((r % 2 == 0) ? 1.0 : -1.0) / (r * std::pow(d, r));
      }
      c[static_cast<std::size_t>(r)] = acc;
    }
    std::vector<double> beta(static_cast<std::size_t>(mi), 0.0);
    beta[0] = 1.0;
    for (int k = 1; k < mi; ++k) {
      double acc = 0.0;
      for (int r = 1; r <= k; ++r) acc += r * c[static_cast<std::size_t>(r)] * beta[static_cast<std::size_t>(k - r)];
      beta[static_cast<std::size_t>(k)] = acc / k;
    }
    PartialFractionTerm term;
    term.root = ai;
    term.multiplicity = mi;
    term.coeff.resize(static_cast<std::size_t>(mi));
    for (int q = 1; q <= mi; ++q)
      term.coeff[static_cast<std::size_t>(q - 1)] = b0 * beta[static_cast<std::size_t>(mi - q)];
    out.push_back(std::move(term));
  }
  return out;
}

double exp_poly_integral(int p, const std::vector<double>& roots, double b, double u,
                         double* abs_sum) {
  if (p < 0) throw std::invalid_argument("exp_poly_integral: p must be >= 0");
  if (!(b > 0.0)) throw std::invalid_argument("exp_poly_integral: b must be positive");
  if (u < 0.0) throw std::invalid_argument("exp_poly_integral: u must be >= 0");
  if (p == 0) {
    const double v = std::exp(-b * u) / b;
    if (abs_sum) *abs_sum = v;
    return v;
  }
  if (roots.empty())
    throw std::invalid_argument("exp_poly_integral: p >= 1 requires roots");
  for (double a : roots) {
    if (!(a > 0.0) || !std::isfinite(a))
      throw std::invalid_argument("exp_poly_integral: roots must be positive and finite");
  }
  // Merge near-equal roots into combined multiplicities.
  std::vector<double> sorted(roots);
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, int>> merged;
  for (double a : sorted) {
    if (!merged.empty() && a - merged.back().first <= 1e-9 * a) {
      merged.back().second += p;
    } else {
      merged.emplace_back(a, p);
    }
  }
  const auto terms = partial_fractions(merged);
  // int_u^inf exp(-bx) (x+a)^{-q} dx = b^{q-1} exp(-bu) * [e^z Gamma(1-q, z)]
  // with z = b (a + u); the scaled gamma keeps every factor representable.
  const double ebu = std::exp(-b * u);
  KahanSum acc;
  for (const auto& t : terms) {
    double bq = 1.0;  // b^{q-1}
    for (int q = 1; q <= t.multiplicity; ++q) {
      const double r = upper_gamma_scaled(1 - q, b * (t.root + u));
      acc.add(t.coeff[static_cast<std::size_t>(q - 1)] * bq * ebu * r);
      bq *= b;
    }
  }
  const double pf = acc.value();
  // Clustered poles make the reconstruction cancel: the sum of magnitudes
  // bounds the rounding error at abs_sum * eps. When that bound cannot
  // certify ~1e-9 relative accuracy (or cancellation drove the value
  // negative), integrate the definition directly instead; the integrand is
  // bounded, smooth and decays exactly like exp(-b x), so the exponential
  // transform quadrature is reliable there.
  const bool certified = pf > 0.0 && acc.abs_sum * 2.3e-16 <= 1e-9 * pf;
  if (!certified && ebu > 0.0) {
    auto f = [&](double y) {
      double v = 1.0;
      for (const auto& m : merged)
        v *= std::pow(u + y + m.first, -static_cast<double>(m.second));
      return v;
    };
    const double q = integrate_exp_expectation(f, 1.0 / b, 1e-12, 0.0, 4000).value;
    const double value = q * ebu / b;
    if (abs_sum) *abs_sum = std::fabs(value);  // no cancelling sum remains
    return value;
  }
  if (abs_sum) *abs_sum = acc.abs_sum;
  return pf;
}

}  // namespace d2d
