#pragma once

#include <utility>
#include <vector>

namespace d2d {

// Exponential integral E1(x) = int_x^inf exp(-t)/t dt, x > 0.
double exp_e1(double x);

// Upper incomplete gamma Gamma(a, x) for integer a <= 1, x > 0. For
// nonpositive a this is the generalized (analytically continued) form.
double upper_gamma(int a, double x);

// exp(x) * Gamma(a, x): the scaled form stays representable when x is
// large enough for Gamma(a, x) itself to underflow.
double upper_gamma_scaled(int a, double x);

// z^q * exp(z) * Gamma(1-q, z) for q >= 0, z > 0. Bounded by 1; safe for
// any magnitude of z. Used wherever Gamma(1-q, .) appears multiplied by
// a q-th power of its argument.
double upper_gamma_scaled_zq(int q, double z);

// One pole of a partial fraction expansion of 1 / prod_i (x + root_i)^mult_i:
// coeff[q-1] multiplies 1/(x + root)^q.
struct PartialFractionTerm {
  double root = 0.0;
  int multiplicity = 0;
  std::vector<double> coeff;
};

// Expand 1 / prod (x + root_i)^mult_i into sum_i sum_q coeff / (x+root_i)^q.
// Roots must be positive, finite and pairwise separated by more than 1e-9
// in relative terms (merge near-equal roots into one multiplicity first);
// violations throw std::invalid_argument.
std::vector<PartialFractionTerm> partial_fractions(
    const std::vector<std::pair<double, int>>& roots);

// chi = int_u^inf exp(-b x) / prod_i (x + a_i)^p dx for b > 0, u >= 0 and
// positive roots a. Roots closer than 1e-9 relative are merged into a
// single root of combined multiplicity before expansion. If abs_sum is
// non-null it receives sum |term| over the expansion, a conditioning
// measure for the alternating sum (abs_sum ~ |chi| means full accuracy).
double exp_poly_integral(int p, const std::vector<double>& roots, double b, double u,
                         double* abs_sum = nullptr);

}  // namespace d2d
