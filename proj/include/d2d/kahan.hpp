#pragma once

#include <cmath>

namespace d2d {

// Kahan-Neumaier compensated accumulator for alternating sums.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  double abs_sum = 0.0;  // sum of |terms|, a conditioning measure

  void add(double term) {
    abs_sum += std::fabs(term);
    const double t = sum + term;
    if (std::fabs(sum) >= std::fabs(term)) {
      comp += (sum - t) + term;
    } else {
      comp += (term - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

}  // namespace d2d
