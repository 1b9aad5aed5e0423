#pragma once

#include <algorithm>
#include <cmath>

namespace tinyaction {

// log(1 + exp(-|x|)), the shared tail term of the stable binary
// cross-entropy form max(x,0) - x*y + log(1+exp(-|x|)).
inline double log1p_exp_neg_abs(double x) { return std::log1p(std::exp(-std::fabs(x))); }

// softplus(x) = log(1 + exp(x)), computed without overflow.
inline double softplus(double x) { return std::max(x, 0.0) + log1p_exp_neg_abs(x); }

// Numerically stable logistic sigmoid; saturates to 1.0/0.0 without overflow.
inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace tinyaction
