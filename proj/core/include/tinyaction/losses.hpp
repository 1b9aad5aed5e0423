#pragma once

#include "tinyaction/matrix.hpp"

namespace tinyaction {

/// Scalar loss plus its gradient. The gradient is taken w.r.t. logits for
/// bce_loss / asl_loss / total_loss and w.r.t. the probabilities for
/// kd_loss (which is defined on probability vectors).
struct LossValue {
  double value = 0.0;
  Mat grad;
};

/// Mean binary cross-entropy over all N*C entries, computed in the stable
/// logit form max(x,0) - x*y + log(1+exp(-|x|)).
LossValue bce_loss(const Mat& logits, const Mat& labels);

/// Mean squared error between probability vectors: per-sample mean over
/// classes of (p - k)^2, then mean over the batch.
LossValue kd_loss(const Mat& probs, const Mat& knowledge);

/// alpha * bce + (1 - alpha) * kd, with the kd gradient chained through the
/// sigmoid so the combined gradient is w.r.t. logits. alpha == 1 and
/// alpha == 0 return the pure sub-loss bit-exactly.
LossValue total_loss(const Mat& logits, const Mat& labels, const Mat& knowledge, double alpha);

struct AslParams {
  double gamma_pos = 0.0;
  double gamma_neg = 4.0;
  double margin = 0.05;  // probability shift applied to negatives
};

/// Asymmetric focal loss: positives weighted by (1-p)^gamma_pos, negatives
/// by p_m^gamma_neg with p_m = max(p - margin, 0). Reduces to bce_loss when
/// both gammas and the margin are zero.
LossValue asl_loss(const Mat& logits, const Mat& labels, const AslParams& params);

}  // namespace tinyaction
