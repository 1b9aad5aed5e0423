#include "tinyaction/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "tinyaction/mathutil.hpp"

namespace tinyaction {

namespace {

void check_binary(const Mat& labels, const char* what) {
  for (double y : labels.v) {
    if (y != 0.0 && y != 1.0) throw std::invalid_argument(std::string(what) + ": labels must be 0/1");
  }
}

}  // namespace

LossValue bce_loss(const Mat& logits, const Mat& labels) {
  require_same_shape(logits, labels, "bce_loss");
  if (!logits.all_finite()) throw std::invalid_argument("bce_loss: non-finite logits");
  check_binary(labels, "bce_loss");

  LossValue out;
  out.grad = Mat(logits.rows, logits.cols);
  double inv_n = 1.0 / static_cast<double>(logits.v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.v.size(); ++i) {
    double x = logits.v[i];
    double y = labels.v[i];
    sum += std::max(x, 0.0) - x * y + log1p_exp_neg_abs(x);
    out.grad.v[i] = (sigmoid(x) - y) * inv_n;
  }
  out.value = sum * inv_n;
  return out;
}

LossValue kd_loss(const Mat& probs, const Mat& knowledge) {
  require_same_shape(probs, knowledge, "kd_loss");
  for (double p : probs.v) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("kd_loss: probs must lie in [0,1]");
  }
  for (double k : knowledge.v) {
    if (!(k >= 0.0 && k <= 1.0)) throw std::invalid_argument("kd_loss: knowledge must lie in [0,1]");
  }

  LossValue out;
  out.grad = Mat(probs.rows, probs.cols);
  double inv_n = 1.0 / static_cast<double>(probs.v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.v.size(); ++i) {
    double d = probs.v[i] - knowledge.v[i];
    sum += d * d;
    out.grad.v[i] = 2.0 * d * inv_n;
  }
  out.value = sum * inv_n;
  return out;
}

LossValue total_loss(const Mat& logits, const Mat& labels, const Mat& knowledge, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("total_loss: alpha must lie in [0,1]");
  if (alpha == 1.0) return bce_loss(logits, labels);

  Mat probs(logits.rows, logits.cols);
  if (!logits.all_finite()) throw std::invalid_argument("total_loss: non-finite logits");
  for (std::size_t i = 0; i < logits.v.size(); ++i) probs.v[i] = sigmoid(logits.v[i]);

  LossValue kd = kd_loss(probs, knowledge);
  // Chain the kd gradient through the sigmoid: dL/dx = dL/dp * p * (1 - p).
  for (std::size_t i = 0; i < kd.grad.v.size(); ++i) {
    double p = probs.v[i];
    kd.grad.v[i] *= p * (1.0 - p);
  }
  if (alpha == 0.0) return kd;

  LossValue bce = bce_loss(logits, labels);
  LossValue out;
  out.value = alpha * bce.value + (1.0 - alpha) * kd.value;
  out.grad = Mat(logits.rows, logits.cols);
  for (std::size_t i = 0; i < out.grad.v.size(); ++i) {
    out.grad.v[i] = alpha * bce.grad.v[i] + (1.0 - alpha) * kd.grad.v[i];
  }
  return out;
}

LossValue asl_loss(const Mat& logits, const Mat& labels, const AslParams& params) {
  require_same_shape(logits, labels, "asl_loss");
  if (!logits.all_finite()) throw std::invalid_argument("asl_loss: non-finite logits");
  check_binary(labels, "asl_loss");
  if (params.gamma_pos < 0.0 || params.gamma_neg < 0.0) {
    throw std::invalid_argument("asl_loss: gammas must be >= 0");
  }
  if (params.margin < 0.0 || params.margin >= 1.0) {
    throw std::invalid_argument("asl_loss: margin must lie in [0,1)");
  }

  LossValue out;
  out.grad = Mat(logits.rows, logits.cols);
  double inv_n = 1.0 / static_cast<double>(logits.v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.v.size(); ++i) {
    double x = logits.v[i];
    double p = sigmoid(x);
    double term, dterm_dx;
    if (labels.v[i] == 1.0) {
      // -(1-p)^g+ * log p, with log p = -(max(x,0) - x + log(1+e^-|x|)).
      double log_p = -(std::max(x, 0.0) - x + log1p_exp_neg_abs(x));
      double one_minus_p = sigmoid(-x);
      if (params.gamma_pos == 0.0) {
        term = -log_p;
        dterm_dx = p - 1.0;
      } else {
        double focus = std::pow(one_minus_p, params.gamma_pos);
        term = -focus * log_p;
        dterm_dx = params.gamma_pos * p * focus * log_p - focus * one_minus_p;
      }
    } else {
      // -(p_m)^g- * log(1-p_m), p_m = max(p - m, 0).
      if (params.margin == 0.0) {
        double log_1mp = -(std::max(x, 0.0) + log1p_exp_neg_abs(x));
        if (params.gamma_neg == 0.0) {
          term = -log_1mp;
          dterm_dx = p;
        } else {
          double focus = std::pow(p, params.gamma_neg);
          term = -focus * log_1mp;
          dterm_dx = p * (1.0 - p) * (-params.gamma_neg * std::pow(p, params.gamma_neg - 1.0) * log_1mp) +
                     focus * p;
        }
      } else {
        double pm = p - params.margin;
        if (pm <= 0.0) {
          term = 0.0;
          dterm_dx = 0.0;
        } else {
          double one_minus_pm = std::min(sigmoid(-x) + params.margin, 1.0);
          double log_1mpm = std::log(one_minus_pm);
          double focus = params.gamma_neg == 0.0 ? 1.0 : std::pow(pm, params.gamma_neg);
          term = -focus * log_1mpm;
          double dfocus = params.gamma_neg == 0.0 ? 0.0
                                                  : params.gamma_neg * std::pow(pm, params.gamma_neg - 1.0);
          dterm_dx = p * (1.0 - p) * (-dfocus * log_1mpm + focus / one_minus_pm);
        }
      }
    }
    sum += term;
    out.grad.v[i] = dterm_dx * inv_n;
  }
  out.value = sum * inv_n;
  return out;
}

}  // namespace tinyaction
