#pragma once

#include <cstdint>
#include <vector>

#include "tinyaction/matrix.hpp"
#include "tinyaction/rng.hpp"

namespace tinyaction {

enum class RunMode { kTrain, kEval };

/// One affine layer; weights stored (in x out) row-major.
struct Linear {
  Mat w;
  std::vector<double> b;
};

struct MlpBlockParams {
  Linear fc1;
  Linear fc2;
};

struct MlpParams {
  Linear input;                      // D -> H
  std::vector<MlpBlockParams> blocks;  // each H -> H -> H, added to the skip
  Linear head;                       // H -> C
};

/// Residual MLP with dropout inside each block branch and per-sample
/// drop-path on the branch itself.
struct MlpModel {
  int input_dim = 0;
  int hidden_width = 0;
  int num_blocks = 0;
  int num_classes = 0;
  double dropout_rate = 0.0;    // in [0,1)
  double drop_path_rate = 0.0;  // in [0,1)
  MlpParams params;
};

/// Everything backward() needs from the matching forward() call, including
/// the realized dropout masks and drop-path decisions.
struct ForwardCache {
  Mat input;           // N x D
  Mat projected;       // N x H, output of the input projection
  struct BlockCache {
    Mat h_in;          // N x H, block input
    Mat pre_act;       // N x H, fc1 output before ReLU
    Mat branch_act;    // N x H, after ReLU and dropout scaling
    Mat dropout_mask;  // N x H, 0 or 1/(1-p)
    std::vector<double> path_scale;  // per sample, 0 or 1/(1-p)
  };
  std::vector<BlockCache> blocks;
  Mat hidden_out;      // N x H, input to the head
};

/// Weights ~ U(-sqrt(3)/sqrt(fan_in), +sqrt(3)/sqrt(fan_in)), biases zero.
MlpModel init_model(int input_dim, int hidden_width, int num_blocks, int num_classes,
                    double dropout_rate, double drop_path_rate, std::uint64_t seed);

/// Returns N x C logits. In train mode rng supplies dropout masks and
/// drop-path decisions (inverted scaling); eval mode is deterministic and
/// consumes no randomness. cache may be null when no backward pass follows.
Mat forward(const MlpModel& model, const Mat& batch, RunMode mode, Rng* rng,
            ForwardCache* cache);

/// Elementwise stable sigmoid of the logits.
Mat predict_probs(const Mat& logits);

/// Exact parameter gradients of sum(logits * grad_logits) for the forward
/// pass recorded in cache.
MlpParams backward(const MlpModel& model, const ForwardCache& cache, const Mat& grad_logits);

/// Flat view over one parameter (or gradient) tensor; decay marks tensors
/// subject to weight decay (weights yes, biases no).
struct ParamView {
  double* data;
  std::size_t size;
  bool decay;
};
struct ConstParamView {
  const double* data;
  std::size_t size;
  bool decay;
};

/// Declaration-order views: input w, input b, per block (w1, b1, w2, b2),
/// head w, head b. Checkpoints and the optimizer both rely on this order.
std::vector<ParamView> param_views(MlpParams& params);
std::vector<ConstParamView> param_views(const MlpParams& params);

std::size_t param_count(const MlpParams& params);

}  // namespace tinyaction
