#include "tinyaction/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "tinyaction/mathutil.hpp"

namespace tinyaction {

namespace {

Linear init_linear(int in, int out, Rng& rng) {
  Linear l;
  l.w = Mat(in, out);
  double bound = std::sqrt(3.0) / std::sqrt(static_cast<double>(in));
  for (auto& x : l.w.v) x = rng.uniform(-bound, bound);
  l.b.assign(static_cast<std::size_t>(out), 0.0);
  return l;
}

// out[n][o] = sum_i x[n][i] * w[i][o] + b[o]
Mat affine(const Mat& x, const Linear& l) {
  Mat out(x.rows, l.w.cols);
  for (int n = 0; n < x.rows; ++n) {
    const double* xr = x.row(n);
    double* or_ = out.row(n);
    for (int o = 0; o < l.w.cols; ++o) or_[o] = l.b[o];
    for (int i = 0; i < x.cols; ++i) {
      double xi = xr[i];
      if (xi == 0.0) continue;
      const double* wr = l.w.row(i);
      for (int o = 0; o < l.w.cols; ++o) or_[o] += xi * wr[o];
    }
  }
  return out;
}

// Accumulates grad w = x^T * gout and grad b = colsum(gout); returns
// gin = gout * w^T.
Mat affine_backward(const Mat& x, const Linear& l, const Mat& gout, Linear& grad) {
  for (int n = 0; n < x.rows; ++n) {
    const double* xr = x.row(n);
    const double* gr = gout.row(n);
    for (int i = 0; i < x.cols; ++i) {
      double xi = xr[i];
      if (xi == 0.0) continue;
      double* gw = grad.w.row(i);
      for (int o = 0; o < gout.cols; ++o) gw[o] += xi * gr[o];
    }
    for (int o = 0; o < gout.cols; ++o) grad.b[o] += gr[o];
  }
  Mat gin(x.rows, x.cols);
  for (int n = 0; n < x.rows; ++n) {
    const double* gr = gout.row(n);
    double* gi = gin.row(n);
    for (int i = 0; i < x.cols; ++i) {
      const double* wr = l.w.row(i);
      double acc = 0.0;
      for (int o = 0; o < gout.cols; ++o) acc += gr[o] * wr[o];
      gi[i] = acc;
    }
  }
  return gin;
}

Linear zeros_like(const Linear& l) {
  Linear g;
  g.w = Mat(l.w.rows, l.w.cols);
  g.b.assign(l.b.size(), 0.0);
  return g;
}

}  // namespace

MlpModel init_model(int input_dim, int hidden_width, int num_blocks, int num_classes,
                    double dropout_rate, double drop_path_rate, std::uint64_t seed) {
  if (input_dim < 1 || hidden_width < 1 || num_classes < 1 || num_blocks < 0) {
    throw std::invalid_argument("init_model: dims must be >= 1 (blocks >= 0)");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0 || drop_path_rate < 0.0 || drop_path_rate >= 1.0) {
    throw std::invalid_argument("init_model: rates must lie in [0,1)");
  }
  MlpModel model;
  model.input_dim = input_dim;
  model.hidden_width = hidden_width;
  model.num_blocks = num_blocks;
  model.num_classes = num_classes;
  model.dropout_rate = dropout_rate;
  model.drop_path_rate = drop_path_rate;

  Rng rng(derive_seed(seed, kInitStream));
  model.params.input = init_linear(input_dim, hidden_width, rng);
  for (int b = 0; b < num_blocks; ++b) {
    MlpBlockParams block;
    block.fc1 = init_linear(hidden_width, hidden_width, rng);
    block.fc2 = init_linear(hidden_width, hidden_width, rng);
    model.params.blocks.push_back(std::move(block));
  }
  model.params.head = init_linear(hidden_width, num_classes, rng);
  return model;
}

Mat forward(const MlpModel& model, const Mat& batch, RunMode mode, Rng* rng,
            ForwardCache* cache) {
  if (batch.cols != model.input_dim) {
    throw std::invalid_argument("forward: batch width does not match model input_dim");
  }
  if (!batch.all_finite()) throw std::invalid_argument("forward: non-finite input");
  bool train = mode == RunMode::kTrain;
  bool need_dropout = train && model.dropout_rate > 0.0;
  bool need_path = train && model.drop_path_rate > 0.0;
  if ((need_dropout || need_path) && rng == nullptr) {
    throw std::invalid_argument("forward: train mode with stochastic rates requires an rng");
  }

  int n_rows = batch.rows;
  int h_w = model.hidden_width;

  Mat h = affine(batch, model.params.input);
  if (cache) {
    cache->input = batch;
    cache->projected = h;
    cache->blocks.clear();
    cache->blocks.resize(static_cast<std::size_t>(model.num_blocks));
  }

  for (int b = 0; b < model.num_blocks; ++b) {
    const MlpBlockParams& block = model.params.blocks[b];

    // Per-sample drop-path decisions are drawn before the dropout mask so
    // the rng stream layout is fixed for replay.
    std::vector<double> path_scale(static_cast<std::size_t>(n_rows), 1.0);
    if (need_path) {
      double keep = 1.0 - model.drop_path_rate;
      for (auto& s : path_scale) s = rng->uniform01() < model.drop_path_rate ? 0.0 : 1.0 / keep;
    }

    Mat z1 = affine(h, block.fc1);
    Mat act(n_rows, h_w);
    Mat mask(n_rows, h_w, 1.0);
    if (need_dropout) {
      double keep = 1.0 - model.dropout_rate;
      for (auto& m : mask.v) m = rng->uniform01() < model.dropout_rate ? 0.0 : 1.0 / keep;
    }
    for (std::size_t i = 0; i < z1.v.size(); ++i) {
      double r = z1.v[i] > 0.0 ? z1.v[i] : 0.0;
      act.v[i] = need_dropout ? r * mask.v[i] : r;
    }

    Mat branch = affine(act, block.fc2);
    Mat h_out(n_rows, h_w);
    for (int n = 0; n < n_rows; ++n) {
      double s = path_scale[static_cast<std::size_t>(n)];
      const double* hr = h.row(n);
      const double* br = branch.row(n);
      double* outr = h_out.row(n);
      for (int j = 0; j < h_w; ++j) outr[j] = hr[j] + s * br[j];
    }

    if (cache) {
      auto& bc = cache->blocks[static_cast<std::size_t>(b)];
      bc.h_in = h;
      bc.pre_act = std::move(z1);
      bc.branch_act = act;
      bc.dropout_mask = std::move(mask);
      bc.path_scale = std::move(path_scale);
    }
    h = std::move(h_out);
  }

  if (cache) cache->hidden_out = h;
  return affine(h, model.params.head);
}

Mat predict_probs(const Mat& logits) {
  if (!logits.all_finite()) throw std::invalid_argument("predict_probs: non-finite logits");
  Mat probs(logits.rows, logits.cols);
  for (std::size_t i = 0; i < logits.v.size(); ++i) probs.v[i] = sigmoid(logits.v[i]);
  return probs;
}

MlpParams backward(const MlpModel& model, const ForwardCache& cache, const Mat& grad_logits) {
  if (cache.input.cols != model.input_dim ||
      static_cast<int>(cache.blocks.size()) != model.num_blocks ||
      cache.hidden_out.cols != model.hidden_width) {
    throw std::invalid_argument("backward: cache does not match model");
  }
  if (grad_logits.rows != cache.input.rows || grad_logits.cols != model.num_classes) {
    throw std::invalid_argument("backward: grad_logits shape mismatch");
  }

  MlpParams grads;
  grads.input = zeros_like(model.params.input);
  grads.head = zeros_like(model.params.head);
  for (const auto& b : model.params.blocks) {
    MlpBlockParams g;
    g.fc1 = zeros_like(b.fc1);
    g.fc2 = zeros_like(b.fc2);
    grads.blocks.push_back(std::move(g));
  }

  Mat gh = affine_backward(cache.hidden_out, model.params.head, grad_logits, grads.head);

  for (int b = model.num_blocks - 1; b >= 0; --b) {
    const auto& bc = cache.blocks[static_cast<std::size_t>(b)];
    const auto& block = model.params.blocks[static_cast<std::size_t>(b)];
    auto& gblock = grads.blocks[static_cast<std::size_t>(b)];

    // Branch gradient, scaled by the realized drop-path factor per sample.
    Mat gbranch(gh.rows, gh.cols);
    for (int n = 0; n < gh.rows; ++n) {
      double s = bc.path_scale[static_cast<std::size_t>(n)];
      const double* gr = gh.row(n);
      double* br = gbranch.row(n);
      for (int j = 0; j < gh.cols; ++j) br[j] = s * gr[j];
    }

    Mat gact = affine_backward(bc.branch_act, block.fc2, gbranch, gblock.fc2);
    // Through dropout scaling and the ReLU gate.
    for (std::size_t i = 0; i < gact.v.size(); ++i) {
      double g = gact.v[i] * bc.dropout_mask.v[i];
      gact.v[i] = bc.pre_act.v[i] > 0.0 ? g : 0.0;
    }
    Mat gin = affine_backward(bc.h_in, block.fc1, gact, gblock.fc1);

    for (std::size_t i = 0; i < gh.v.size(); ++i) gh.v[i] += gin.v[i];
  }

  affine_backward(cache.input, model.params.input, gh, grads.input);
  return grads;
}

std::vector<ParamView> param_views(MlpParams& params) {
  std::vector<ParamView> views;
  auto add = [&](Linear& l) {
    views.push_back({l.w.v.data(), l.w.v.size(), true});
    views.push_back({l.b.data(), l.b.size(), false});
  };
  add(params.input);
  for (auto& b : params.blocks) {
    add(b.fc1);
    add(b.fc2);
  }
  add(params.head);
  return views;
}

std::vector<ConstParamView> param_views(const MlpParams& params) {
  std::vector<ConstParamView> views;
  auto add = [&](const Linear& l) {
    views.push_back({l.w.v.data(), l.w.v.size(), true});
    views.push_back({l.b.data(), l.b.size(), false});
  };
  add(params.input);
  for (auto& b : params.blocks) {
    add(b.fc1);
    add(b.fc2);
  }
  add(params.head);
  return views;
}

std::size_t param_count(const MlpParams& params) {
  std::size_t total = 0;
  for (const auto& v : param_views(params)) total += v.size;
  return total;
}

}  // namespace tinyaction
