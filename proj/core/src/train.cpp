#include "tinyaction/train.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "tinyaction/log.hpp"

namespace tinyaction {

const char* loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::kBce: return "bce";
    case LossKind::kAsl: return "asl";
    case LossKind::kTotal: return "total";
  }
  return "?";
}

LossKind loss_from_name(const std::string& name) {
  if (name == "bce") return LossKind::kBce;
  if (name == "asl") return LossKind::kAsl;
  if (name == "total") return LossKind::kTotal;
  throw std::invalid_argument("unknown loss: '" + name + "' (expected bce|asl|total)");
}

const char* sampling_name(SamplingMode mode) {
  return mode == SamplingMode::kUniform ? "uniform" : "first_k";
}

SamplingMode sampling_from_name(const std::string& name) {
  if (name == "uniform") return SamplingMode::kUniform;
  if (name == "first_k") return SamplingMode::kFirstK;
  throw std::invalid_argument("unknown sampling mode: '" + name + "' (expected uniform|first_k)");
}

void validate_train_config(const TrainConfig& config) {
  if (config.epochs < 1) throw std::invalid_argument("train config: epochs must be >= 1");
  if (config.batch_size < 1) throw std::invalid_argument("train config: batch_size must be >= 1");
  if (config.alpha < 0.0 || config.alpha > 1.0) {
    throw std::invalid_argument("train config: alpha must lie in [0,1]");
  }
  if (config.clips < 1) throw std::invalid_argument("train config: clips must be >= 1");
  if (config.hidden_width < 1 || config.num_blocks < 0) {
    throw std::invalid_argument("train config: hidden_width >= 1 and num_blocks >= 0 required");
  }
  if (config.tail_quantile < 0.0 || config.tail_quantile > 1.0) {
    throw std::invalid_argument("train config: tail_quantile must lie in [0,1]");
  }
  if (config.checkpoint_every < 1) {
    throw std::invalid_argument("train config: checkpoint_every must be >= 1");
  }
  validate_schedule(config.schedule);
}

std::vector<double> featurize(const LabeledSample& sample, Tier tier, int clips,
                              SamplingMode sampling, RunMode mode, Rng* rng) {
  const VideoTensor& video = sample.video(tier);
  std::vector<int> indices;
  if (sampling == SamplingMode::kFirstK) {
    indices.resize(static_cast<std::size_t>(clips));
    for (int c = 0; c < clips; ++c) indices[c] = std::min(c, video.frames - 1);
  } else if (mode == RunMode::kTrain) {
    if (rng == nullptr) throw std::invalid_argument("featurize: train mode requires an rng");
    indices = uniform_sample_indices(video.frames, clips, *rng);
  } else {
    indices = midclip_sample_indices(video.frames, clips);
  }

  std::vector<double> features;
  features.reserve(static_cast<std::size_t>(clips) * video.frame_size());
  for (int idx : indices) {
    const double* frame = video.frame(idx);
    features.insert(features.end(), frame, frame + video.frame_size());
  }
  return features;
}

int feature_dim(const Dataset& dataset, Tier tier, int clips) {
  if (dataset.samples.empty()) throw std::invalid_argument("feature_dim: empty dataset");
  const VideoTensor& v = dataset.samples.front().video(tier);
  return clips * v.height * v.width;
}

namespace {

Mat labels_batch(const std::vector<const LabeledSample*>& batch, int num_classes) {
  Mat y(static_cast<int>(batch.size()), num_classes);
  for (std::size_t r = 0; r < batch.size(); ++r) {
    for (int c = 0; c < num_classes; ++c) {
      y.at(static_cast<int>(r), c) = batch[r]->labels[static_cast<std::size_t>(c)] ? 1.0 : 0.0;
    }
  }
  return y;
}

struct TrainContext {
  const TrainConfig* cfg;
  const Dataset* train_set;
  Tier tier;
  int feat_dim;
  const DistillTarget* knowledge;  // null for plain training
  std::vector<const LabeledSample*> ordered;  // sorted by id
  std::unordered_map<std::int64_t, int> knowledge_row;
};

TrainContext make_context(const DataView& view, const TrainConfig& config,
                          const DistillTarget* knowledge) {
  validate_train_config(config);
  if (view.train == nullptr || view.val == nullptr || view.test == nullptr) {
    throw std::invalid_argument("train: view must provide train/val/test");
  }
  if (view.train->samples.empty()) throw std::invalid_argument("train: empty training set");

  TrainContext ctx;
  ctx.cfg = &config;
  ctx.train_set = view.train;
  ctx.tier = view.tier;
  ctx.feat_dim = feature_dim(*view.train, view.tier, config.clips);
  ctx.knowledge = knowledge;

  ctx.ordered.reserve(view.train->samples.size());
  for (const auto& s : view.train->samples) ctx.ordered.push_back(&s);
  std::sort(ctx.ordered.begin(), ctx.ordered.end(),
            [](const LabeledSample* a, const LabeledSample* b) { return a->id < b->id; });

  if (knowledge != nullptr) {
    if (knowledge->sample_ids.size() != view.train->samples.size()) {
      throw std::invalid_argument("distill: knowledge row count must equal training sample count");
    }
    for (std::size_t r = 0; r < knowledge->sample_ids.size(); ++r) {
      ctx.knowledge_row[knowledge->sample_ids[r]] = static_cast<int>(r);
    }
  }
  return ctx;
}

Mat knowledge_batch(const TrainContext& ctx, const std::vector<const LabeledSample*>& batch) {
  Mat k(static_cast<int>(batch.size()), ctx.train_set->num_classes);
  for (std::size_t r = 0; r < batch.size(); ++r) {
    auto it = ctx.knowledge_row.find(batch[r]->id);
    if (it == ctx.knowledge_row.end()) {
      throw std::runtime_error("distill: no knowledge row for sample id " +
                               std::to_string(batch[r]->id));
    }
    for (int c = 0; c < k.cols; ++c) {
      k.at(static_cast<int>(r), c) = ctx.knowledge->knowledge.at(it->second, c);
    }
  }
  return k;
}

// One epoch of mini-batch updates. Epoch ordering, featurization and the
// network noise stream are all derived from (seed, epoch) and sample ids,
// never from storage order, so replays and reshuffled datasets reproduce
// the exact same trajectory.
double run_epoch(const TrainContext& ctx, MlpModel& model, AdamWState& opt, int epoch) {
  const TrainConfig& cfg = *ctx.cfg;
  int num_classes = ctx.train_set->num_classes;

  std::vector<const LabeledSample*> order = ctx.ordered;
  Rng order_rng(derive_seed(cfg.seed, kEpochOrderStream, static_cast<std::uint64_t>(epoch)));
  order_rng.shuffle(order);

  Rng net_rng(derive_seed(cfg.seed, kNetNoiseStream, static_cast<std::uint64_t>(epoch)));

  double loss_sum = 0.0;
  std::size_t row_count = 0;
  int batch_index = 0;
  for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
    std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
    std::vector<const LabeledSample*> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                            order.begin() + static_cast<std::ptrdiff_t>(stop));

    Mat x(static_cast<int>(batch.size()), ctx.feat_dim);
    for (std::size_t r = 0; r < batch.size(); ++r) {
      Rng feat_rng(derive_seed(cfg.seed, kFeaturizeStream, static_cast<std::uint64_t>(epoch),
                               static_cast<std::uint64_t>(batch[r]->id)));
      std::vector<double> f =
          featurize(*batch[r], ctx.tier, cfg.clips, cfg.sampling, RunMode::kTrain, &feat_rng);
      std::copy(f.begin(), f.end(), x.row(static_cast<int>(r)));
    }

    ForwardCache cache;
    Mat logits = forward(model, x, RunMode::kTrain, &net_rng, &cache);
    Mat y = labels_batch(batch, num_classes);

    LossValue loss;
    switch (cfg.loss) {
      case LossKind::kBce:
        loss = bce_loss(logits, y);
        break;
      case LossKind::kAsl:
        loss = asl_loss(logits, y, cfg.asl);
        break;
      case LossKind::kTotal: {
        if (ctx.knowledge != nullptr) {
          loss = total_loss(logits, y, knowledge_batch(ctx, batch), cfg.alpha);
        } else if (cfg.alpha == 1.0) {
          loss = total_loss(logits, y, Mat(), cfg.alpha);  // kd term unused
        } else {
          throw std::invalid_argument("train: loss=total with alpha < 1 requires knowledge");
        }
        break;
      }
    }
    if (!std::isfinite(loss.value)) {
      throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(batch_index));
    }

    MlpParams grads = backward(model, cache, loss.grad);
    auto params = param_views(model.params);
    auto grad_views = param_views(static_cast<const MlpParams&>(grads));
    double lr = lr_at(opt.step, cfg.schedule);
    adamw_step(params, grad_views, opt, lr);

    loss_sum += loss.value * static_cast<double>(batch.size());
    row_count += batch.size();
    ++batch_index;
  }
  return loss_sum / static_cast<double>(row_count);
}

std::pair<MlpModel, TrainReport> train_loop(const DataView& view, const TrainConfig& config,
                                            const DistillTarget* knowledge,
                                            const std::string& out_dir) {
  TrainContext ctx = make_context(view, config, knowledge);
  int num_classes = view.train->num_classes;

  MlpModel model = init_model(ctx.feat_dim, config.hidden_width, config.num_blocks, num_classes,
                              config.dropout_rate, config.drop_path_rate, config.seed);
  AdamWState opt = init_adamw(param_views(model.params), config.adamw);

  ScoreMatrix val_labels = labels_matrix(*view.val);
  FusionConfig half;
  half.thresholds.assign(static_cast<std::size_t>(num_classes), 0.5);

  TrainReport report;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    double mean_loss = run_epoch(ctx, model, opt, epoch);
    report.train_loss.push_back(mean_loss);

    ScoreMatrix val_scores = score_dataset(model, *view.val, view.tier, config.clips, config.sampling);
    Mat preds = apply_thresholds(val_scores, half);
    double f1 = f1_scores(preds, val_labels.scores).sample_f1;
    report.val_f1.push_back(f1);

    if (!out_dir.empty() && (epoch % config.checkpoint_every == 0 || epoch == config.epochs)) {
      Checkpoint ckpt;
      ckpt.model = model;
      ckpt.train_seed = config.seed;
      ckpt.epoch = epoch;
      ckpt.optimizer = opt;
      std::string path = out_dir + "/epoch_" + std::to_string(epoch) + ".ckpt";
      save_checkpoint(ckpt, path);
      report.checkpoint_paths.push_back(path);
    }
    log_info("epoch " + std::to_string(epoch) + "/" + std::to_string(config.epochs) +
             " loss " + std::to_string(mean_loss) + " val_f1 " + std::to_string(f1));
  }

  report.val_scores = score_dataset(model, *view.val, view.tier, config.clips, config.sampling);
  report.test_scores = score_dataset(model, *view.test, view.tier, config.clips, config.sampling);
  return {std::move(model), std::move(report)};
}

}  // namespace

DistillTarget extract_knowledge(const MlpModel& teacher, const Dataset& dataset, Tier tier,
                                int clips) {
  if (dataset.samples.empty()) throw std::invalid_argument("extract_knowledge: empty dataset");
  if (teacher.input_dim != feature_dim(dataset, tier, clips)) {
    throw std::invalid_argument("extract_knowledge: teacher input dim does not match featurization");
  }
  ScoreMatrix scores = score_dataset(teacher, dataset, tier, clips, SamplingMode::kUniform);
  DistillTarget target;
  target.sample_ids = std::move(scores.ids);
  target.knowledge = std::move(scores.scores);
  return target;
}

std::pair<MlpModel, TrainReport> train_model(const DataView& view, const TrainConfig& config,
                                             const std::string& out_dir) {
  return train_loop(view, config, nullptr, out_dir);
}

std::pair<MlpModel, TrainReport> distill_student(const DataView& view,
                                                 const DistillTarget& knowledge,
                                                 const TrainConfig& config,
                                                 const std::string& out_dir) {
  TrainConfig cfg = config;
  cfg.loss = LossKind::kTotal;  // two supervision signals on the prediction vector
  return train_loop(view, cfg, &knowledge, out_dir);
}

ScoreMatrix score_dataset(const MlpModel& model, const Dataset& dataset, Tier tier, int clips,
                          SamplingMode sampling) {
  if (dataset.samples.empty()) {
    ScoreMatrix empty;
    empty.scores = Mat(0, model.num_classes);
    return empty;
  }
  int dim = feature_dim(dataset, tier, clips);
  if (model.input_dim != dim) {
    throw std::invalid_argument("score_dataset: model input dim does not match featurization");
  }

  ScoreMatrix out;
  out.ids.reserve(dataset.samples.size());
  Mat x(static_cast<int>(dataset.samples.size()), dim);
  for (std::size_t r = 0; r < dataset.samples.size(); ++r) {
    out.ids.push_back(dataset.samples[r].id);
    std::vector<double> f =
        featurize(dataset.samples[r], tier, clips, sampling, RunMode::kEval, nullptr);
    std::copy(f.begin(), f.end(), x.row(static_cast<int>(r)));
  }
  Mat logits = forward(model, x, RunMode::kEval, nullptr, nullptr);
  out.scores = predict_probs(logits);
  return out;
}

double replay_epoch_mean_loss(const Checkpoint& pre_epoch, const DataView& view,
                              const TrainConfig& config, const DistillTarget* knowledge,
                              int epoch) {
  if (!pre_epoch.optimizer) {
    throw std::invalid_argument("replay: checkpoint must carry optimizer state");
  }
  TrainConfig cfg = config;
  if (knowledge != nullptr) cfg.loss = LossKind::kTotal;
  TrainContext ctx = make_context(view, cfg, knowledge);
  MlpModel model = pre_epoch.model;
  AdamWState opt = *pre_epoch.optimizer;
  return run_epoch(ctx, model, opt, epoch);
}

}  // namespace tinyaction
