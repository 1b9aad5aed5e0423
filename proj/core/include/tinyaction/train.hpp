#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tinyaction/checkpoint.hpp"
#include "tinyaction/data.hpp"
#include "tinyaction/fusion.hpp"
#include "tinyaction/losses.hpp"
#include "tinyaction/mlp.hpp"
#include "tinyaction/optim.hpp"

namespace tinyaction {

enum class LossKind { kBce, kAsl, kTotal };
enum class SamplingMode { kUniform, kFirstK };

const char* loss_name(LossKind kind);
LossKind loss_from_name(const std::string& name);
const char* sampling_name(SamplingMode mode);
SamplingMode sampling_from_name(const std::string& name);

struct TrainConfig {
  int epochs = 12;
  int batch_size = 32;
  LossKind loss = LossKind::kBce;
  double alpha = 0.5;  // total-loss blend: alpha*bce + (1-alpha)*kd
  AslParams asl;
  LrSchedule schedule;
  AdamWParams adamw;
  double dropout_rate = 0.5;
  double drop_path_rate = 0.4;
  int clips = 4;  // K frames sampled per video
  SamplingMode sampling = SamplingMode::kUniform;
  Tier tier = Tier::LR;
  int hidden_width = 32;
  int num_blocks = 2;
  bool balance = false;        // applied by the CLI/pipeline before training
  double tail_quantile = 0.5;
  std::uint64_t seed = 1;
  int checkpoint_every = 1;    // epochs between checkpoints (final always kept)
};

void validate_train_config(const TrainConfig& config);

/// Train/val/test splits seen at one resolution tier.
struct DataView {
  const Dataset* train = nullptr;
  const Dataset* val = nullptr;
  const Dataset* test = nullptr;
  Tier tier = Tier::LR;
};

struct TrainReport {
  std::vector<double> train_loss;  // one per epoch, sample-weighted batch mean
  std::vector<double> val_f1;      // sample-averaged F1 at threshold 0.5
  std::vector<std::string> checkpoint_paths;
  ScoreMatrix val_scores;   // final model, eval featurization
  ScoreMatrix test_scores;
};

/// Flattens K clip-sampled frames of the sample's tier into one feature
/// vector of length K*h*w. Uniform sampling draws one frame per clip in
/// train mode and takes clip midpoints in eval mode; first-K ignores the
/// clip structure and always reads the leading frames.
std::vector<double> featurize(const LabeledSample& sample, Tier tier, int clips,
                              SamplingMode sampling, RunMode mode, Rng* rng);

int feature_dim(const Dataset& dataset, Tier tier, int clips);

/// Teacher probabilities for every sample of `dataset` at `tier`, in sample
/// order, produced with deterministic eval featurization.
struct DistillTarget {
  std::vector<std::int64_t> sample_ids;
  Mat knowledge;  // N x C in (0,1)
};
DistillTarget extract_knowledge(const MlpModel& teacher, const Dataset& dataset, Tier tier,
                                int clips);

/// Mini-batch training with AdamW and the warmup/cosine schedule.
/// Deterministic given config.seed; epoch order, featurization and dropout
/// streams are derived from (seed, epoch, sample id), so storage order of
/// the samples never affects the result. Writes epoch_<n>.ckpt under
/// out_dir when it is nonempty.
std::pair<MlpModel, TrainReport> train_model(const DataView& view, const TrainConfig& config,
                                             const std::string& out_dir = "");

/// Same loop with total_loss(logits, labels, knowledge, alpha); knowledge
/// rows are joined to batch samples by id.
std::pair<MlpModel, TrainReport> distill_student(const DataView& view,
                                                 const DistillTarget& knowledge,
                                                 const TrainConfig& config,
                                                 const std::string& out_dir = "");

/// Eval-mode probabilities for a whole dataset, in sample order.
ScoreMatrix score_dataset(const MlpModel& model, const Dataset& dataset, Tier tier, int clips,
                          SamplingMode sampling);

/// Audit mode: replays epoch `epoch` (1-based) from its pre-epoch
/// checkpoint and returns the recomputed mean training loss. Matches the
/// reported value bit-for-bit when the checkpoint and config are the ones
/// the run used.
double replay_epoch_mean_loss(const Checkpoint& pre_epoch, const DataView& view,
                              const TrainConfig& config, const DistillTarget* knowledge,
                              int epoch);

}  // namespace tinyaction
