#pragma once

#include <map>
#include <string>
#include <vector>

#include "tinyaction/config.hpp"

namespace tinyaction {

/// The benchmark every experiment defaults to: 10 classes, geometric tail
/// ratio 0.65 from 200 head samples, dual-resolution tiers with an SR blend
/// recovering 80% of the true detail.
DatasetSpec default_dataset_spec();

/// Training settings tuned for the default benchmark; stage configs for the
/// pipeline are derived from this base unless the manifest overrides them.
TrainConfig default_train_config();

struct StageConfigs {
  TrainConfig baseline;  // LR, first-K frames, no balancing
  TrainConfig uniform;   // LR, uniform clip sampling
  TrainConfig balance;   // LR, uniform sampling + flip balancing
  TrainConfig teacher;   // SR, uniform sampling + flip balancing
  TrainConfig student;   // LR, distilled against the teacher
};
StageConfigs derive_stage_configs(const ExperimentManifest& manifest);

/// Per-replicate headline numbers (sample-averaged F1 on the test split).
struct ReplicateMetrics {
  int replicate = 0;
  std::uint64_t dataset_seed = 0;
  double f1_baseline = 0.0;
  double f1_uniform = 0.0;
  double f1_balance = 0.0;
  double f1_sr_teacher = 0.0;
  double f1_kd_student = 0.0;
  double f1_single_calibrated = 0.0;   // best member after threshold calibration
  double f1_ensemble_postproc = 0.0;   // fused scores + calibration + group suppression
  double threshold_corr = 0.0;         // corr(class count, ensemble threshold)
  std::map<std::string, double> singles_calibrated;  // per ensemble member
};

struct PipelineResult {
  std::vector<ReplicateMetrics> replicates;
};

/// Runs the full experiment: generate data, train the ablation trio, train
/// the SR teacher, distill the LR student, fuse and post-process. Every
/// intermediate artifact is persisted under out_dir/seed_<i>/. Replicates
/// run independently (optionally in parallel); output is byte-stable.
PipelineResult run_pipeline(const ExperimentManifest& manifest, const std::string& out_dir,
                            bool parallel = false, int max_threads = 0);

/// Canonical (sorted-key) JSON report with per-replicate metrics and
/// mean/std aggregates.
std::string pipeline_report_json(const ExperimentManifest& manifest, const PipelineResult& result);

double mean_of(const std::vector<double>& xs);
double stddev_of(const std::vector<double>& xs);

}  // namespace tinyaction
