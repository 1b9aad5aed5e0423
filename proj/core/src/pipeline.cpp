#include "tinyaction/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "tinyaction/dataset_io.hpp"
#include "tinyaction/io_util.hpp"
#include "tinyaction/log.hpp"
#include "tinyaction/train.hpp"

namespace tinyaction {

namespace {

// Stage tags folded into per-replicate seeds. All five training stages of
// one replicate share a single training seed (common random numbers): the
// arms then differ only by their intervention, which pairs the per-seed
// comparisons and sharply reduces the variance of the reported gaps.
enum StageTag : std::uint64_t {
  kDataStage = 1,
  kTrainStage = 2,
};

struct Member {
  std::string name;
  ScoreMatrix val_scores;
  ScoreMatrix test_scores;
};

double f1_at_half(const ScoreMatrix& test_scores, const ScoreMatrix& test_labels) {
  FusionConfig cfg;
  cfg.thresholds.assign(static_cast<std::size_t>(test_scores.num_classes()), 0.5);
  Mat preds = apply_thresholds(test_scores, cfg);
  return f1_scores(preds, test_labels.scores).sample_f1;
}

ReplicateMetrics run_replicate(const ExperimentManifest& manifest, const StageConfigs& stages,
                               const DatasetSpec& base_spec, int replicate,
                               const std::string& seed_dir) {
  ensure_directory(seed_dir);

  DatasetSpec spec = base_spec;
  spec.seed = derive_seed(manifest.seed, kReplicateStream, static_cast<std::uint64_t>(replicate),
                          kDataStage);
  write_file_atomic(seed_dir + "/dataset_spec.cfg", dataset_spec_to_kv(spec));

  SplitDatasets splits = generate_dataset(spec);
  Dataset balanced = balance_dataset(splits.train, stages.balance.tail_quantile);

  std::uint64_t train_seed =
      derive_seed(manifest.seed, kReplicateStream, static_cast<std::uint64_t>(replicate), kTrainStage);

  auto run_stage = [&](TrainConfig cfg, const Dataset& train_set, const std::string& name) {
    cfg.seed = train_seed;
    DataView view{&train_set, &splits.val, &splits.test, cfg.tier};
    std::string dir = seed_dir + "/" + name;
    ensure_directory(dir);
    log_debug("replicate " + std::to_string(replicate) + ": training " + name);
    return train_model(view, cfg, dir);
  };

  auto [baseline_model, baseline_rep] = run_stage(stages.baseline, splits.train, "baseline");
  auto [uniform_model, uniform_rep] = run_stage(stages.uniform, splits.train, "uniform");
  auto [balance_model, balance_rep] = run_stage(stages.balance, balanced, "balance");
  auto [teacher_model, teacher_rep] = run_stage(stages.teacher, balanced, "teacher");

  DistillTarget knowledge =
      extract_knowledge(teacher_model, balanced, Tier::SR, stages.teacher.clips);

  TrainConfig student_cfg = stages.student;
  student_cfg.seed = train_seed;
  DataView student_view{&balanced, &splits.val, &splits.test, student_cfg.tier};
  std::string student_dir = seed_dir + "/student";
  ensure_directory(student_dir);
  auto [student_model, student_rep] =
      distill_student(student_view, knowledge, student_cfg, student_dir);

  ScoreMatrix val_labels = labels_matrix(splits.val);
  ScoreMatrix test_labels = labels_matrix(splits.test);
  write_score_csv(seed_dir + "/labels_val.csv", val_labels);
  write_score_csv(seed_dir + "/labels_test.csv", test_labels);
  write_group_map(seed_dir + "/groups.csv", splits.train.group_map);

  ReplicateMetrics metrics;
  metrics.replicate = replicate;
  metrics.dataset_seed = spec.seed;
  metrics.f1_baseline = f1_at_half(baseline_rep.test_scores, test_labels);
  metrics.f1_uniform = f1_at_half(uniform_rep.test_scores, test_labels);
  metrics.f1_balance = f1_at_half(balance_rep.test_scores, test_labels);
  metrics.f1_sr_teacher = f1_at_half(teacher_rep.test_scores, test_labels);
  metrics.f1_kd_student = f1_at_half(student_rep.test_scores, test_labels);

  // Ensemble members: the LR models plus the trailing student checkpoints
  // (mid-epoch models carry useful diversity). The SR teacher stays out of
  // the fused prediction: the deployment input is the low-resolution tier,
  // and its scores are reported separately.
  std::vector<Member> members;
  members.push_back({"uniform", uniform_rep.val_scores, uniform_rep.test_scores});
  members.push_back({"balance", balance_rep.val_scores, balance_rep.test_scores});
  members.push_back({"student", student_rep.val_scores, student_rep.test_scores});
  for (int back = 1; back < manifest.ensemble_last_checkpoints; ++back) {
    int epoch = student_cfg.epochs - back;
    if (epoch < 1) break;
    std::string path = student_dir + "/epoch_" + std::to_string(epoch) + ".ckpt";
    Checkpoint ckpt = load_checkpoint(path);
    Member m;
    m.name = "student_epoch_" + std::to_string(epoch);
    m.val_scores =
        score_dataset(ckpt.model, splits.val, student_cfg.tier, student_cfg.clips, student_cfg.sampling);
    m.test_scores = score_dataset(ckpt.model, splits.test, student_cfg.tier, student_cfg.clips,
                                  student_cfg.sampling);
    members.push_back(std::move(m));
  }

  write_score_csv(seed_dir + "/scores_val_baseline.csv", baseline_rep.val_scores);
  write_score_csv(seed_dir + "/scores_test_baseline.csv", baseline_rep.test_scores);
  write_score_csv(seed_dir + "/scores_val_uniform.csv", uniform_rep.val_scores);
  write_score_csv(seed_dir + "/scores_test_uniform.csv", uniform_rep.test_scores);
  write_score_csv(seed_dir + "/scores_val_teacher.csv", teacher_rep.val_scores);
  write_score_csv(seed_dir + "/scores_test_teacher.csv", teacher_rep.test_scores);
  for (const auto& m : members) {
    write_score_csv(seed_dir + "/scores_val_" + m.name + ".csv", m.val_scores);
    write_score_csv(seed_dir + "/scores_test_" + m.name + ".csv", m.test_scores);
  }

  const std::vector<std::int64_t>& counts =
      manifest.counts_pre_balance ? splits.train.class_counts : balanced.class_counts;
  std::vector<double> grid = default_threshold_grid();

  // Each member alone, calibrated: the single-model reference points.
  double best_single = 0.0;
  for (const auto& m : members) {
    std::vector<double> thr = calibrate_thresholds(m.val_scores, val_labels, counts, grid);
    write_thresholds(seed_dir + "/thresholds_single_" + m.name + ".csv", thr);
    FusionConfig cfg;
    cfg.thresholds = thr;
    cfg.fallback_argmax = true;
    Mat preds = apply_thresholds(m.test_scores, cfg);
    double f1 = f1_scores(preds, test_labels.scores).sample_f1;
    metrics.singles_calibrated[m.name] = f1;
    best_single = std::max(best_single, f1);
  }
  metrics.f1_single_calibrated = best_single;

  // Fused scores, calibrated thresholds, argmax fallback, group suppression.
  std::vector<ScoreMatrix> val_list, test_list;
  for (const auto& m : members) {
    val_list.push_back(m.val_scores);
    test_list.push_back(m.test_scores);
  }
  ScoreMatrix ens_val = ensemble_scores(val_list);
  ScoreMatrix ens_test = ensemble_scores(test_list);
  write_score_csv(seed_dir + "/scores_val_ensemble.csv", ens_val);
  write_score_csv(seed_dir + "/scores_test_ensemble.csv", ens_test);

  std::vector<double> ens_thr = calibrate_thresholds(ens_val, val_labels, counts, grid);
  write_thresholds(seed_dir + "/thresholds_ensemble.csv", ens_thr);
  FusionConfig ens_cfg;
  ens_cfg.thresholds = ens_thr;
  ens_cfg.group_map = splits.train.group_map;
  ens_cfg.fallback_argmax = true;
  Mat ens_preds = apply_thresholds(ens_test, ens_cfg);
  ens_preds = group_suppress(ens_test, ens_preds, ens_cfg.group_map);
  metrics.f1_ensemble_postproc = f1_scores(ens_preds, test_labels.scores).sample_f1;
  metrics.threshold_corr = threshold_count_correlation(counts, ens_thr);

  return metrics;
}

}  // namespace

DatasetSpec default_dataset_spec() {
  DatasetSpec spec;
  spec.num_classes = 10;
  spec.head_class_count = 200;
  spec.tail_ratio = 0.65;
  spec.secondary_label_prob = 0.4;
  spec.frames = 16;
  spec.height = 12;
  spec.width = 12;
  spec.downsample = 3;
  spec.noise_hr = 0.5;
  spec.noise_lr = 0.4;
  spec.noise_sr = 0.2;
  spec.sr_recovery = 0.8;
  spec.train_fraction = 0.6;
  spec.val_fraction = 0.2;
  spec.test_fraction = 0.2;
  spec.num_groups = 5;
  spec.seed = 1;
  return spec;
}

TrainConfig default_train_config() {
  TrainConfig cfg;
  cfg.epochs = 16;
  cfg.batch_size = 32;
  cfg.loss = LossKind::kBce;
  cfg.alpha = 0.5;
  cfg.schedule.base_lr = 3e-3;
  cfg.schedule.warmup_steps = 10;
  cfg.schedule.cycle_steps = 60;
  cfg.schedule.cycle_mult = 2;
  cfg.schedule.eta_min = 0.0;
  cfg.dropout_rate = 0.1;
  cfg.drop_path_rate = 0.1;
  cfg.clips = 4;
  cfg.sampling = SamplingMode::kUniform;
  cfg.tier = Tier::LR;
  cfg.hidden_width = 40;
  cfg.num_blocks = 2;
  cfg.tail_quantile = 0.5;
  cfg.checkpoint_every = 1;
  return cfg;
}

StageConfigs derive_stage_configs(const ExperimentManifest& manifest) {
  TrainConfig base = manifest.train_config_path.empty()
                         ? default_train_config()
                         : load_train_config(manifest.train_config_path);
  StageConfigs stages;
  stages.baseline = base;
  stages.baseline.sampling = SamplingMode::kFirstK;
  stages.baseline.balance = false;
  stages.baseline.tier = Tier::LR;

  stages.uniform = base;
  stages.uniform.sampling = SamplingMode::kUniform;
  stages.uniform.balance = false;
  stages.uniform.tier = Tier::LR;

  stages.balance = base;
  stages.balance.sampling = SamplingMode::kUniform;
  stages.balance.balance = true;
  stages.balance.tier = Tier::LR;

  if (manifest.teacher_config_path.empty()) {
    stages.teacher = stages.balance;
    stages.teacher.tier = Tier::SR;
  } else {
    stages.teacher = load_train_config(manifest.teacher_config_path);
  }

  if (manifest.student_config_path.empty()) {
    stages.student = stages.balance;
    stages.student.loss = LossKind::kTotal;
  } else {
    stages.student = load_train_config(manifest.student_config_path);
  }
  return stages;
}

PipelineResult run_pipeline(const ExperimentManifest& manifest, const std::string& out_dir,
                            bool parallel, int max_threads) {
  validate_manifest(manifest);
  if (out_dir.empty()) throw std::invalid_argument("run_pipeline: output directory required");
  ensure_directory(out_dir);

  DatasetSpec base_spec = manifest.dataset_spec_path.empty()
                              ? default_dataset_spec()
                              : load_dataset_spec(manifest.dataset_spec_path);
  StageConfigs stages = derive_stage_configs(manifest);

  PipelineResult result;
  result.replicates.resize(static_cast<std::size_t>(manifest.replicates));

  auto run_one = [&](int i) {
    std::string seed_dir = out_dir + "/seed_" + std::to_string(i);
    try {
      result.replicates[static_cast<std::size_t>(i)] =
          run_replicate(manifest, stages, base_spec, i, seed_dir);
    } catch (const std::exception& e) {
      throw std::runtime_error("pipeline replicate " + std::to_string(i) + ": " + e.what());
    }
  };

  if (!parallel || manifest.replicates == 1) {
    for (int i = 0; i < manifest.replicates; ++i) run_one(i);
  } else {
    int workers = max_threads > 0 ? max_threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, manifest.replicates));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (int i = w; i < manifest.replicates; i += workers) run_one(i);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }
  return result;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mu = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

std::string pipeline_report_json(const ExperimentManifest& manifest,
                                 const PipelineResult& result) {
  using json = nlohmann::json;

  json report;
  report["manifest"] = {
      {"dataset_spec", manifest.dataset_spec_path.empty() ? "builtin" : manifest.dataset_spec_path},
      {"train_config", manifest.train_config_path.empty() ? "builtin" : manifest.train_config_path},
      {"teacher_config",
       manifest.teacher_config_path.empty() ? "derived" : manifest.teacher_config_path},
      {"student_config",
       manifest.student_config_path.empty() ? "derived" : manifest.student_config_path},
      {"replicates", manifest.replicates},
      {"seed", manifest.seed},
      {"ensemble_last_checkpoints", manifest.ensemble_last_checkpoints},
      {"calibration_counts", manifest.counts_pre_balance ? "pre_balance" : "post_balance"},
  };

  auto collect = [&](auto getter) {
    std::vector<double> xs;
    for (const auto& r : result.replicates) xs.push_back(getter(r));
    return xs;
  };
  auto agg = [&](auto getter) {
    std::vector<double> xs = collect(getter);
    return json{{"mean", mean_of(xs)}, {"std", stddev_of(xs)}};
  };

  json aggregate;
  aggregate["f1_baseline"] = agg([](const ReplicateMetrics& r) { return r.f1_baseline; });
  aggregate["f1_uniform"] = agg([](const ReplicateMetrics& r) { return r.f1_uniform; });
  aggregate["f1_balance"] = agg([](const ReplicateMetrics& r) { return r.f1_balance; });
  aggregate["f1_sr_teacher"] = agg([](const ReplicateMetrics& r) { return r.f1_sr_teacher; });
  aggregate["f1_kd_student"] = agg([](const ReplicateMetrics& r) { return r.f1_kd_student; });
  aggregate["f1_single_calibrated"] =
      agg([](const ReplicateMetrics& r) { return r.f1_single_calibrated; });
  aggregate["f1_ensemble_postproc"] =
      agg([](const ReplicateMetrics& r) { return r.f1_ensemble_postproc; });
  aggregate["threshold_count_correlation"] =
      agg([](const ReplicateMetrics& r) { return r.threshold_corr; });

  // Per-member calibrated means, plus the best member across seeds.
  if (!result.replicates.empty()) {
    json singles;
    std::string best_member;
    double best_mean = -1.0;
    for (const auto& [name, unused] : result.replicates.front().singles_calibrated) {
      (void)unused;
      std::vector<double> xs;
      for (const auto& r : result.replicates) xs.push_back(r.singles_calibrated.at(name));
      double mu = mean_of(xs);
      singles[name] = {{"mean", mu}, {"std", stddev_of(xs)}};
      if (mu > best_mean) {
        best_mean = mu;
        best_member = name;
      }
    }
    aggregate["singles_calibrated"] = singles;
    aggregate["best_single_calibrated"] = {{"member", best_member}, {"mean", best_mean}};
  }
  report["aggregate"] = aggregate;

  json reps = json::array();
  for (const auto& r : result.replicates) {
    json singles;
    for (const auto& [name, f1] : r.singles_calibrated) singles[name] = f1;
    reps.push_back({
        {"replicate", r.replicate},
        {"dataset_seed", r.dataset_seed},
        {"f1_baseline", r.f1_baseline},
        {"f1_uniform", r.f1_uniform},
        {"f1_balance", r.f1_balance},
        {"f1_sr_teacher", r.f1_sr_teacher},
        {"f1_kd_student", r.f1_kd_student},
        {"f1_single_calibrated", r.f1_single_calibrated},
        {"f1_ensemble_postproc", r.f1_ensemble_postproc},
        {"threshold_count_correlation", r.threshold_corr},
        {"singles_calibrated", singles},
    });
  }
  report["replicates"] = reps;

  return report.dump(2) + "\n";
}

}  // namespace tinyaction
