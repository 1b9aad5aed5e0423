// tinyaction CLI: synthetic benchmark generation, training, distillation,
// score fusion and evaluation. See README.md for the file formats.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tinyaction/config.hpp"
#include "tinyaction/dataset_io.hpp"
#include "tinyaction/io_util.hpp"
#include "tinyaction/log.hpp"
#include "tinyaction/pipeline.hpp"
#include "tinyaction/train.hpp"

namespace {

using namespace tinyaction;
using json = nlohmann::json;

void print_counts(const char* name, const Dataset& d) {
  std::printf("%s: %zu samples\n", name, d.samples.size());
  std::printf("  class counts:");
  for (auto c : recompute_class_counts(d)) std::printf(" %lld", static_cast<long long>(c));
  std::printf("\n");
}

int cmd_gen_data(const std::string& spec_path, const std::string& out_dir, bool show_counts,
                 int threads) {
  DatasetSpec spec = load_dataset_spec(spec_path);
  SplitDatasets splits = generate_dataset(spec, threads);
  save_splits(splits, spec, out_dir);
  log_info("wrote dataset splits to " + out_dir);
  if (show_counts) {
    print_counts("train", splits.train);
    print_counts("val", splits.val);
    print_counts("test", splits.test);
  }
  return 0;
}

json report_to_json(const TrainReport& report) {
  json out;
  out["train_loss"] = report.train_loss;
  out["val_f1"] = report.val_f1;
  out["checkpoints"] = report.checkpoint_paths;
  return out;
}

void write_train_outputs(const TrainReport& report, const std::string& out_dir) {
  write_file_atomic(out_dir + "/report.json", report_to_json(report).dump(2) + "\n");
  write_score_csv(out_dir + "/scores_test.csv", report.test_scores);
  write_score_csv(out_dir + "/scores_val.csv", report.val_scores);
}

int cmd_train(const std::string& data_dir, const std::string& tier_flag,
              const std::string& config_path, const std::string& out_dir) {
  TrainConfig config = config_path.empty() ? TrainConfig{} : load_train_config(config_path);
  if (!tier_flag.empty()) config.tier = tier_from_name(tier_flag);

  SplitDatasets splits = load_splits(data_dir);
  Dataset train_set = config.balance ? balance_dataset(splits.train, config.tail_quantile)
                                     : std::move(splits.train);
  DataView view{&train_set, &splits.val, &splits.test, config.tier};

  ensure_directory(out_dir);
  auto [model, report] = train_model(view, config, out_dir);
  write_train_outputs(report, out_dir);
  log_info("training done, artifacts in " + out_dir);
  return 0;
}

int cmd_distill(const std::string& data_dir, const std::string& teacher_path,
                const std::string& tier_flag, const std::string& config_path,
                const std::string& out_dir) {
  TrainConfig config = config_path.empty() ? TrainConfig{} : load_train_config(config_path);
  if (!tier_flag.empty()) config.tier = tier_from_name(tier_flag);

  Checkpoint teacher = load_checkpoint(teacher_path);
  SplitDatasets splits = load_splits(data_dir);
  Dataset train_set = config.balance ? balance_dataset(splits.train, config.tail_quantile)
                                     : std::move(splits.train);

  // The teacher always reads the super-resolution tier of the same samples
  // the student will train on.
  DistillTarget knowledge = extract_knowledge(teacher.model, train_set, Tier::SR, config.clips);

  DataView view{&train_set, &splits.val, &splits.test, config.tier};
  ensure_directory(out_dir);
  auto [model, report] = distill_student(view, knowledge, config, out_dir);
  write_train_outputs(report, out_dir);
  log_info("distillation done, artifacts in " + out_dir);
  return 0;
}

std::vector<double> parse_weight_list(const std::string& raw) {
  std::vector<double> weights;
  if (raw.empty()) return weights;
  for (const auto& field : split(raw, ',')) weights.push_back(std::stod(field));
  return weights;
}

std::vector<double> parse_grid(const std::string& raw) {
  if (raw.empty()) return default_threshold_grid();
  auto fields = split(raw, ':');
  if (fields.size() != 3) throw std::invalid_argument("--grid expects lo:hi:step");
  double lo = std::stod(fields[0]), hi = std::stod(fields[1]), step = std::stod(fields[2]);
  if (step <= 0.0 || lo > hi) throw std::invalid_argument("--grid expects lo <= hi and step > 0");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    double v = lo + step * i;
    if (v > hi + 1e-12) break;
    grid.push_back(v);
  }
  return grid;
}

json f1_to_json(const F1Result& f1) {
  return json{{"sample_f1", f1.sample_f1}, {"micro_f1", f1.micro_f1}, {"macro_f1", f1.macro_f1}};
}

void emit_json(const json& out, const std::string& out_path) {
  std::string text = out.dump(2) + "\n";
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    write_file_atomic(out_path, text);
  }
}

int cmd_eval(const std::string& scores_path, const std::string& labels_path,
             const std::string& thresholds_path, const std::string& groups_path,
             bool fallback_argmax, const std::string& out_path) {
  ScoreMatrix scores = read_score_csv(scores_path);
  validate_scores(scores, "eval");
  ScoreMatrix labels = read_score_csv(labels_path);

  FusionConfig cfg;
  cfg.thresholds = thresholds_path.empty()
                       ? std::vector<double>(static_cast<std::size_t>(scores.num_classes()), 0.5)
                       : read_thresholds(thresholds_path);
  cfg.fallback_argmax = fallback_argmax;

  // Align label rows to score rows by id.
  Mat y(scores.num_samples(), scores.num_classes());
  for (int r = 0; r < scores.num_samples(); ++r) {
    bool found = false;
    for (std::size_t lr = 0; lr < labels.ids.size(); ++lr) {
      if (labels.ids[lr] == scores.ids[static_cast<std::size_t>(r)]) {
        for (int c = 0; c < scores.num_classes(); ++c) {
          y.at(r, c) = labels.scores.at(static_cast<int>(lr), c);
        }
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::runtime_error("eval: no label row for sample id " +
                               std::to_string(scores.ids[static_cast<std::size_t>(r)]));
    }
  }

  Mat preds = apply_thresholds(scores, cfg);
  if (!groups_path.empty()) {
    preds = group_suppress(scores, preds, read_group_map(groups_path));
  }
  emit_json(f1_to_json(f1_scores(preds, y)), out_path);
  return 0;
}

int cmd_fuse(const std::vector<std::string>& score_paths, const std::string& weights_raw,
             const std::vector<std::string>& val_score_paths, const std::string& val_labels_path,
             const std::string& groups_path, const std::string& labels_path,
             const std::string& grid_raw, bool fallback_argmax, const std::string& out_path,
             const std::string& out_scores, const std::string& out_preds,
             const std::string& out_thresholds) {
  std::vector<double> weights = parse_weight_list(weights_raw);
  std::vector<double> grid = parse_grid(grid_raw);

  auto read_all = [](const std::vector<std::string>& paths) {
    std::vector<ScoreMatrix> all;
    for (const auto& p : paths) {
      all.push_back(read_score_csv(p));
      validate_scores(all.back(), "fuse");
    }
    return all;
  };

  ScoreMatrix fused = ensemble_scores(read_all(score_paths), weights);
  // Per-model weights apply to the validation ensemble only when one val
  // file per model was given; a single file is treated as already fused.
  std::vector<double> val_weights =
      val_score_paths.size() == score_paths.size() ? weights : std::vector<double>{};
  ScoreMatrix fused_val = ensemble_scores(read_all(val_score_paths), val_weights);
  ScoreMatrix val_labels = read_score_csv(val_labels_path);

  // Class counts for the frequency-prior diagnostic come from the
  // validation labels.
  std::vector<std::int64_t> counts(static_cast<std::size_t>(val_labels.num_classes()), 0);
  for (int r = 0; r < val_labels.num_samples(); ++r) {
    for (int c = 0; c < val_labels.num_classes(); ++c) {
      if (val_labels.scores.at(r, c) != 0.0) counts[static_cast<std::size_t>(c)] += 1;
    }
  }

  FusionConfig cfg;
  cfg.thresholds = calibrate_thresholds(fused_val, val_labels, counts, grid);
  cfg.fallback_argmax = fallback_argmax;
  if (!groups_path.empty()) cfg.group_map = read_group_map(groups_path);

  Mat preds = apply_thresholds(fused, cfg);
  if (!cfg.group_map.empty()) preds = group_suppress(fused, preds, cfg.group_map);

  json out;
  out["thresholds"] = cfg.thresholds;
  out["threshold_count_correlation"] = threshold_count_correlation(counts, cfg.thresholds);
  out["num_models"] = score_paths.size();

  if (!labels_path.empty()) {
    ScoreMatrix labels = read_score_csv(labels_path);
    Mat y(fused.num_samples(), fused.num_classes());
    for (int r = 0; r < fused.num_samples(); ++r) {
      bool found = false;
      for (std::size_t lr = 0; lr < labels.ids.size(); ++lr) {
        if (labels.ids[lr] == fused.ids[static_cast<std::size_t>(r)]) {
          for (int c = 0; c < fused.num_classes(); ++c) {
            y.at(r, c) = labels.scores.at(static_cast<int>(lr), c);
          }
          found = true;
          break;
        }
      }
      if (!found) {
        throw std::runtime_error("fuse: no label row for sample id " +
                                 std::to_string(fused.ids[static_cast<std::size_t>(r)]));
      }
    }
    out["metrics"] = f1_to_json(f1_scores(preds, y));
  }

  if (!out_scores.empty()) write_score_csv(out_scores, fused);
  if (!out_thresholds.empty()) write_thresholds(out_thresholds, cfg.thresholds);
  if (!out_preds.empty()) {
    ScoreMatrix pred_matrix;
    pred_matrix.ids = fused.ids;
    pred_matrix.scores = preds;
    write_score_csv(out_preds, pred_matrix);
  }
  emit_json(out, out_path);
  return 0;
}

int cmd_pipeline(const std::string& manifest_path, const std::string& out_dir, bool parallel,
                 int threads) {
  ExperimentManifest manifest =
      manifest_path.empty() ? ExperimentManifest{} : load_manifest(manifest_path);
  PipelineResult result = run_pipeline(manifest, out_dir, parallel, threads);
  write_file_atomic(out_dir + "/report.json", pipeline_report_json(manifest, result));
  log_info("pipeline report written to " + out_dir + "/report.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tinyaction: low-resolution action recognition pipeline on a synthetic benchmark"};
  app.require_subcommand(1);

  // gen-data
  std::string spec_path, gen_out;
  bool show_counts = false;
  int gen_threads = 1;
  auto* gen = app.add_subcommand("gen-data", "Generate the synthetic benchmark");
  gen->add_option("--spec", spec_path, "Dataset spec file (key = value)")->required();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_flag("--print-counts", show_counts, "Print the per-split class count table");
  gen->add_option("--threads", gen_threads, "Generation threads (default 1)");

  // train
  std::string train_data, train_tier, train_config, train_out;
  auto* train = app.add_subcommand("train", "Train a model on one resolution tier");
  train->add_option("--data", train_data, "Dataset directory from gen-data")->required();
  train->add_option("--tier", train_tier, "lr|sr|hr (overrides the config)");
  train->add_option("--config", train_config, "Training config file");
  train->add_option("--out", train_out, "Output directory")->required();

  // distill
  std::string dist_data, dist_teacher, dist_tier, dist_config, dist_out;
  auto* dist = app.add_subcommand("distill", "Train a student against a teacher checkpoint");
  dist->add_option("--data", dist_data, "Dataset directory from gen-data")->required();
  dist->add_option("--teacher", dist_teacher, "Teacher checkpoint")->required();
  dist->add_option("--tier", dist_tier, "Student tier, lr|sr|hr (overrides the config)");
  dist->add_option("--config", dist_config, "Training config file");
  dist->add_option("--out", dist_out, "Output directory")->required();

  // fuse
  std::vector<std::string> fuse_scores, fuse_val_scores;
  std::string fuse_weights, fuse_val_labels, fuse_groups, fuse_labels, fuse_grid, fuse_out;
  std::string fuse_out_scores, fuse_out_preds, fuse_out_thresholds;
  bool fuse_fallback = false;
  auto* fuse = app.add_subcommand("fuse", "Ensemble score files, calibrate and post-process");
  fuse->add_option("--scores", fuse_scores, "Test score CSVs to fuse")->required();
  fuse->add_option("--weights", fuse_weights, "Comma-separated model weights");
  fuse->add_option("--val-scores", fuse_val_scores, "Validation score CSVs (same models)")
      ->required();
  fuse->add_option("--val-labels", fuse_val_labels, "Validation label CSV")->required();
  fuse->add_option("--groups", fuse_groups, "Group map file (class_index,group_id)");
  fuse->add_option("--labels", fuse_labels, "Test label CSV; enables metrics output");
  fuse->add_option("--grid", fuse_grid, "Threshold grid lo:hi:step (default 0.05:0.95:0.05)");
  fuse->add_flag("--fallback-argmax", fuse_fallback, "Keep the argmax class on empty rows");
  fuse->add_option("--out", fuse_out, "Metrics JSON path (stdout when omitted)");
  fuse->add_option("--out-scores", fuse_out_scores, "Write fused scores CSV");
  fuse->add_option("--out-preds", fuse_out_preds, "Write binary predictions CSV");
  fuse->add_option("--out-thresholds", fuse_out_thresholds, "Write calibrated thresholds");

  // eval
  std::string eval_scores, eval_labels, eval_thresholds, eval_groups, eval_out;
  bool eval_fallback = false;
  auto* eval = app.add_subcommand("eval", "Score a prediction CSV against labels");
  eval->add_option("--scores", eval_scores, "Score CSV")->required();
  eval->add_option("--labels", eval_labels, "Label CSV")->required();
  eval->add_option("--thresholds", eval_thresholds, "Threshold file (default 0.5 everywhere)");
  eval->add_option("--groups", eval_groups, "Group map file for suppression");
  eval->add_flag("--fallback-argmax", eval_fallback, "Keep the argmax class on empty rows");
  eval->add_option("--out", eval_out, "Metrics JSON path (stdout when omitted)");

  // pipeline
  std::string pipe_manifest, pipe_out;
  bool pipe_parallel = false;
  int pipe_threads = 0;
  auto* pipe = app.add_subcommand("pipeline", "Run the full multi-seed experiment");
  pipe->add_option("--manifest", pipe_manifest, "Experiment manifest (built-in defaults when omitted)");
  pipe->add_option("--out", pipe_out, "Output directory")->required();
  pipe->add_flag("--parallel", pipe_parallel, "Run replicates concurrently");
  pipe->add_option("--threads", pipe_threads, "Worker count for --parallel (default: hardware)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_data(spec_path, gen_out, show_counts, gen_threads);
    if (train->parsed()) return cmd_train(train_data, train_tier, train_config, train_out);
    if (dist->parsed()) return cmd_distill(dist_data, dist_teacher, dist_tier, dist_config, dist_out);
    if (fuse->parsed()) {
      return cmd_fuse(fuse_scores, fuse_weights, fuse_val_scores, fuse_val_labels, fuse_groups,
                      fuse_labels, fuse_grid, fuse_fallback, fuse_out, fuse_out_scores,
                      fuse_out_preds, fuse_out_thresholds);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_scores, eval_labels, eval_thresholds, eval_groups, eval_fallback,
                      eval_out);
    }
    if (pipe->parsed()) return cmd_pipeline(pipe_manifest, pipe_out, pipe_parallel, pipe_threads);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
