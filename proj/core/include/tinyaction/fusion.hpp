#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tinyaction/data.hpp"
#include "tinyaction/matrix.hpp"

namespace tinyaction {

/// Per-sample, per-class prediction probabilities, keyed by sample id.
struct ScoreMatrix {
  std::vector<std::int64_t> ids;
  Mat scores;  // N x C, entries in [0,1]

  int num_samples() const { return scores.rows; }
  int num_classes() const { return scores.cols; }
};

void validate_scores(const ScoreMatrix& scores, const char* what);

/// Thresholds plus the class->group map driving post-processing. When
/// fallback_argmax is set, a row with no positive prediction keeps its
/// single highest-scoring class.
struct FusionConfig {
  std::vector<double> thresholds;
  std::vector<int> group_map;
  bool fallback_argmax = false;
};

/// Weighted per-entry mean of several score matrices, rows aligned by id.
/// Uniform weights when the weight vector is empty.
ScoreMatrix ensemble_scores(const std::vector<ScoreMatrix>& matrices,
                            const std::vector<double>& weights = {});

/// Per-class grid search maximizing binary F1 on validation data; ties break
/// toward the lowest grid value. class_counts are diagnostic only (see
/// threshold_count_correlation) and never constrain the search.
std::vector<double> calibrate_thresholds(const ScoreMatrix& val_scores,
                                         const ScoreMatrix& val_labels,
                                         const std::vector<std::int64_t>& class_counts,
                                         const std::vector<double>& grid);

/// pred[n][c] = scores[n][c] >= thresholds[c], plus the optional argmax
/// fallback for empty rows.
Mat apply_thresholds(const ScoreMatrix& scores, const FusionConfig& config);

/// Within each group, keeps only the highest-scoring predicted class per
/// sample (ties -> lowest class index). Never creates a positive.
Mat group_suppress(const ScoreMatrix& scores, const Mat& preds, const std::vector<int>& group_map);

struct F1Result {
  double sample_f1 = 0.0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
};

/// sample_f1: per-sample set F1 (both-empty -> 1, one-empty -> 0), averaged.
/// micro_f1: from global TP/FP/FN (vacuous all-empty case -> 1).
/// macro_f1: unweighted mean of per-class F1 (per-class 0/0 -> 0).
F1Result f1_scores(const Mat& preds, const Mat& labels);

/// Pearson correlation between class counts and chosen thresholds; reports
/// how closely calibration tracks a frequency prior.
double threshold_count_correlation(const std::vector<std::int64_t>& class_counts,
                                   const std::vector<double>& thresholds);

std::vector<double> default_threshold_grid();  // 0.05 .. 0.95 step 0.05

/// Multi-hot labels of a dataset as a ScoreMatrix (0/1 entries).
ScoreMatrix labels_matrix(const Dataset& dataset);

// CSV schema: header `sample_id,class_0,...,class_{C-1}`, one row per
// sample, 17-significant-digit scores.
void write_score_csv(const std::string& path, const ScoreMatrix& scores);
ScoreMatrix read_score_csv(const std::string& path);

// Group map file: `class_index,group_id` lines. Threshold file:
// `class_index,threshold` lines.
void write_group_map(const std::string& path, const std::vector<int>& group_map);
std::vector<int> read_group_map(const std::string& path);
void write_thresholds(const std::string& path, const std::vector<double>& thresholds);
std::vector<double> read_thresholds(const std::string& path);

}  // namespace tinyaction
