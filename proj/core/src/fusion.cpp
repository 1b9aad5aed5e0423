#include "tinyaction/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "tinyaction/io_util.hpp"

namespace tinyaction {

void validate_scores(const ScoreMatrix& scores, const char* what) {
  if (static_cast<int>(scores.ids.size()) != scores.scores.rows) {
    throw std::invalid_argument(std::string(what) + ": id/row count mismatch");
  }
  std::unordered_map<std::int64_t, int> seen;
  for (auto id : scores.ids) {
    if (!seen.emplace(id, 1).second) {
      throw std::invalid_argument(std::string(what) + ": duplicate sample id " + std::to_string(id));
    }
  }
  for (double s : scores.scores.v) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw std::invalid_argument(std::string(what) + ": scores must lie in [0,1]");
    }
  }
}

ScoreMatrix ensemble_scores(const std::vector<ScoreMatrix>& matrices,
                            const std::vector<double>& weights) {
  if (matrices.empty()) throw std::invalid_argument("ensemble_scores: need at least one matrix");
  if (!weights.empty() && weights.size() != matrices.size()) {
    throw std::invalid_argument("ensemble_scores: weight count must match matrix count");
  }
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("ensemble_scores: weights must be >= 0");
    wsum += w;
  }
  if (!weights.empty() && wsum <= 0.0) {
    throw std::invalid_argument("ensemble_scores: weights must sum to > 0");
  }

  const ScoreMatrix& first = matrices[0];
  int classes = first.num_classes();

  // Row order follows the first matrix; the rest are joined by id.
  std::vector<std::unordered_map<std::int64_t, int>> row_of(matrices.size());
  for (std::size_t m = 1; m < matrices.size(); ++m) {
    if (matrices[m].num_classes() != classes) {
      throw std::invalid_argument("ensemble_scores: class count mismatch");
    }
    if (matrices[m].ids.size() != first.ids.size()) {
      throw std::invalid_argument("ensemble_scores: id set mismatch");
    }
    for (std::size_t r = 0; r < matrices[m].ids.size(); ++r) {
      row_of[m][matrices[m].ids[r]] = static_cast<int>(r);
    }
  }

  ScoreMatrix out;
  out.ids = first.ids;
  out.scores = Mat(first.num_samples(), classes);
  for (int r = 0; r < first.num_samples(); ++r) {
    for (int c = 0; c < classes; ++c) {
      double acc = 0.0;
      for (std::size_t m = 0; m < matrices.size(); ++m) {
        int row = r;
        if (m > 0) {
          auto it = row_of[m].find(first.ids[static_cast<std::size_t>(r)]);
          if (it == row_of[m].end()) {
            throw std::invalid_argument("ensemble_scores: id set mismatch");
          }
          row = it->second;
        }
        double w = weights.empty() ? 1.0 : weights[m];
        acc += w * matrices[m].scores.at(row, c);
      }
      out.scores.at(r, c) = acc / (weights.empty() ? static_cast<double>(matrices.size()) : wsum);
    }
  }
  return out;
}

namespace {

double binary_f1(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  std::int64_t denom = 2 * tp + fp + fn;
  if (denom == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

}  // namespace

std::vector<double> calibrate_thresholds(const ScoreMatrix& val_scores,
                                         const ScoreMatrix& val_labels,
                                         const std::vector<std::int64_t>& class_counts,
                                         const std::vector<double>& grid) {
  validate_scores(val_scores, "calibrate_thresholds");
  if (val_scores.num_samples() == 0) {
    throw std::invalid_argument("calibrate_thresholds: empty validation set");
  }
  if (grid.empty()) throw std::invalid_argument("calibrate_thresholds: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) {
      throw std::invalid_argument("calibrate_thresholds: grid values must lie in [0,1]");
    }
    if (i > 0 && grid[i] <= grid[i - 1]) {
      throw std::invalid_argument("calibrate_thresholds: grid must be strictly ascending");
    }
  }
  if (val_labels.num_classes() != val_scores.num_classes() ||
      val_labels.num_samples() != val_scores.num_samples()) {
    throw std::invalid_argument("calibrate_thresholds: label shape mismatch");
  }
  if (!class_counts.empty() &&
      static_cast<int>(class_counts.size()) != val_scores.num_classes()) {
    throw std::invalid_argument("calibrate_thresholds: class_counts length mismatch");
  }

  // Join labels by id.
  std::unordered_map<std::int64_t, int> label_row;
  for (std::size_t r = 0; r < val_labels.ids.size(); ++r) {
    label_row[val_labels.ids[r]] = static_cast<int>(r);
  }

  int classes = val_scores.num_classes();
  int n = val_scores.num_samples();
  std::vector<double> thresholds(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) {
    double best_f1 = -1.0;
    double best_thr = grid[0];
    for (double thr : grid) {
      std::int64_t tp = 0, fp = 0, fn = 0;
      for (int r = 0; r < n; ++r) {
        auto it = label_row.find(val_scores.ids[static_cast<std::size_t>(r)]);
        if (it == label_row.end()) {
          throw std::invalid_argument("calibrate_thresholds: missing label for sample id " +
                                      std::to_string(val_scores.ids[static_cast<std::size_t>(r)]));
        }
        bool pred = val_scores.scores.at(r, c) >= thr;
        bool truth = val_labels.scores.at(it->second, c) != 0.0;
        if (pred && truth) ++tp;
        else if (pred) ++fp;
        else if (truth) ++fn;
      }
      double f1 = binary_f1(tp, fp, fn);
      if (f1 > best_f1) {  // strict: ties keep the lowest (earliest) value
        best_f1 = f1;
        best_thr = thr;
      }
    }
    thresholds[static_cast<std::size_t>(c)] = best_thr;
  }
  return thresholds;
}

Mat apply_thresholds(const ScoreMatrix& scores, const FusionConfig& config) {
  if (static_cast<int>(config.thresholds.size()) != scores.num_classes()) {
    throw std::invalid_argument("apply_thresholds: threshold count mismatch");
  }
  Mat preds(scores.num_samples(), scores.num_classes());
  for (int r = 0; r < scores.num_samples(); ++r) {
    bool any = false;
    for (int c = 0; c < scores.num_classes(); ++c) {
      bool on = scores.scores.at(r, c) >= config.thresholds[static_cast<std::size_t>(c)];
      preds.at(r, c) = on ? 1.0 : 0.0;
      any = any || on;
    }
    if (!any && config.fallback_argmax && scores.num_classes() > 0) {
      int best = 0;
      for (int c = 1; c < scores.num_classes(); ++c) {
        if (scores.scores.at(r, c) > scores.scores.at(r, best)) best = c;
      }
      preds.at(r, best) = 1.0;
    }
  }
  return preds;
}

Mat group_suppress(const ScoreMatrix& scores, const Mat& preds, const std::vector<int>& group_map) {
  if (static_cast<int>(group_map.size()) != preds.cols) {
    throw std::invalid_argument("group_suppress: every class needs a group");
  }
  require_same_shape(scores.scores, preds, "group_suppress");

  int num_groups = 0;
  for (int g : group_map) num_groups = std::max(num_groups, g + 1);

  Mat out = preds;
  std::vector<int> keeper(static_cast<std::size_t>(num_groups));
  for (int r = 0; r < preds.rows; ++r) {
    std::fill(keeper.begin(), keeper.end(), -1);
    // Highest score wins per group; ties keep the lowest class index.
    for (int c = 0; c < preds.cols; ++c) {
      if (preds.at(r, c) == 0.0) continue;
      int g = group_map[static_cast<std::size_t>(c)];
      if (g < 0) throw std::invalid_argument("group_suppress: negative group id");
      int& k = keeper[static_cast<std::size_t>(g)];
      if (k == -1 || scores.scores.at(r, c) > scores.scores.at(r, k)) k = c;
    }
    for (int c = 0; c < preds.cols; ++c) {
      if (preds.at(r, c) == 0.0) continue;
      if (keeper[static_cast<std::size_t>(group_map[static_cast<std::size_t>(c)])] != c) {
        out.at(r, c) = 0.0;
      }
    }
  }
  return out;
}

F1Result f1_scores(const Mat& preds, const Mat& labels) {
  require_same_shape(preds, labels, "f1_scores");

  F1Result out;
  std::int64_t global_tp = 0, global_fp = 0, global_fn = 0;
  double sample_sum = 0.0;
  for (int r = 0; r < preds.rows; ++r) {
    std::int64_t inter = 0, npred = 0, nlabel = 0;
    for (int c = 0; c < preds.cols; ++c) {
      bool p = preds.at(r, c) != 0.0;
      bool y = labels.at(r, c) != 0.0;
      if (p) ++npred;
      if (y) ++nlabel;
      if (p && y) ++inter;
    }
    global_tp += inter;
    global_fp += npred - inter;
    global_fn += nlabel - inter;
    if (npred + nlabel == 0) {
      sample_sum += 1.0;  // both sets empty: vacuously perfect
    } else {
      sample_sum += 2.0 * static_cast<double>(inter) / static_cast<double>(npred + nlabel);
    }
  }
  out.sample_f1 = preds.rows == 0 ? 0.0 : sample_sum / static_cast<double>(preds.rows);
  out.micro_f1 = (global_tp + global_fp + global_fn) == 0 ? 1.0
                                                          : binary_f1(global_tp, global_fp, global_fn);

  double macro_sum = 0.0;
  for (int c = 0; c < preds.cols; ++c) {
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (int r = 0; r < preds.rows; ++r) {
      bool p = preds.at(r, c) != 0.0;
      bool y = labels.at(r, c) != 0.0;
      if (p && y) ++tp;
      else if (p) ++fp;
      else if (y) ++fn;
    }
    macro_sum += binary_f1(tp, fp, fn);  // 0/0 -> 0 per class
  }
  out.macro_f1 = preds.cols == 0 ? 0.0 : macro_sum / static_cast<double>(preds.cols);
  return out;
}

double threshold_count_correlation(const std::vector<std::int64_t>& class_counts,
                                   const std::vector<double>& thresholds) {
  if (class_counts.size() != thresholds.size() || class_counts.size() < 2) return 0.0;
  double n = static_cast<double>(class_counts.size());
  double mean_c = 0.0, mean_t = 0.0;
  for (std::size_t i = 0; i < class_counts.size(); ++i) {
    mean_c += static_cast<double>(class_counts[i]);
    mean_t += thresholds[i];
  }
  mean_c /= n;
  mean_t /= n;
  double cov = 0.0, var_c = 0.0, var_t = 0.0;
  for (std::size_t i = 0; i < class_counts.size(); ++i) {
    double dc = static_cast<double>(class_counts[i]) - mean_c;
    double dt = thresholds[i] - mean_t;
    cov += dc * dt;
    var_c += dc * dc;
    var_t += dt * dt;
  }
  if (var_c <= 0.0 || var_t <= 0.0) return 0.0;
  return cov / std::sqrt(var_c * var_t);
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(static_cast<double>(i) * 0.05);
  return grid;
}

ScoreMatrix labels_matrix(const Dataset& dataset) {
  ScoreMatrix out;
  out.scores = Mat(static_cast<int>(dataset.samples.size()), dataset.num_classes);
  out.ids.reserve(dataset.samples.size());
  for (std::size_t r = 0; r < dataset.samples.size(); ++r) {
    out.ids.push_back(dataset.samples[r].id);
    for (int c = 0; c < dataset.num_classes; ++c) {
      out.scores.at(static_cast<int>(r), c) = dataset.samples[r].labels[static_cast<std::size_t>(c)] ? 1.0 : 0.0;
    }
  }
  return out;
}

void write_score_csv(const std::string& path, const ScoreMatrix& scores) {
  std::ostringstream out;
  out << "sample_id";
  for (int c = 0; c < scores.num_classes(); ++c) out << ",class_" << c;
  out << "\n";
  for (int r = 0; r < scores.num_samples(); ++r) {
    out << scores.ids[static_cast<std::size_t>(r)];
    for (int c = 0; c < scores.num_classes(); ++c) {
      out << "," << format_double(scores.scores.at(r, c));
    }
    out << "\n";
  }
  write_file_atomic(path, out.str());
}

ScoreMatrix read_score_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty score csv: " + path);
  auto header = split(line, ',');
  if (header.empty() || header[0] != "sample_id") {
    throw std::runtime_error(path + ": expected csv header sample_id,class_0,...,class_{C-1}");
  }
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c] != "class_" + std::to_string(c - 1)) {
      throw std::runtime_error(path + ": expected csv header sample_id,class_0,...,class_{C-1}");
    }
  }
  int classes = static_cast<int>(header.size()) - 1;

  std::vector<std::int64_t> ids;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (static_cast<int>(fields.size()) != classes + 1) {
      throw std::runtime_error(path + ": row has wrong field count");
    }
    ids.push_back(std::stoll(fields[0]));
    for (int c = 0; c < classes; ++c) values.push_back(std::stod(fields[static_cast<std::size_t>(c) + 1]));
  }

  ScoreMatrix out;
  out.ids = std::move(ids);
  out.scores = Mat(static_cast<int>(out.ids.size()), classes);
  out.scores.v = std::move(values);
  return out;
}

void write_group_map(const std::string& path, const std::vector<int>& group_map) {
  std::ostringstream out;
  for (std::size_t c = 0; c < group_map.size(); ++c) out << c << "," << group_map[c] << "\n";
  write_file_atomic(path, out.str());
}

std::vector<int> read_group_map(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<int> map;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != 2) throw std::runtime_error(path + ": expected class_index,group_id lines");
    auto idx = static_cast<std::size_t>(std::stoll(fields[0]));
    if (idx != map.size()) throw std::runtime_error(path + ": class indices must be 0..C-1 in order");
    map.push_back(std::stoi(fields[1]));
  }
  return map;
}

void write_thresholds(const std::string& path, const std::vector<double>& thresholds) {
  std::ostringstream out;
  for (std::size_t c = 0; c < thresholds.size(); ++c) {
    out << c << "," << format_double(thresholds[c]) << "\n";
  }
  write_file_atomic(path, out.str());
}

std::vector<double> read_thresholds(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<double> thresholds;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != 2) throw std::runtime_error(path + ": expected class_index,threshold lines");
    auto idx = static_cast<std::size_t>(std::stoll(fields[0]));
    if (idx != thresholds.size()) throw std::runtime_error(path + ": class indices must be 0..C-1 in order");
    thresholds.push_back(std::stod(fields[1]));
  }
  return thresholds;
}

}  // namespace tinyaction
