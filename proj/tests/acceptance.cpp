// Acceptance suite: runs every gate the project commits to and prints one
// PASS/FAIL line per criterion. Exit code 0 only when all criteria hold.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tinyaction/dataset_io.hpp"
#include "tinyaction/io_util.hpp"
#include "tinyaction/losses.hpp"
#include "tinyaction/mathutil.hpp"
#include "tinyaction/mlp.hpp"
#include "tinyaction/optim.hpp"
#include "tinyaction/pipeline.hpp"
#include "tinyaction/train.hpp"

using namespace tinyaction;

namespace {

struct Criterion {
  int number;
  std::string name;
  std::function<bool(std::string&)> check;
};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

std::string scratch_dir(const std::string& leaf) {
  auto path = std::filesystem::temp_directory_path() / "tinyaction_acceptance" / leaf;
  std::filesystem::remove_all(path);
  std::filesystem::create_directories(path);
  return path.string();
}

double rel_error(double a, double b, double floor_value) {
  double denom = std::max({floor_value, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) / denom;
}

// ---------------------------------------------------------------------------
// Criterion 1: analytic gradients vs central finite differences.

double net_fd_worst(std::uint64_t seed_base) {
  Rng rng(seed_base);
  double worst = 0.0;
  for (int config = 0; config < 5; ++config) {
    int d = 2 + static_cast<int>(rng.uniform_int(0, 6));
    int h = 2 + static_cast<int>(rng.uniform_int(0, 6));
    int c = 1 + static_cast<int>(rng.uniform_int(0, 7));
    int blocks = static_cast<int>(rng.uniform_int(0, 2));
    int n = 1 + static_cast<int>(rng.uniform_int(0, 3));
    double dropout = config % 2 == 1 ? 0.25 : 0.0;
    double drop_path = config % 3 == 0 ? 0.2 : 0.0;

    MlpModel model = init_model(d, h, blocks, c, dropout, drop_path, 9000 + config);
    Mat batch(n, d);
    for (auto& x : batch.v) x = rng.normal();
    Mat weight(n, c);
    for (auto& x : weight.v) x = rng.uniform(-1.0, 1.0);
    std::uint64_t mask_seed = 31 + config;

    auto scalar = [&]() {
      Rng mask(mask_seed);
      Mat logits = forward(model, batch, RunMode::kTrain, &mask, nullptr);
      double sum = 0.0;
      for (std::size_t i = 0; i < logits.v.size(); ++i) sum += logits.v[i] * weight.v[i];
      return sum;
    };

    ForwardCache cache;
    Rng mask(mask_seed);
    forward(model, batch, RunMode::kTrain, &mask, &cache);
    MlpParams analytic = backward(model, cache, weight);

    auto views = param_views(model.params);
    auto grad_views = param_views(static_cast<const MlpParams&>(analytic));
    const double step = 1e-5;
    for (std::size_t t = 0; t < views.size(); ++t) {
      for (std::size_t i = 0; i < views[t].size; ++i) {
        double keep = views[t].data[i];
        views[t].data[i] = keep + step;
        double hi = scalar();
        views[t].data[i] = keep - step;
        double lo = scalar();
        views[t].data[i] = keep;
        worst = std::max(worst, rel_error((hi - lo) / (2 * step), grad_views[t].data[i], 1e-6));
      }
    }
  }
  return worst;
}

double losses_fd_worst(std::uint64_t seed_base) {
  Rng rng(seed_base);
  double worst = 0.0;
  const double step = 1e-6;

  auto fd_check = [&](Mat& input, const std::function<double()>& value, const Mat& grad) {
    for (std::size_t i = 0; i < input.v.size(); ++i) {
      double keep = input.v[i];
      input.v[i] = keep + step;
      double hi = value();
      input.v[i] = keep - step;
      double lo = value();
      input.v[i] = keep;
      worst = std::max(worst, rel_error((hi - lo) / (2 * step), grad.v[i], 1e-8));
    }
  };

  for (int config = 0; config < 6; ++config) {
    int n = 1 + static_cast<int>(rng.uniform_int(0, 5));
    int c = 1 + static_cast<int>(rng.uniform_int(0, 5));
    Mat labels(n, c), knowledge(n, c);
    for (auto& y : labels.v) y = rng.uniform01() < 0.5 ? 1.0 : 0.0;
    for (auto& k : knowledge.v) k = rng.uniform(0.05, 0.95);

    Mat logits(n, c);
    for (auto& x : logits.v) x = rng.uniform(-3.0, 3.0);
    fd_check(logits, [&]() { return bce_loss(logits, labels).value; },
             bce_loss(logits, labels).grad);

    Mat probs(n, c);
    for (auto& p : probs.v) p = rng.uniform(0.05, 0.95);
    fd_check(probs, [&]() { return kd_loss(probs, knowledge).value; },
             kd_loss(probs, knowledge).grad);

    double alpha = rng.uniform01();
    fd_check(logits, [&]() { return total_loss(logits, labels, knowledge, alpha).value; },
             total_loss(logits, labels, knowledge, alpha).grad);

    AslParams asl{rng.uniform(0.0, 3.0), rng.uniform(0.0, 4.0), rng.uniform(0.0, 0.3)};
    Mat asl_logits(n, c);
    for (auto& x : asl_logits.v) {
      do {
        x = rng.uniform(-3.0, 3.0);
      } while (std::fabs(sigmoid(x) - asl.margin) < 1e-3);
    }
    fd_check(asl_logits, [&]() { return asl_loss(asl_logits, labels, asl).value; },
             asl_loss(asl_logits, labels, asl).grad);
  }
  return worst;
}

bool criterion_gradients(std::string& detail) {
  double start = now_seconds();
  double net_worst = net_fd_worst(123);
  double loss_worst = losses_fd_worst(456);
  double elapsed = now_seconds() - start;
  std::ostringstream out;
  out << "net max rel err " << net_worst << " (<1e-4), losses " << loss_worst
      << " (<1e-5), " << elapsed << " s (<10)";
  detail = out.str();
  return net_worst < 1e-4 && loss_worst < 1e-5 && elapsed < 10.0;
}

// ---------------------------------------------------------------------------
// Criterion 2: reduction identities.

bool criterion_reductions(std::string& detail) {
  Rng rng(777);
  double asl_gap = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + static_cast<int>(rng.uniform_int(0, 4));
    int c = 1 + static_cast<int>(rng.uniform_int(0, 4));
    Mat logits(n, c), labels(n, c);
    for (auto& x : logits.v) x = rng.uniform(-6.0, 6.0);
    for (auto& y : labels.v) y = rng.uniform01() < 0.5 ? 1.0 : 0.0;
    double asl = asl_loss(logits, labels, AslParams{0.0, 0.0, 0.0}).value;
    double bce = bce_loss(logits, labels).value;
    asl_gap = std::max(asl_gap, std::fabs(asl - bce));
  }

  bool total_bitexact = true;
  for (int trial = 0; trial < 20; ++trial) {
    int n = 1 + static_cast<int>(rng.uniform_int(0, 4));
    int c = 1 + static_cast<int>(rng.uniform_int(0, 4));
    Mat logits(n, c), labels(n, c), knowledge(n, c);
    for (auto& x : logits.v) x = rng.uniform(-4.0, 4.0);
    for (auto& y : labels.v) y = rng.uniform01() < 0.5 ? 1.0 : 0.0;
    for (auto& k : knowledge.v) k = rng.uniform01();
    LossValue total = total_loss(logits, labels, knowledge, 1.0);
    LossValue bce = bce_loss(logits, labels);
    if (total.value != bce.value) total_bitexact = false;
    for (std::size_t i = 0; i < total.grad.v.size(); ++i) {
      if (total.grad.v[i] != bce.grad.v[i]) total_bitexact = false;
    }
  }

  bool kd_zero = true;
  for (int trial = 0; trial < 20; ++trial) {
    Mat p(2, 3);
    for (auto& x : p.v) x = rng.uniform01();
    if (kd_loss(p, p).value != 0.0) kd_zero = false;
  }

  std::ostringstream out;
  out << "asl-vs-bce max gap " << asl_gap << " (<1e-12), total(alpha=1) bit-exact "
      << (total_bitexact ? "yes" : "no") << ", kd(p,p)=0 " << (kd_zero ? "yes" : "no");
  detail = out.str();
  return asl_gap < 1e-12 && total_bitexact && kd_zero;
}

// ---------------------------------------------------------------------------
// Criterion 3: scheduler closed form.

bool criterion_schedule(std::string& detail) {
  Rng rng(31415);
  double worst = 0.0;
  bool restarts_exact = true;
  for (int trial = 0; trial < 20; ++trial) {
    LrSchedule s;
    s.base_lr = rng.uniform(1e-5, 1e-2);
    s.warmup_steps = static_cast<int>(rng.uniform_int(0, 25));
    s.cycle_steps = static_cast<int>(rng.uniform_int(1, 60));
    s.cycle_mult = static_cast<int>(rng.uniform_int(1, 3));
    s.eta_min = rng.uniform01() < 0.5 ? 0.0 : 0.05 * s.base_lr;

    // Closed-form oracle with explicit cycle-start accumulation.
    auto oracle = [&](std::int64_t step) {
      if (step < s.warmup_steps) return s.base_lr * (step + 1) / s.warmup_steps;
      std::int64_t pos = step - s.warmup_steps;
      std::int64_t start = 0, len = s.cycle_steps;
      while (pos >= start + len) {
        start += len;
        len *= s.cycle_mult;
      }
      std::int64_t t_cur = pos - start;
      if (t_cur == 0) return s.base_lr;
      constexpr double kPi = 3.141592653589793238462643383279502884;
      return s.eta_min +
             0.5 * (s.base_lr - s.eta_min) *
                 (1.0 + std::cos(kPi * static_cast<double>(t_cur) / static_cast<double>(len)));
    };

    for (int i = 0; i < 50; ++i) {
      std::int64_t step = rng.uniform_int(0, 100000);
      worst = std::max(worst, rel_error(lr_at(step, s), oracle(step), 1e-12));
    }
    // Cycle restarts return base_lr exactly.
    std::int64_t start = s.warmup_steps, len = s.cycle_steps;
    for (int cycle = 0; cycle < 4; ++cycle) {
      if (lr_at(start, s) != s.base_lr) restarts_exact = false;
      start += len;
      len *= s.cycle_mult;
    }
  }
  std::ostringstream out;
  out << "max rel err " << worst << " (<1e-12 tolerance band), restarts exact "
      << (restarts_exact ? "yes" : "no");
  detail = out.str();
  return worst < 1e-12 && restarts_exact;
}

// ---------------------------------------------------------------------------
// Criterion 4: f1_scores vs brute-force set oracle (exact equality).

bool criterion_f1_oracle(std::string& detail) {
  Rng rng(161803);
  int exact = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    int n = 1 + static_cast<int>(rng.uniform_int(0, 5));
    int c = 1 + static_cast<int>(rng.uniform_int(0, 5));
    Mat preds(n, c), labels(n, c);
    for (auto& x : preds.v) x = rng.uniform01() < 0.4 ? 1.0 : 0.0;
    for (auto& y : labels.v) y = rng.uniform01() < 0.4 ? 1.0 : 0.0;

    // Set-based oracle.
    double sample = 0.0;
    std::int64_t ti = 0, tp = 0, tl = 0;
    std::vector<double> per_class(static_cast<std::size_t>(c), 0.0);
    for (int r = 0; r < n; ++r) {
      std::set<int> p, y;
      for (int cc = 0; cc < c; ++cc) {
        if (preds.at(r, cc) != 0.0) p.insert(cc);
        if (labels.at(r, cc) != 0.0) y.insert(cc);
      }
      std::int64_t inter = 0;
      for (int cc : p) inter += y.count(cc);
      ti += inter;
      tp += static_cast<std::int64_t>(p.size());
      tl += static_cast<std::int64_t>(y.size());
      sample += (p.empty() && y.empty()) ? 1.0
                                         : 2.0 * static_cast<double>(inter) /
                                               static_cast<double>(p.size() + y.size());
    }
    sample /= n;
    double micro = (tp + tl) == 0 ? 1.0 : 2.0 * static_cast<double>(ti) / static_cast<double>(tp + tl);
    double macro = 0.0;
    for (int cc = 0; cc < c; ++cc) {
      std::int64_t ctp = 0, cfp = 0, cfn = 0;
      for (int r = 0; r < n; ++r) {
        bool p = preds.at(r, cc) != 0.0;
        bool y = labels.at(r, cc) != 0.0;
        if (p && y) ++ctp;
        else if (p) ++cfp;
        else if (y) ++cfn;
      }
      macro += (2 * ctp + cfp + cfn) == 0
                   ? 0.0
                   : 2.0 * static_cast<double>(ctp) / static_cast<double>(2 * ctp + cfp + cfn);
    }
    macro /= c;

    F1Result got = f1_scores(preds, labels);
    if (got.sample_f1 == sample && got.micro_f1 == micro && got.macro_f1 == macro) ++exact;
  }
  std::ostringstream out;
  out << exact << "/" << trials << " instances exactly equal";
  detail = out.str();
  return exact == trials;
}

// ---------------------------------------------------------------------------
// Criterion 5: exhaustive sampling bounds.

bool criterion_sampling(std::string& detail) {
  Rng rng(271828);
  bool in_range = true, in_clip = true;
  for (int t = 1; t <= 64 && (in_range && in_clip); ++t) {
    for (int k = 1; k <= 64; ++k) {
      for (int draw = 0; draw < 1000; ++draw) {
        std::vector<int> idx = uniform_sample_indices(t, k, rng);
        for (int c = 0; c < k; ++c) {
          if (idx[c] < 0 || idx[c] >= t) in_range = false;
          std::int64_t lo = static_cast<std::int64_t>(c) * t / k;
          std::int64_t hi = static_cast<std::int64_t>(c + 1) * t / k;
          if (hi > lo && (idx[c] < lo || idx[c] >= hi)) in_clip = false;
        }
        if (!(in_range && in_clip)) break;
      }
      if (!(in_range && in_clip)) break;
    }
  }
  std::vector<int> identity = uniform_sample_indices(16, 16, rng);
  bool id_ok = true;
  for (int c = 0; c < 16; ++c) id_ok = id_ok && identity[c] == c;

  std::ostringstream out;
  out << "all T,K <= 64 x 1000 draws in range/in clip: " << ((in_range && in_clip) ? "yes" : "no")
      << ", T=16,K=16 identity: " << (id_ok ? "yes" : "no");
  detail = out.str();
  return in_range && in_clip && id_ok;
}

// ---------------------------------------------------------------------------
// Criteria 6-8: the trend experiment on the default benchmark.

struct TrendData {
  PipelineResult result;
  double elapsed = 0.0;
  bool ran = false;
};

TrendData& trend_data() {
  static TrendData data;
  if (!data.ran) {
    double start = now_seconds();
    ExperimentManifest manifest;  // built-in defaults: 10 replicates, seed 9000
    data.result = run_pipeline(manifest, scratch_dir("trend"), /*parallel=*/true, /*threads=*/2);
    data.elapsed = now_seconds() - start;
    data.ran = true;
  }
  return data;
}

double mean_field(const PipelineResult& result, double ReplicateMetrics::*field) {
  std::vector<double> xs;
  for (const auto& r : result.replicates) xs.push_back(r.*field);
  return mean_of(xs);
}

bool criterion_table1(std::string& detail) {
  TrendData& data = trend_data();
  double base = mean_field(data.result, &ReplicateMetrics::f1_baseline);
  double uni = mean_field(data.result, &ReplicateMetrics::f1_uniform);
  double bal = mean_field(data.result, &ReplicateMetrics::f1_balance);
  std::ostringstream out;
  out << "baseline " << base << " <= uniform " << uni << " <= balance " << bal
      << ", improvement " << bal - base << " (>0), runtime " << data.elapsed << " s (<300)";
  detail = out.str();
  return base <= uni && uni <= bal && bal - base > 0.0 && data.elapsed < 300.0;
}

bool criterion_table2(std::string& detail) {
  TrendData& data = trend_data();
  double base = mean_field(data.result, &ReplicateMetrics::f1_baseline);
  double teacher = mean_field(data.result, &ReplicateMetrics::f1_sr_teacher);
  double student = mean_field(data.result, &ReplicateMetrics::f1_kd_student);
  std::ostringstream out;
  out << "teacher " << teacher << " > baseline " << base << ", student(alpha=0.5) " << student
      << " > baseline " << base;
  detail = out.str();
  return teacher > base && student > base;
}

bool criterion_table3(std::string& detail) {
  TrendData& data = trend_data();
  // Best single calibrated model: the member with the highest mean.
  std::map<std::string, std::vector<double>> singles;
  for (const auto& r : data.result.replicates) {
    for (const auto& [name, f1] : r.singles_calibrated) singles[name].push_back(f1);
  }
  double best_single = 0.0;
  std::string best_name;
  for (const auto& [name, values] : singles) {
    double m = mean_of(values);
    if (m > best_single) {
      best_single = m;
      best_name = name;
    }
  }
  double ensemble = mean_field(data.result, &ReplicateMetrics::f1_ensemble_postproc);
  double student_half = mean_field(data.result, &ReplicateMetrics::f1_kd_student);
  std::ostringstream out;
  out << "ensemble+postproc " << ensemble << " >= best single calibrated (" << best_name << ") "
      << best_single << " - 0.005, and > 0.5-threshold single " << student_half;
  detail = out.str();
  return ensemble >= best_single - 0.005 && ensemble > student_half;
}

// ---------------------------------------------------------------------------
// Criterion 9: byte-identical pipeline reruns.

bool criterion_determinism(std::string& detail) {
  ExperimentManifest manifest;
  manifest.replicates = 2;
  std::string dir_a = scratch_dir("det_a");
  std::string dir_b = scratch_dir("det_b");
  PipelineResult ra = run_pipeline(manifest, dir_a, /*parallel=*/true, /*threads=*/2);
  PipelineResult rb = run_pipeline(manifest, dir_b, /*parallel=*/false);
  write_file_atomic(dir_a + "/report.json", pipeline_report_json(manifest, ra));
  write_file_atomic(dir_b + "/report.json", pipeline_report_json(manifest, rb));

  bool reports_equal = read_file(dir_a + "/report.json") == read_file(dir_b + "/report.json");

  int checkpoints = 0;
  bool files_equal = true;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir_a)) {
    if (!entry.is_regular_file()) continue;
    std::string rel = std::filesystem::relative(entry.path(), dir_a).string();
    std::string other = dir_b + "/" + rel;
    if (!std::filesystem::exists(other)) {
      files_equal = false;
      continue;
    }
    if (entry.path().extension() == ".ckpt") ++checkpoints;
    if (read_file(entry.path().string()) != read_file(other)) files_equal = false;
  }

  std::ostringstream out;
  out << "report.json byte-identical: " << (reports_equal ? "yes" : "no") << ", " << checkpoints
      << " checkpoints compared, all artifacts identical: " << (files_equal ? "yes" : "no");
  detail = out.str();
  return reports_equal && files_equal && checkpoints > 0;
}

// ---------------------------------------------------------------------------
// Criterion 10: distillation endpoint equivalence.

bool criterion_distill_endpoint(std::string& detail) {
  DatasetSpec spec = default_dataset_spec();
  spec.head_class_count = 30;
  spec.seed = 424243;
  SplitDatasets splits = generate_dataset(spec);

  TrainConfig cfg = default_train_config();
  cfg.epochs = 4;
  cfg.seed = 31337;
  DataView view{&splits.train, &splits.val, &splits.test, Tier::LR};

  std::string dir_a = scratch_dir("endpoint_bce");
  std::string dir_b = scratch_dir("endpoint_kd");
  auto [bce_model, bce_report] = train_model(view, cfg, dir_a);

  int dim = feature_dim(splits.train, Tier::SR, cfg.clips);
  MlpModel teacher = init_model(dim, cfg.hidden_width, cfg.num_blocks, spec.num_classes,
                                0.0, 0.0, 5);
  DistillTarget knowledge = extract_knowledge(teacher, splits.train, Tier::SR, cfg.clips);

  TrainConfig student_cfg = cfg;
  student_cfg.alpha = 1.0;
  auto [student, student_report] = distill_student(view, knowledge, student_cfg, dir_b);

  bool losses_equal = bce_report.train_loss == student_report.train_loss;
  bool params_equal = true;
  auto va = param_views(bce_model.params);
  auto vb = param_views(student.params);
  for (std::size_t t = 0; t < va.size(); ++t) {
    for (std::size_t i = 0; i < va[t].size; ++i) {
      if (va[t].data[i] != vb[t].data[i]) params_equal = false;
    }
  }
  bool files_equal = true;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::string name = "/epoch_" + std::to_string(epoch) + ".ckpt";
    if (read_file(dir_a + name) != read_file(dir_b + name)) files_equal = false;
  }

  std::ostringstream out;
  out << "per-epoch losses bit-equal: " << (losses_equal ? "yes" : "no")
      << ", final params bit-equal: " << (params_equal ? "yes" : "no")
      << ", checkpoints byte-identical: " << (files_equal ? "yes" : "no");
  detail = out.str();
  return losses_equal && params_equal && files_equal;
}

// ---------------------------------------------------------------------------
// Criterion 11: suppression and ensemble properties.

bool criterion_fusion_properties(std::string& detail) {
  Rng rng(5150);
  int holds = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    int n = 1 + static_cast<int>(rng.uniform_int(0, 4));
    int c = 1 + static_cast<int>(rng.uniform_int(0, 5));

    ScoreMatrix scores;
    scores.scores = Mat(n, c);
    for (auto& x : scores.scores.v) x = rng.uniform01();
    for (int i = 0; i < n; ++i) scores.ids.push_back(i);

    Mat preds(n, c);
    for (auto& x : preds.v) x = rng.uniform01() < 0.5 ? 1.0 : 0.0;
    std::vector<int> groups;
    int num_groups = 1 + static_cast<int>(rng.uniform_int(0, 2));
    for (int i = 0; i < c; ++i) {
      groups.push_back(static_cast<int>(rng.uniform_int(0, num_groups - 1)));
    }

    Mat once = group_suppress(scores, preds, groups);
    Mat twice = group_suppress(scores, once, groups);
    bool ok = true;
    for (std::size_t i = 0; i < once.v.size(); ++i) {
      if (once.v[i] != twice.v[i]) ok = false;       // idempotent
      if (once.v[i] > preds.v[i]) ok = false;        // subset of inputs
    }

    // Ensemble convexity per cell.
    int members = 2 + static_cast<int>(rng.uniform_int(0, 2));
    std::vector<ScoreMatrix> inputs;
    for (int m = 0; m < members; ++m) {
      ScoreMatrix s;
      s.ids = scores.ids;
      s.scores = Mat(n, c);
      for (auto& x : s.scores.v) x = rng.uniform01();
      inputs.push_back(std::move(s));
    }
    ScoreMatrix fused = ensemble_scores(inputs);
    for (int r = 0; r < n; ++r) {
      for (int cc = 0; cc < c; ++cc) {
        double lo = 1.0, hi = 0.0;
        for (const auto& m : inputs) {
          lo = std::min(lo, m.scores.at(r, cc));
          hi = std::max(hi, m.scores.at(r, cc));
        }
        if (fused.scores.at(r, cc) < lo - 1e-12 || fused.scores.at(r, cc) > hi + 1e-12) ok = false;
      }
    }
    if (ok) ++holds;
  }
  std::ostringstream out;
  out << holds << "/" << trials << " random instances satisfy all properties";
  detail = out.str();
  return holds == trials;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "gradient oracle (net + losses vs central finite differences)", criterion_gradients},
      {2, "reduction identities (asl->bce, total(alpha=1)==bce, kd(p,p)=0)", criterion_reductions},
      {3, "scheduler matches the warmup/cosine closed form", criterion_schedule},
      {4, "f1_scores equals the brute-force set oracle", criterion_f1_oracle},
      {5, "exhaustive clip-sampling bounds", criterion_sampling},
      {6, "data-pipeline trend: baseline <= uniform <= balance", criterion_table1},
      {7, "distillation trend: teacher and student beat the LR baseline", criterion_table2},
      {8, "fusion trend: ensemble+postproc vs calibrated singles", criterion_table3},
      {9, "pipeline reruns are byte-identical", criterion_determinism},
      {10, "distillation endpoint alpha=1 reproduces plain BCE bit-exactly",
       criterion_distill_endpoint},
      {11, "group-suppression and ensemble properties", criterion_fusion_properties},
  };

  int failures = 0;
  for (auto& criterion : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.check(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %2d: %s — %s\n", ok ? "PASS" : "FAIL", criterion.number,
                criterion.name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
