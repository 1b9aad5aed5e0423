// Microbenchmarks for the hot paths: forward/backward, losses, the
// optimizer step, fusion and dataset generation.

#include <benchmark/benchmark.h>

#include "tinyaction/data.hpp"
#include "tinyaction/fusion.hpp"
#include "tinyaction/losses.hpp"
#include "tinyaction/mlp.hpp"
#include "tinyaction/optim.hpp"
#include "tinyaction/pipeline.hpp"
#include "tinyaction/rng.hpp"

namespace {

using namespace tinyaction;

Mat random_mat(Rng& rng, int rows, int cols, double lo = -1.0, double hi = 1.0) {
  Mat m(rows, cols);
  for (auto& x : m.v) x = rng.uniform(lo, hi);
  return m;
}

void BM_ForwardEval(benchmark::State& state) {
  Rng rng(1);
  int batch = static_cast<int>(state.range(0));
  MlpModel model = init_model(576, 40, 2, 10, 0.0, 0.0, 7);
  Mat x = random_mat(rng, batch, 576);
  for (auto _ : state) {
    Mat logits = forward(model, x, RunMode::kEval, nullptr, nullptr);
    benchmark::DoNotOptimize(logits.v.data());
  }
}
BENCHMARK(BM_ForwardEval)->Arg(32)->Arg(128);

void BM_ForwardBackward(benchmark::State& state) {
  Rng rng(2);
  int batch = static_cast<int>(state.range(0));
  MlpModel model = init_model(576, 40, 2, 10, 0.1, 0.1, 7);
  Mat x = random_mat(rng, batch, 576);
  Mat g = random_mat(rng, batch, 10);
  Rng noise(3);
  for (auto _ : state) {
    ForwardCache cache;
    Mat logits = forward(model, x, RunMode::kTrain, &noise, &cache);
    MlpParams grads = backward(model, cache, g);
    benchmark::DoNotOptimize(grads.head.w.v.data());
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(32);

void BM_BceLoss(benchmark::State& state) {
  Rng rng(4);
  Mat logits = random_mat(rng, 64, 10, -3.0, 3.0);
  Mat labels(64, 10);
  for (auto& y : labels.v) y = rng.uniform01() < 0.3 ? 1.0 : 0.0;
  for (auto _ : state) {
    LossValue loss = bce_loss(logits, labels);
    benchmark::DoNotOptimize(loss.value);
  }
}
BENCHMARK(BM_BceLoss);

void BM_AslLoss(benchmark::State& state) {
  Rng rng(5);
  Mat logits = random_mat(rng, 64, 10, -3.0, 3.0);
  Mat labels(64, 10);
  for (auto& y : labels.v) y = rng.uniform01() < 0.3 ? 1.0 : 0.0;
  AslParams params;
  for (auto _ : state) {
    LossValue loss = asl_loss(logits, labels, params);
    benchmark::DoNotOptimize(loss.value);
  }
}
BENCHMARK(BM_AslLoss);

void BM_AdamwStep(benchmark::State& state) {
  MlpModel model = init_model(576, 40, 2, 10, 0.0, 0.0, 7);
  MlpModel grads_model = init_model(576, 40, 2, 10, 0.0, 0.0, 8);
  auto params = param_views(model.params);
  auto grads = param_views(static_cast<const MlpParams&>(grads_model.params));
  AdamWState opt = init_adamw(params, AdamWParams{});
  for (auto _ : state) {
    adamw_step(params, grads, opt, 1e-3);
    benchmark::DoNotOptimize(opt.step);
  }
}
BENCHMARK(BM_AdamwStep);

void BM_EnsembleScores(benchmark::State& state) {
  Rng rng(6);
  std::vector<ScoreMatrix> members;
  for (int m = 0; m < 5; ++m) {
    ScoreMatrix s;
    s.scores = random_mat(rng, 200, 10, 0.0, 1.0);
    for (int i = 0; i < 200; ++i) s.ids.push_back(i);
    members.push_back(std::move(s));
  }
  for (auto _ : state) {
    ScoreMatrix fused = ensemble_scores(members);
    benchmark::DoNotOptimize(fused.scores.v.data());
  }
}
BENCHMARK(BM_EnsembleScores);

void BM_F1Scores(benchmark::State& state) {
  Rng rng(7);
  Mat preds(500, 10), labels(500, 10);
  for (auto& x : preds.v) x = rng.uniform01() < 0.3 ? 1.0 : 0.0;
  for (auto& y : labels.v) y = rng.uniform01() < 0.3 ? 1.0 : 0.0;
  for (auto _ : state) {
    F1Result f1 = f1_scores(preds, labels);
    benchmark::DoNotOptimize(f1.sample_f1);
  }
}
BENCHMARK(BM_F1Scores);

void BM_GenerateDataset(benchmark::State& state) {
  DatasetSpec spec = default_dataset_spec();
  spec.head_class_count = 40;
  for (auto _ : state) {
    SplitDatasets splits = generate_dataset(spec);
    benchmark::DoNotOptimize(splits.train.samples.size());
  }
}
BENCHMARK(BM_GenerateDataset);

void BM_CalibrateThresholds(benchmark::State& state) {
  Rng rng(8);
  ScoreMatrix scores, labels;
  scores.scores = random_mat(rng, 200, 10, 0.0, 1.0);
  labels.scores = Mat(200, 10);
  for (auto& y : labels.scores.v) y = rng.uniform01() < 0.3 ? 1.0 : 0.0;
  for (int i = 0; i < 200; ++i) {
    scores.ids.push_back(i);
    labels.ids.push_back(i);
  }
  std::vector<std::int64_t> counts(10, 20);
  std::vector<double> grid = default_threshold_grid();
  for (auto _ : state) {
    auto thresholds = calibrate_thresholds(scores, labels, counts, grid);
    benchmark::DoNotOptimize(thresholds.data());
  }
}
BENCHMARK(BM_CalibrateThresholds);

}  // namespace

BENCHMARK_MAIN();
