#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "tinyaction/fusion.hpp"
#include "tinyaction/rng.hpp"

using namespace tinyaction;

namespace {

ScoreMatrix make_scores(std::vector<std::int64_t> ids, int classes,
                        std::initializer_list<double> values) {
  ScoreMatrix s;
  s.ids = std::move(ids);
  s.scores = Mat(static_cast<int>(s.ids.size()), classes);
  std::copy(values.begin(), values.end(), s.scores.v.begin());
  return s;
}

Mat binary_mat(int rows, int cols, std::initializer_list<double> values) {
  Mat m(rows, cols);
  std::copy(values.begin(), values.end(), m.v.begin());
  return m;
}

ScoreMatrix random_scores(Rng& rng, int n, int c) {
  ScoreMatrix s;
  s.scores = Mat(n, c);
  for (auto& x : s.scores.v) x = rng.uniform01();
  for (int i = 0; i < n; ++i) s.ids.push_back(i);
  return s;
}

// Brute-force set-based oracle mirroring the documented conventions.
struct OracleF1 {
  double sample, micro, macro;
};

OracleF1 f1_oracle(const Mat& preds, const Mat& labels) {
  OracleF1 out{0.0, 0.0, 0.0};
  std::int64_t inter_total = 0, pred_total = 0, label_total = 0;
  for (int r = 0; r < preds.rows; ++r) {
    std::set<int> p, y;
    for (int c = 0; c < preds.cols; ++c) {
      if (preds.at(r, c) != 0.0) p.insert(c);
      if (labels.at(r, c) != 0.0) y.insert(c);
    }
    std::set<int> inter;
    std::set_intersection(p.begin(), p.end(), y.begin(), y.end(),
                          std::inserter(inter, inter.begin()));
    inter_total += static_cast<std::int64_t>(inter.size());
    pred_total += static_cast<std::int64_t>(p.size());
    label_total += static_cast<std::int64_t>(y.size());
    if (p.empty() && y.empty()) {
      out.sample += 1.0;
    } else {
      out.sample += 2.0 * static_cast<double>(inter.size()) /
                    static_cast<double>(p.size() + y.size());
    }
  }
  out.sample /= preds.rows;
  out.micro = (pred_total + label_total) == 0
                  ? 1.0
                  : 2.0 * static_cast<double>(inter_total) /
                        static_cast<double>(pred_total + label_total);
  for (int c = 0; c < preds.cols; ++c) {
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (int r = 0; r < preds.rows; ++r) {
      bool p = preds.at(r, c) != 0.0;
      bool y = labels.at(r, c) != 0.0;
      if (p && y) ++tp;
      else if (p) ++fp;
      else if (y) ++fn;
    }
    out.macro += (2 * tp + fp + fn) == 0
                     ? 0.0
                     : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
  }
  out.macro /= preds.cols;
  return out;
}

}  // namespace

TEST_CASE("ensemble_scores identity, mean and weights") {
  ScoreMatrix a = make_scores({10, 11}, 2, {0.2, 0.4, 0.6, 0.8});
  ScoreMatrix single = ensemble_scores({a});
  CHECK(single.ids == a.ids);
  for (std::size_t i = 0; i < a.scores.v.size(); ++i) CHECK(single.scores.v[i] == a.scores.v[i]);

  ScoreMatrix b = make_scores({10, 11}, 2, {0.4, 0.6, 0.8, 1.0});
  ScoreMatrix mean = ensemble_scores({a, b});
  CHECK(mean.scores.at(0, 0) == doctest::Approx(0.3));
  CHECK(mean.scores.at(1, 1) == doctest::Approx(0.9));

  ScoreMatrix first_only = ensemble_scores({a, b}, {1.0, 0.0});
  for (std::size_t i = 0; i < a.scores.v.size(); ++i) {
    CHECK(first_only.scores.v[i] == doctest::Approx(a.scores.v[i]).epsilon(1e-15));
  }

  // Rows are aligned by id, not position.
  ScoreMatrix shuffled = make_scores({11, 10}, 2, {0.8, 1.0, 0.4, 0.6});
  ScoreMatrix aligned = ensemble_scores({a, shuffled});
  CHECK(aligned.scores.at(0, 0) == doctest::Approx(0.3));

  CHECK_THROWS_AS(ensemble_scores({}), std::invalid_argument);
  ScoreMatrix wrong_ids = make_scores({10, 99}, 2, {0.1, 0.1, 0.1, 0.1});
  CHECK_THROWS_AS(ensemble_scores({a, wrong_ids}), std::invalid_argument);
  ScoreMatrix wrong_c = make_scores({10, 11}, 1, {0.1, 0.1});
  CHECK_THROWS_AS(ensemble_scores({a, wrong_c}), std::invalid_argument);
  CHECK_THROWS_AS(ensemble_scores({a, b}, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("ensemble convexity bounds") {
  Rng rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + static_cast<int>(rng.uniform_int(0, 4));
    int c = 1 + static_cast<int>(rng.uniform_int(0, 4));
    std::vector<ScoreMatrix> members;
    int count = 2 + static_cast<int>(rng.uniform_int(0, 2));
    for (int m = 0; m < count; ++m) members.push_back(random_scores(rng, n, c));
    std::vector<double> weights;
    if (rng.uniform01() < 0.5) {
      for (int m = 0; m < count; ++m) weights.push_back(rng.uniform01() + 0.01);
    }
    ScoreMatrix fused = ensemble_scores(members, weights);
    for (int r = 0; r < n; ++r) {
      for (int cc = 0; cc < c; ++cc) {
        double lo = 1.0, hi = 0.0;
        for (const auto& m : members) {
          lo = std::min(lo, m.scores.at(r, cc));
          hi = std::max(hi, m.scores.at(r, cc));
        }
        CHECK(fused.scores.at(r, cc) >= lo - 1e-12);
        CHECK(fused.scores.at(r, cc) <= hi + 1e-12);
      }
    }
  }
}

TEST_CASE("calibrate_thresholds picks the lowest best grid value") {
  ScoreMatrix scores = make_scores({0, 1, 2, 3}, 1, {0.9, 0.8, 0.2, 0.1});
  ScoreMatrix labels = make_scores({0, 1, 2, 3}, 1, {1, 1, 0, 0});
  std::vector<double> grid = default_threshold_grid();
  std::vector<double> thr = calibrate_thresholds(scores, labels, {2}, grid);
  CHECK(thr[0] == doctest::Approx(0.25).epsilon(1e-9));

  // All-positive labels: any threshold below the minimum score is perfect,
  // the tie-break keeps the lowest grid value.
  ScoreMatrix all_pos_labels = make_scores({0, 1, 2, 3}, 1, {1, 1, 1, 1});
  thr = calibrate_thresholds(scores, all_pos_labels, {4}, grid);
  CHECK(thr[0] == doctest::Approx(grid.front()));

  // Singleton grid.
  thr = calibrate_thresholds(scores, labels, {2}, {0.5});
  CHECK(thr[0] == 0.5);

  // Row order of the validation data does not matter.
  ScoreMatrix perm_scores = make_scores({3, 0, 2, 1}, 1, {0.1, 0.9, 0.2, 0.8});
  ScoreMatrix perm_labels = make_scores({1, 3, 0, 2}, 1, {1, 0, 1, 0});
  std::vector<double> thr_perm = calibrate_thresholds(perm_scores, perm_labels, {2}, grid);
  CHECK(thr_perm[0] == doctest::Approx(0.25).epsilon(1e-9));

  ScoreMatrix empty;
  empty.scores = Mat(0, 1);
  CHECK_THROWS_AS(calibrate_thresholds(empty, labels, {2}, grid), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_thresholds(scores, labels, {2}, {}), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_thresholds(scores, labels, {2}, {0.5, 0.4}), std::invalid_argument);
}

TEST_CASE("apply_thresholds and the argmax fallback") {
  ScoreMatrix scores = make_scores({0}, 2, {0.4, 0.6});
  FusionConfig cfg;
  cfg.thresholds = {0.5, 0.5};
  Mat preds = apply_thresholds(scores, cfg);
  CHECK(preds.at(0, 0) == 0.0);
  CHECK(preds.at(0, 1) == 1.0);

  cfg.thresholds = {0.0, 0.0};
  preds = apply_thresholds(scores, cfg);
  CHECK(preds.at(0, 0) == 1.0);
  CHECK(preds.at(0, 1) == 1.0);

  ScoreMatrix low = make_scores({0}, 2, {0.3, 0.2});
  cfg.thresholds = {0.5, 0.5};
  cfg.fallback_argmax = true;
  preds = apply_thresholds(low, cfg);
  CHECK(preds.at(0, 0) == 1.0);
  CHECK(preds.at(0, 1) == 0.0);

  cfg.thresholds = {0.5};
  CHECK_THROWS_AS(apply_thresholds(low, cfg), std::invalid_argument);
}

TEST_CASE("apply_thresholds is invariant under monotone score maps") {
  Rng rng(71);
  auto cube = [](double x) { return x * x * x; };
  for (int trial = 0; trial < 50; ++trial) {
    ScoreMatrix scores = random_scores(rng, 4, 3);
    FusionConfig cfg;
    for (int c = 0; c < 3; ++c) cfg.thresholds.push_back(rng.uniform01());
    cfg.fallback_argmax = trial % 2 == 0;

    ScoreMatrix mapped = scores;
    for (auto& x : mapped.scores.v) x = cube(x);
    FusionConfig mapped_cfg = cfg;
    for (auto& t : mapped_cfg.thresholds) t = cube(t);

    Mat a = apply_thresholds(scores, cfg);
    Mat b = apply_thresholds(mapped, mapped_cfg);
    for (std::size_t i = 0; i < a.v.size(); ++i) CHECK(a.v[i] == b.v[i]);
  }
}

TEST_CASE("group_suppress keeps the best-scoring class per group") {
  ScoreMatrix scores = make_scores({0}, 2, {0.9, 0.7});
  Mat preds = binary_mat(1, 2, {1, 1});
  Mat out = group_suppress(scores, preds, {0, 0});
  CHECK(out.at(0, 0) == 1.0);
  CHECK(out.at(0, 1) == 0.0);

  // Singleton groups leave predictions unchanged.
  out = group_suppress(scores, preds, {0, 1});
  CHECK(out.at(0, 0) == 1.0);
  CHECK(out.at(0, 1) == 1.0);

  // Ties keep the lowest class index.
  ScoreMatrix tied = make_scores({0}, 2, {0.8, 0.8});
  out = group_suppress(tied, preds, {0, 0});
  CHECK(out.at(0, 0) == 1.0);
  CHECK(out.at(0, 1) == 0.0);

  CHECK_THROWS_AS(group_suppress(scores, preds, {0}), std::invalid_argument);
}

TEST_CASE("group_suppress idempotence and subset properties") {
  Rng rng(515);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 1 + static_cast<int>(rng.uniform_int(0, 4));
    int c = 1 + static_cast<int>(rng.uniform_int(0, 5));
    ScoreMatrix scores = random_scores(rng, n, c);
    Mat preds(n, c);
    for (auto& x : preds.v) x = rng.uniform01() < 0.5 ? 1.0 : 0.0;
    std::vector<int> groups;
    int num_groups = 1 + static_cast<int>(rng.uniform_int(0, 2));
    for (int i = 0; i < c; ++i) groups.push_back(static_cast<int>(rng.uniform_int(0, num_groups - 1)));

    Mat once = group_suppress(scores, preds, groups);
    Mat twice = group_suppress(scores, once, groups);
    for (std::size_t i = 0; i < once.v.size(); ++i) {
      CHECK(once.v[i] == twice.v[i]);          // idempotent
      CHECK(once.v[i] <= preds.v[i]);          // never creates a positive
    }
  }
}

TEST_CASE("f1_scores worked examples") {
  Mat preds = binary_mat(2, 2, {1, 0, 1, 1});
  Mat labels = binary_mat(2, 2, {1, 1, 0, 1});
  F1Result f1 = f1_scores(preds, labels);
  CHECK(f1.sample_f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  // Perfect agreement with every class represented.
  Mat eye = binary_mat(2, 2, {1, 0, 0, 1});
  f1 = f1_scores(eye, eye);
  CHECK(f1.sample_f1 == 1.0);
  CHECK(f1.micro_f1 == 1.0);
  CHECK(f1.macro_f1 == 1.0);

  // Complement with no empty rows misses everything.
  Mat comp = binary_mat(2, 2, {0, 1, 1, 0});
  f1 = f1_scores(comp, eye);
  CHECK(f1.sample_f1 == 0.0);
  CHECK(f1.micro_f1 == 0.0);
  CHECK(f1.macro_f1 == 0.0);

  CHECK_THROWS_AS(f1_scores(Mat(1, 2), Mat(2, 2)), std::invalid_argument);
}

TEST_CASE("f1_scores equals the set-based oracle on random instances") {
  Rng rng(161803);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 1 + static_cast<int>(rng.uniform_int(0, 5));
    int c = 1 + static_cast<int>(rng.uniform_int(0, 5));
    Mat preds(n, c), labels(n, c);
    for (auto& x : preds.v) x = rng.uniform01() < 0.4 ? 1.0 : 0.0;
    for (auto& y : labels.v) y = rng.uniform01() < 0.4 ? 1.0 : 0.0;
    F1Result got = f1_scores(preds, labels);
    OracleF1 want = f1_oracle(preds, labels);
    CHECK(got.sample_f1 == want.sample);
    CHECK(got.micro_f1 == want.micro);
    CHECK(got.macro_f1 == want.macro);
  }
}

TEST_CASE("threshold_count_correlation tracks a monotone relation") {
  std::vector<std::int64_t> counts{100, 50, 20, 5};
  std::vector<double> rising{0.8, 0.6, 0.4, 0.2};
  CHECK(threshold_count_correlation(counts, rising) > 0.9);
  std::vector<double> falling{0.2, 0.4, 0.6, 0.8};
  CHECK(threshold_count_correlation(counts, falling) < -0.9);
  std::vector<double> flat{0.5, 0.5, 0.5, 0.5};
  CHECK(threshold_count_correlation(counts, flat) == 0.0);
}

TEST_CASE("default grid covers 0.05 to 0.95") {
  std::vector<double> grid = default_threshold_grid();
  REQUIRE(grid.size() == 19);
  CHECK(grid.front() == doctest::Approx(0.05));
  CHECK(grid.back() == doctest::Approx(0.95));
}
