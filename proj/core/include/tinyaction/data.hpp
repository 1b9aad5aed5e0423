#pragma once

#include <cstdint>
#include <vector>

#include "tinyaction/rng.hpp"
#include "tinyaction/video.hpp"

namespace tinyaction {

/// Parameters of the synthetic long-tailed dual-resolution benchmark.
/// Config files use exactly these field names (one `key = value` per line).
struct DatasetSpec {
  int num_classes = 10;
  int head_class_count = 200;       // primary samples for class 0
  double tail_ratio = 0.65;         // class c gets round(head_class_count * tail_ratio^c)
  double secondary_label_prob = 0.25;
  int frames = 8;
  int height = 12;
  int width = 12;
  int downsample = 3;               // LR spatial dims are (height/d, width/d)
  double noise_hr = 0.5;
  double noise_lr = 0.3;
  double noise_sr = 0.2;
  double sr_recovery = 0.8;         // beta: SR = beta*HR + (1-beta)*upsample(LR) + noise
  double train_fraction = 0.6;
  double val_fraction = 0.2;
  double test_fraction = 0.2;
  int num_groups = 5;               // classes partitioned into contiguous groups
  std::uint64_t seed = 1;
};

struct LabeledSample {
  std::int64_t id = 0;
  VideoTensor hr;
  VideoTensor lr;
  VideoTensor sr;
  std::vector<std::uint8_t> labels;  // multi-hot, length num_classes
  bool is_augmented = false;

  const VideoTensor& video(Tier tier) const {
    switch (tier) {
      case Tier::HR: return hr;
      case Tier::LR: return lr;
      default: return sr;
    }
  }
};

struct Dataset {
  std::vector<LabeledSample> samples;
  int num_classes = 0;
  std::vector<std::int64_t> class_counts;  // samples whose labels include c
  std::vector<int> group_map;              // class -> group id
};

struct SplitDatasets {
  Dataset train;
  Dataset val;
  Dataset test;
};

void validate_spec(const DatasetSpec& spec);

/// round(head_class_count * tail_ratio^c) for each class: the geometric
/// long tail of primary samples.
std::vector<std::int64_t> primary_class_counts(const DatasetSpec& spec);

/// Generates the full benchmark. Deterministic given spec.seed; per-sample
/// seeds are derived from (seed, sample id) so any thread count produces
/// bit-identical output.
SplitDatasets generate_dataset(const DatasetSpec& spec, int num_threads = 1);

/// One frame index per clip. Clip c covers [floor(c*T/K), floor((c+1)*T/K));
/// nonempty intervals are sampled uniformly, empty ones (T < K) fall back to
/// the clamped interval start. Indices are nondecreasing.
std::vector<int> uniform_sample_indices(int num_frames, int num_clips, Rng& rng);

/// Deterministic variant used at eval time: the middle frame of each clip.
std::vector<int> midclip_sample_indices(int num_frames, int num_clips);

/// Lower empirical quantile of the class counts (sorted[floor(q*(C-1))]).
std::int64_t count_quantile(std::vector<std::int64_t> counts, double q);

/// Duplicates every sample carrying at least one tail label, with all three
/// resolution tiers horizontally flipped and a fresh unique id. Tail classes
/// are those whose count is <= the tail_quantile-quantile of all counts.
Dataset balance_dataset(const Dataset& train, double tail_quantile);

std::vector<std::int64_t> recompute_class_counts(const Dataset& dataset);

}  // namespace tinyaction
