#include "tinyaction/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

namespace tinyaction {

namespace {

// Fraction of prototype energy placed in the flip-antisymmetric component.
// Keeps every prototype genuinely left-right asymmetric while a flipped
// sample still shares most of its class signature with the original.
constexpr double kAsymmetryScale = 0.15;

// Energy split between the window-constant spatial template and per-frame
// jitter. The coherent part rewards temporal coverage (any in-window frame
// shows it); the jitter makes successive frames genuinely different views.
constexpr double kCoherentShare = 0.7;

// Prototypes live in a centered patch covering 1/kPatchDivisor of each
// spatial axis (tiny actors in a large noisy frame).
constexpr int kPatchDivisor = 1;

// Every class template shares this energy fraction with one common "actor"
// pattern. The shared part makes classes structurally confusable by the
// same amount in every generated world, so model scores stay graded for
// related classes instead of saturating.
constexpr double kSharedEnergy = 0.3;

struct SamplePlan {
  std::int64_t id;
  int primary_class;
  int split;  // 0 train, 1 val, 2 test
};

int block_group(int cls, int num_classes, int num_groups) {
  int block = (num_classes + num_groups - 1) / num_groups;
  return cls / block;
}

struct PatchGeometry {
  int ph, pw;  // patch dims, frame parity so the patch is mirror-stable
  int y0, x0;  // top-left corner
};

PatchGeometry patch_geometry(int h, int w) {
  PatchGeometry g;
  g.ph = std::max(1, h / kPatchDivisor);
  g.pw = std::max(1, w / kPatchDivisor);
  if ((w - g.pw) % 2 != 0) g.pw += 1;
  if ((h - g.ph) % 2 != 0) g.ph += 1;
  g.y0 = (h - g.ph) / 2;
  g.x0 = (w - g.pw) / 2;
  return g;
}

// Orthonormal set of flip-symmetric patch patterns, shared by all classes
// of one dataset. Column 0 is the common actor pattern, column 1+c is class
// c's residual. Falls back to plain random patterns when the symmetric
// subspace is too small to orthogonalize.
std::vector<std::vector<double>> symmetric_orthobasis(const DatasetSpec& spec,
                                                      const PatchGeometry& g) {
  int half = (g.pw + 1) / 2;
  int sym_dim = g.ph * half;
  int needed = spec.num_classes + 1;
  Rng rng(derive_seed(spec.seed, kPrototypeStream, 0xba5e5ULL));

  std::vector<std::vector<double>> basis;
  for (int k = 0; k < needed; ++k) {
    std::vector<double> v(static_cast<std::size_t>(g.ph) * half);
    for (auto& x : v) x = rng.normal();
    if (needed <= sym_dim) {
      for (const auto& u : basis) {  // Gram-Schmidt against earlier patterns
        double dot = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * u[i];
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dot * u[i];
      }
    }
    double nrm = 0.0;
    for (double x : v) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm < 1e-9) nrm = 1.0;
    for (auto& x : v) x /= nrm;
    basis.push_back(std::move(v));
  }

  // Unfold the half patterns into full flip-symmetric patches. A unit-norm
  // half pattern unfolds to norm sqrt(2); scaling by sqrt(sym_dim) restores
  // unit per-pixel variance on average.
  std::vector<std::vector<double>> full;
  double scale = std::sqrt(static_cast<double>(sym_dim));
  for (auto& v : basis) {
    std::vector<double> p(static_cast<std::size_t>(g.ph) * g.pw);
    for (int y = 0; y < g.ph; ++y) {
      for (int x = 0; x < g.pw; ++x) {
        int hx = x < half ? x : g.pw - 1 - x;
        p[static_cast<std::size_t>(y) * g.pw + x] =
            v[static_cast<std::size_t>(y) * half + hx] * scale;
      }
    }
    full.push_back(std::move(p));
  }
  return full;
}

// Class prototype: a fixed spatial template active over a class-specific
// temporal window plus per-frame jitter. The template is a blend of the
// common actor pattern, the class's orthogonal residual and a small
// antisymmetric part; the window start follows a golden-ratio stagger so
// action times are spread the same way in every world.
VideoTensor make_prototype(const DatasetSpec& spec, int cls) {
  Rng rng(derive_seed(spec.seed, kPrototypeStream, static_cast<std::uint64_t>(cls)));
  int t_len = spec.frames, h = spec.height, w = spec.width;
  int window = std::max(1, t_len / 2);
  double phase = (cls + 1) * 0.6180339887498949;
  phase -= std::floor(phase);
  int start = std::min(t_len - window, static_cast<int>(phase * (t_len - window + 1)));

  PatchGeometry g = patch_geometry(h, w);
  std::vector<std::vector<double>> basis = symmetric_orthobasis(spec, g);
  const std::vector<double>& common = basis[0];
  const std::vector<double>& resid = basis[static_cast<std::size_t>(cls) + 1];

  std::size_t patch_size = static_cast<std::size_t>(g.ph) * g.pw;
  auto draw_antisym = [&]() {
    std::vector<double> f(patch_size), out(patch_size);
    for (auto& x : f) x = rng.normal();
    for (int y = 0; y < g.ph; ++y) {
      for (int x = 0; x < g.pw; ++x) {
        double a = f[static_cast<std::size_t>(y) * g.pw + x];
        double am = f[static_cast<std::size_t>(y) * g.pw + (g.pw - 1 - x)];
        out[static_cast<std::size_t>(y) * g.pw + x] = (a - am) / std::sqrt(2.0);
      }
    }
    return out;
  };

  double c_shared = std::sqrt(kSharedEnergy);
  double c_resid = std::sqrt(1.0 - kSharedEnergy);
  double a = kAsymmetryScale;
  double renorm = std::sqrt(1.0 + a * a);

  std::vector<double> antisym = draw_antisym();
  std::vector<double> coherent(patch_size);
  for (std::size_t i = 0; i < patch_size; ++i) {
    coherent[i] = (c_shared * common[i] + c_resid * resid[i] + a * antisym[i]) / renorm;
  }

  double c_coh = std::sqrt(kCoherentShare);
  double c_jit = std::sqrt(1.0 - kCoherentShare);

  VideoTensor proto(t_len, h, w, Tier::HR);
  for (int t = start; t < start + window; ++t) {
    // Per-frame jitter: a fresh sym+antisym mix so consecutive frames are
    // different views of the same action.
    std::vector<double> jit(patch_size), jsym(patch_size);
    for (auto& x : jsym) x = rng.normal();
    std::vector<double> janti = draw_antisym();
    for (int y = 0; y < g.ph; ++y) {
      for (int x = 0; x < g.pw; ++x) {
        std::size_t i = static_cast<std::size_t>(y) * g.pw + x;
        std::size_t im = static_cast<std::size_t>(y) * g.pw + (g.pw - 1 - x);
        double sym = (jsym[i] + jsym[im]) / std::sqrt(2.0);
        jit[i] = (sym + a * janti[i]) / renorm;
      }
    }
    for (int y = 0; y < g.ph; ++y) {
      for (int x = 0; x < g.pw; ++x) {
        std::size_t i = static_cast<std::size_t>(y) * g.pw + x;
        proto.at(t, g.y0 + y, g.x0 + x) = c_coh * coherent[i] + c_jit * jit[i];
      }
    }
  }
  return proto;
}

VideoTensor average_pool(const VideoTensor& hr, int d) {
  VideoTensor out(hr.frames, hr.height / d, hr.width / d, Tier::LR);
  double inv = 1.0 / (d * d);
  for (int t = 0; t < hr.frames; ++t) {
    for (int y = 0; y < out.height; ++y) {
      for (int x = 0; x < out.width; ++x) {
        double sum = 0.0;
        for (int dy = 0; dy < d; ++dy) {
          for (int dx = 0; dx < d; ++dx) {
            sum += hr.at(t, y * d + dy, x * d + dx);
          }
        }
        out.at(t, y, x) = sum * inv;
      }
    }
  }
  return out;
}

LabeledSample make_sample(const DatasetSpec& spec, const std::vector<VideoTensor>& prototypes,
                          const SamplePlan& plan) {
  Rng rng(derive_seed(spec.seed, kSampleStream, static_cast<std::uint64_t>(plan.id)));
  int c_count = spec.num_classes;

  LabeledSample sample;
  sample.id = plan.id;
  sample.labels.assign(static_cast<std::size_t>(c_count), 0);
  sample.labels[plan.primary_class] = 1;

  // Optional extra label, drawn outside the primary class's group so group
  // exclusivity stays a valid prior for post-processing.
  double u = rng.uniform01();
  if (u < spec.secondary_label_prob) {
    int primary_group = block_group(plan.primary_class, c_count, spec.num_groups);
    std::vector<int> candidates;
    for (int c = 0; c < c_count; ++c) {
      if (c != plan.primary_class && block_group(c, c_count, spec.num_groups) != primary_group) {
        candidates.push_back(c);
      }
    }
    if (candidates.empty()) {
      for (int c = 0; c < c_count; ++c) {
        if (c != plan.primary_class) candidates.push_back(c);
      }
    }
    if (!candidates.empty()) {
      int pick = static_cast<int>(rng.uniform_int(0, static_cast<std::int64_t>(candidates.size()) - 1));
      sample.labels[candidates[pick]] = 1;
    }
  }

  // HR = sum of active prototypes + noise.
  sample.hr = VideoTensor(spec.frames, spec.height, spec.width, Tier::HR);
  for (int c = 0; c < c_count; ++c) {
    if (!sample.labels[c]) continue;
    const VideoTensor& p = prototypes[c];
    for (std::size_t i = 0; i < sample.hr.values.size(); ++i) sample.hr.values[i] += p.values[i];
  }
  for (auto& x : sample.hr.values) x += spec.noise_hr * rng.normal();

  // LR = average-pooled HR + noise.
  sample.lr = average_pool(sample.hr, spec.downsample);
  for (auto& x : sample.lr.values) x += spec.noise_lr * rng.normal();

  // SR = beta-blend of HR and nearest-neighbor upsampled LR + noise. beta
  // controls how much true detail the simulated super-resolver recovers.
  sample.sr = VideoTensor(spec.frames, spec.height, spec.width, Tier::SR);
  double beta = spec.sr_recovery;
  for (int t = 0; t < spec.frames; ++t) {
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        double up = sample.lr.at(t, y / spec.downsample, x / spec.downsample);
        sample.sr.at(t, y, x) = beta * sample.hr.at(t, y, x) + (1.0 - beta) * up;
      }
    }
  }
  for (auto& x : sample.sr.values) x += spec.noise_sr * rng.normal();

  return sample;
}

// Largest-remainder split of n into train/val/test shares.
std::array<std::int64_t, 3> split_counts(std::int64_t n, const DatasetSpec& spec) {
  double fracs[3] = {spec.train_fraction, spec.val_fraction, spec.test_fraction};
  std::array<std::int64_t, 3> out{};
  double rema[3];
  std::int64_t used = 0;
  for (int s = 0; s < 3; ++s) {
    double quota = static_cast<double>(n) * fracs[s];
    out[s] = static_cast<std::int64_t>(std::floor(quota));
    rema[s] = quota - static_cast<double>(out[s]);
    used += out[s];
  }
  std::int64_t left = n - used;
  // Ties go to the earlier split (train before val before test).
  while (left > 0) {
    int best = 0;
    for (int s = 1; s < 3; ++s) {
      if (rema[s] > rema[best]) best = s;
    }
    out[best] += 1;
    rema[best] = -1.0;
    --left;
  }
  return out;
}

}  // namespace

void validate_spec(const DatasetSpec& spec) {
  if (spec.num_classes < 1) throw std::invalid_argument("spec: num_classes must be >= 1");
  if (spec.head_class_count < 1) throw std::invalid_argument("spec: head_class_count must be >= 1");
  if (!(spec.tail_ratio > 0.0 && spec.tail_ratio < 1.0)) {
    throw std::invalid_argument("spec: tail_ratio must lie in (0,1)");
  }
  if (spec.secondary_label_prob < 0.0 || spec.secondary_label_prob > 1.0) {
    throw std::invalid_argument("spec: secondary_label_prob must lie in [0,1]");
  }
  if (spec.frames < 1 || spec.height < 1 || spec.width < 1) {
    throw std::invalid_argument("spec: frames/height/width must be >= 1");
  }
  if (spec.downsample < 1 || spec.height % spec.downsample != 0 ||
      spec.width % spec.downsample != 0) {
    throw std::invalid_argument("spec: downsample must divide height and width");
  }
  if (spec.noise_hr < 0.0 || spec.noise_lr < 0.0 || spec.noise_sr < 0.0) {
    throw std::invalid_argument("spec: noise levels must be >= 0");
  }
  if (spec.sr_recovery < 0.0 || spec.sr_recovery > 1.0) {
    throw std::invalid_argument("spec: sr_recovery must lie in [0,1]");
  }
  double fsum = spec.train_fraction + spec.val_fraction + spec.test_fraction;
  if (spec.train_fraction < 0.0 || spec.val_fraction < 0.0 || spec.test_fraction < 0.0 ||
      std::fabs(fsum - 1.0) > 1e-9) {
    throw std::invalid_argument("spec: split fractions must be nonnegative and sum to 1");
  }
  if (spec.num_groups < 1 || spec.num_groups > spec.num_classes) {
    throw std::invalid_argument("spec: num_groups must lie in [1, num_classes]");
  }
}

std::vector<std::int64_t> primary_class_counts(const DatasetSpec& spec) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(spec.num_classes));
  for (int c = 0; c < spec.num_classes; ++c) {
    counts[c] = std::llround(static_cast<double>(spec.head_class_count) *
                             std::pow(spec.tail_ratio, static_cast<double>(c)));
  }
  return counts;
}

SplitDatasets generate_dataset(const DatasetSpec& spec, int num_threads) {
  validate_spec(spec);
  if (num_threads < 1) num_threads = 1;

  std::vector<std::int64_t> counts = primary_class_counts(spec);

  // Per-class plan: ids are assigned class-major so they are stable no
  // matter how generation is parallelized.
  std::vector<SamplePlan> plan;
  std::int64_t next_id = 0;
  for (int c = 0; c < spec.num_classes; ++c) {
    auto shares = split_counts(counts[c], spec);
    if (shares[0] == 0) {
      throw std::invalid_argument("spec: class " + std::to_string(c) +
                                  " has no training samples (count rounds to 0)");
    }
    for (std::int64_t i = 0; i < counts[c]; ++i) {
      int split = i < shares[0] ? 0 : (i < shares[0] + shares[1] ? 1 : 2);
      plan.push_back({next_id++, c, split});
    }
  }

  std::vector<VideoTensor> prototypes;
  prototypes.reserve(static_cast<std::size_t>(spec.num_classes));
  for (int c = 0; c < spec.num_classes; ++c) prototypes.push_back(make_prototype(spec, c));

  std::vector<LabeledSample> all(plan.size());
  auto fill_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) all[i] = make_sample(spec, prototypes, plan[i]);
  };
  if (num_threads == 1 || plan.size() < 2) {
    fill_range(0, plan.size());
  } else {
    std::vector<std::thread> workers;
    std::size_t chunk = (plan.size() + num_threads - 1) / static_cast<std::size_t>(num_threads);
    for (int w = 0; w < num_threads; ++w) {
      std::size_t lo = static_cast<std::size_t>(w) * chunk;
      std::size_t hi = std::min(plan.size(), lo + chunk);
      if (lo >= hi) break;
      workers.emplace_back(fill_range, lo, hi);
    }
    for (auto& t : workers) t.join();
  }

  std::vector<int> group_map(static_cast<std::size_t>(spec.num_classes));
  for (int c = 0; c < spec.num_classes; ++c) {
    group_map[c] = block_group(c, spec.num_classes, spec.num_groups);
  }

  SplitDatasets out;
  for (Dataset* d : {&out.train, &out.val, &out.test}) {
    d->num_classes = spec.num_classes;
    d->group_map = group_map;
  }
  for (std::size_t i = 0; i < plan.size(); ++i) {
    Dataset& target = plan[i].split == 0 ? out.train : (plan[i].split == 1 ? out.val : out.test);
    target.samples.push_back(std::move(all[i]));
  }
  for (Dataset* d : {&out.train, &out.val, &out.test}) {
    d->class_counts = recompute_class_counts(*d);
  }
  return out;
}

std::vector<int> uniform_sample_indices(int num_frames, int num_clips, Rng& rng) {
  if (num_frames < 1) throw std::invalid_argument("uniform_sample_indices: num_frames must be >= 1");
  if (num_clips < 1) throw std::invalid_argument("uniform_sample_indices: num_clips must be >= 1");
  std::vector<int> indices(static_cast<std::size_t>(num_clips));
  for (int c = 0; c < num_clips; ++c) {
    std::int64_t lo = static_cast<std::int64_t>(c) * num_frames / num_clips;
    std::int64_t hi = static_cast<std::int64_t>(c + 1) * num_frames / num_clips;
    if (hi > lo) {
      indices[c] = static_cast<int>(rng.uniform_int(lo, hi - 1));
    } else {
      indices[c] = static_cast<int>(std::min<std::int64_t>(lo, num_frames - 1));
    }
  }
  return indices;
}

std::vector<int> midclip_sample_indices(int num_frames, int num_clips) {
  if (num_frames < 1) throw std::invalid_argument("midclip_sample_indices: num_frames must be >= 1");
  if (num_clips < 1) throw std::invalid_argument("midclip_sample_indices: num_clips must be >= 1");
  std::vector<int> indices(static_cast<std::size_t>(num_clips));
  for (int c = 0; c < num_clips; ++c) {
    std::int64_t lo = static_cast<std::int64_t>(c) * num_frames / num_clips;
    std::int64_t hi = static_cast<std::int64_t>(c + 1) * num_frames / num_clips;
    if (hi > lo) {
      indices[c] = static_cast<int>((lo + hi - 1) / 2);
    } else {
      indices[c] = static_cast<int>(std::min<std::int64_t>(lo, num_frames - 1));
    }
  }
  return indices;
}

std::int64_t count_quantile(std::vector<std::int64_t> counts, double q) {
  if (counts.empty()) throw std::invalid_argument("count_quantile: empty counts");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("count_quantile: q must lie in [0,1]");
  std::sort(counts.begin(), counts.end());
  auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(counts.size() - 1)));
  return counts[idx];
}

Dataset balance_dataset(const Dataset& train, double tail_quantile) {
  if (train.samples.empty()) throw std::invalid_argument("balance_dataset: empty dataset");
  if (tail_quantile < 0.0 || tail_quantile > 1.0) {
    throw std::invalid_argument("balance_dataset: tail_quantile must lie in [0,1]");
  }

  std::vector<std::int64_t> counts = recompute_class_counts(train);
  std::int64_t cutoff = count_quantile(counts, tail_quantile);
  std::vector<bool> is_tail(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) is_tail[c] = counts[c] <= cutoff;

  Dataset out = train;
  std::int64_t next_id = 0;
  for (const auto& s : train.samples) next_id = std::max(next_id, s.id + 1);

  for (const auto& s : train.samples) {
    bool has_tail = false;
    for (std::size_t c = 0; c < s.labels.size(); ++c) {
      if (s.labels[c] && is_tail[c]) {
        has_tail = true;
        break;
      }
    }
    if (!has_tail) continue;
    LabeledSample dup;
    dup.id = next_id++;
    dup.hr = flip_horizontal(s.hr);
    dup.lr = flip_horizontal(s.lr);
    dup.sr = flip_horizontal(s.sr);
    dup.labels = s.labels;
    dup.is_augmented = true;
    out.samples.push_back(std::move(dup));
  }

  out.class_counts = recompute_class_counts(out);
  return out;
}

std::vector<std::int64_t> recompute_class_counts(const Dataset& dataset) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(dataset.num_classes), 0);
  for (const auto& s : dataset.samples) {
    for (std::size_t c = 0; c < s.labels.size(); ++c) {
      if (s.labels[c]) counts[c] += 1;
    }
  }
  return counts;
}

}  // namespace tinyaction
