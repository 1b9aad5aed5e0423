#include "tinyaction/config.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

#include "tinyaction/io_util.hpp"

namespace tinyaction {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

class KvReader {
 public:
  KvReader(const std::map<std::string, std::string>& kv, std::string origin)
      : kv_(kv), origin_(std::move(origin)) {}

  bool has(const std::string& key) {
    used_.insert(key);
    return kv_.count(key) > 0;
  }

  std::string require(const std::string& key) {
    used_.insert(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) throw std::invalid_argument(origin_ + ": missing key '" + key + "'");
    return it->second;
  }

  std::string get(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  double require_double(const std::string& key) { return to_double(key, require(key)); }
  double get_double(const std::string& key, double fallback) {
    return has(key) ? to_double(key, kv_.at(key)) : fallback;
  }
  std::int64_t require_int(const std::string& key) { return to_int(key, require(key)); }
  std::int64_t get_int(const std::string& key, std::int64_t fallback) {
    return has(key) ? to_int(key, kv_.at(key)) : fallback;
  }
  std::uint64_t require_uint(const std::string& key) {
    return static_cast<std::uint64_t>(std::stoull(require(key)));
  }
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) {
    return has(key) ? static_cast<std::uint64_t>(std::stoull(kv_.at(key))) : fallback;
  }

  void reject_unknown() {
    for (const auto& [key, value] : kv_) {
      (void)value;
      if (!used_.count(key)) throw std::invalid_argument(origin_ + ": unknown key '" + key + "'");
    }
  }

 private:
  double to_double(const std::string& key, const std::string& raw) {
    try {
      std::size_t pos = 0;
      double x = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument("");
      return x;
    } catch (...) {
      throw std::invalid_argument(origin_ + ": key '" + key + "' has non-numeric value '" + raw + "'");
    }
  }
  std::int64_t to_int(const std::string& key, const std::string& raw) {
    try {
      std::size_t pos = 0;
      std::int64_t x = std::stoll(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument("");
      return x;
    } catch (...) {
      throw std::invalid_argument(origin_ + ": key '" + key + "' has non-integer value '" + raw + "'");
    }
  }

  const std::map<std::string, std::string>& kv_;
  std::string origin_;
  std::set<std::string> used_;
};

}  // namespace

std::map<std::string, std::string> parse_kv(const std::string& content, const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::istringstream in(content);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    if (!kv.emplace(key, value).second) {
      throw std::invalid_argument(origin + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

std::map<std::string, std::string> parse_kv_file(const std::string& path) {
  return parse_kv(read_file(path), path);
}

DatasetSpec dataset_spec_from_kv(const std::map<std::string, std::string>& kv,
                                 const std::string& origin) {
  KvReader r(kv, origin);
  DatasetSpec spec;
  spec.num_classes = static_cast<int>(r.require_int("num_classes"));
  spec.head_class_count = static_cast<int>(r.require_int("head_class_count"));
  spec.tail_ratio = r.require_double("tail_ratio");
  spec.secondary_label_prob = r.require_double("secondary_label_prob");
  spec.frames = static_cast<int>(r.require_int("frames"));
  spec.height = static_cast<int>(r.require_int("height"));
  spec.width = static_cast<int>(r.require_int("width"));
  spec.downsample = static_cast<int>(r.require_int("downsample"));
  spec.noise_hr = r.require_double("noise_hr");
  spec.noise_lr = r.require_double("noise_lr");
  spec.noise_sr = r.require_double("noise_sr");
  spec.sr_recovery = r.require_double("sr_recovery");
  spec.train_fraction = r.require_double("train_fraction");
  spec.val_fraction = r.require_double("val_fraction");
  spec.test_fraction = r.require_double("test_fraction");
  spec.num_groups = static_cast<int>(r.require_int("num_groups"));
  spec.seed = r.require_uint("seed");
  r.reject_unknown();
  validate_spec(spec);
  return spec;
}

DatasetSpec load_dataset_spec(const std::string& path) {
  return dataset_spec_from_kv(parse_kv_file(path), path);
}

std::string dataset_spec_to_kv(const DatasetSpec& spec) {
  std::ostringstream out;
  out << "num_classes = " << spec.num_classes << "\n";
  out << "head_class_count = " << spec.head_class_count << "\n";
  out << "tail_ratio = " << format_double(spec.tail_ratio) << "\n";
  out << "secondary_label_prob = " << format_double(spec.secondary_label_prob) << "\n";
  out << "frames = " << spec.frames << "\n";
  out << "height = " << spec.height << "\n";
  out << "width = " << spec.width << "\n";
  out << "downsample = " << spec.downsample << "\n";
  out << "noise_hr = " << format_double(spec.noise_hr) << "\n";
  out << "noise_lr = " << format_double(spec.noise_lr) << "\n";
  out << "noise_sr = " << format_double(spec.noise_sr) << "\n";
  out << "sr_recovery = " << format_double(spec.sr_recovery) << "\n";
  out << "train_fraction = " << format_double(spec.train_fraction) << "\n";
  out << "val_fraction = " << format_double(spec.val_fraction) << "\n";
  out << "test_fraction = " << format_double(spec.test_fraction) << "\n";
  out << "num_groups = " << spec.num_groups << "\n";
  out << "seed = " << spec.seed << "\n";
  return out.str();
}

TrainConfig train_config_from_kv(const std::map<std::string, std::string>& kv,
                                 const std::string& origin) {
  KvReader r(kv, origin);
  TrainConfig c;
  c.epochs = static_cast<int>(r.get_int("epochs", c.epochs));
  c.batch_size = static_cast<int>(r.get_int("batch_size", c.batch_size));
  c.loss = loss_from_name(r.get("loss", loss_name(c.loss)));
  c.alpha = r.get_double("alpha", c.alpha);
  c.asl.gamma_pos = r.get_double("asl_gamma_pos", c.asl.gamma_pos);
  c.asl.gamma_neg = r.get_double("asl_gamma_neg", c.asl.gamma_neg);
  c.asl.margin = r.get_double("asl_margin", c.asl.margin);
  c.schedule.base_lr = r.get_double("base_lr", c.schedule.base_lr);
  c.schedule.warmup_steps = static_cast<int>(r.get_int("warmup_steps", c.schedule.warmup_steps));
  c.schedule.cycle_steps = static_cast<int>(r.get_int("cycle_steps", c.schedule.cycle_steps));
  c.schedule.cycle_mult = static_cast<int>(r.get_int("cycle_mult", c.schedule.cycle_mult));
  c.schedule.eta_min = r.get_double("eta_min", c.schedule.eta_min);
  c.adamw.beta1 = r.get_double("adamw_beta1", c.adamw.beta1);
  c.adamw.beta2 = r.get_double("adamw_beta2", c.adamw.beta2);
  c.adamw.eps = r.get_double("adamw_eps", c.adamw.eps);
  c.adamw.weight_decay = r.get_double("weight_decay", c.adamw.weight_decay);
  c.dropout_rate = r.get_double("dropout_rate", c.dropout_rate);
  c.drop_path_rate = r.get_double("drop_path_rate", c.drop_path_rate);
  c.clips = static_cast<int>(r.get_int("clips", c.clips));
  c.sampling = sampling_from_name(r.get("sampling", sampling_name(c.sampling)));
  c.tier = tier_from_name(r.get("tier", tier_name(c.tier)));
  c.hidden_width = static_cast<int>(r.get_int("hidden_width", c.hidden_width));
  c.num_blocks = static_cast<int>(r.get_int("num_blocks", c.num_blocks));
  c.balance = r.get_int("balance", c.balance ? 1 : 0) != 0;
  c.tail_quantile = r.get_double("tail_quantile", c.tail_quantile);
  c.seed = r.get_uint("seed", c.seed);
  c.checkpoint_every = static_cast<int>(r.get_int("checkpoint_every", c.checkpoint_every));
  r.reject_unknown();
  validate_train_config(c);
  return c;
}

TrainConfig load_train_config(const std::string& path) {
  return train_config_from_kv(parse_kv_file(path), path);
}

std::string train_config_to_kv(const TrainConfig& c) {
  std::ostringstream out;
  out << "epochs = " << c.epochs << "\n";
  out << "batch_size = " << c.batch_size << "\n";
  out << "loss = " << loss_name(c.loss) << "\n";
  out << "alpha = " << format_double(c.alpha) << "\n";
  out << "asl_gamma_pos = " << format_double(c.asl.gamma_pos) << "\n";
  out << "asl_gamma_neg = " << format_double(c.asl.gamma_neg) << "\n";
  out << "asl_margin = " << format_double(c.asl.margin) << "\n";
  out << "base_lr = " << format_double(c.schedule.base_lr) << "\n";
  out << "warmup_steps = " << c.schedule.warmup_steps << "\n";
  out << "cycle_steps = " << c.schedule.cycle_steps << "\n";
  out << "cycle_mult = " << c.schedule.cycle_mult << "\n";
  out << "eta_min = " << format_double(c.schedule.eta_min) << "\n";
  out << "adamw_beta1 = " << format_double(c.adamw.beta1) << "\n";
  out << "adamw_beta2 = " << format_double(c.adamw.beta2) << "\n";
  out << "adamw_eps = " << format_double(c.adamw.eps) << "\n";
  out << "weight_decay = " << format_double(c.adamw.weight_decay) << "\n";
  out << "dropout_rate = " << format_double(c.dropout_rate) << "\n";
  out << "drop_path_rate = " << format_double(c.drop_path_rate) << "\n";
  out << "clips = " << c.clips << "\n";
  out << "sampling = " << sampling_name(c.sampling) << "\n";
  out << "tier = " << tier_name(c.tier) << "\n";
  out << "hidden_width = " << c.hidden_width << "\n";
  out << "num_blocks = " << c.num_blocks << "\n";
  out << "balance = " << (c.balance ? 1 : 0) << "\n";
  out << "tail_quantile = " << format_double(c.tail_quantile) << "\n";
  out << "seed = " << c.seed << "\n";
  out << "checkpoint_every = " << c.checkpoint_every << "\n";
  return out.str();
}

void validate_manifest(const ExperimentManifest& manifest) {
  if (manifest.replicates < 1) throw std::invalid_argument("manifest: replicates must be >= 1");
  if (manifest.ensemble_last_checkpoints < 1) {
    throw std::invalid_argument("manifest: ensemble_last_checkpoints must be >= 1");
  }
}

ExperimentManifest manifest_from_kv(const std::map<std::string, std::string>& kv,
                                    const std::string& origin) {
  KvReader r(kv, origin);
  ExperimentManifest m;
  m.dataset_spec_path = r.get("dataset_spec", "");
  m.train_config_path = r.get("train_config", "");
  m.teacher_config_path = r.get("teacher_config", "");
  m.student_config_path = r.get("student_config", "");
  m.replicates = static_cast<int>(r.get_int("replicates", m.replicates));
  m.seed = r.get_uint("seed", m.seed);
  m.ensemble_last_checkpoints =
      static_cast<int>(r.get_int("ensemble_last_checkpoints", m.ensemble_last_checkpoints));
  std::string counts = r.get("calibration_counts", "post_balance");
  if (counts == "pre_balance") {
    m.counts_pre_balance = true;
  } else if (counts == "post_balance") {
    m.counts_pre_balance = false;
  } else {
    throw std::invalid_argument(origin + ": calibration_counts must be pre_balance|post_balance");
  }
  r.reject_unknown();
  validate_manifest(m);
  return m;
}

ExperimentManifest load_manifest(const std::string& path) {
  return manifest_from_kv(parse_kv_file(path), path);
}

}  // namespace tinyaction
