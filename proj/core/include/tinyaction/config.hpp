#pragma once

#include <map>
#include <string>

#include "tinyaction/data.hpp"
#include "tinyaction/train.hpp"

namespace tinyaction {

/// Flat `key = value` config format: one pair per line, `#` comments and
/// blank lines allowed.
std::map<std::string, std::string> parse_kv(const std::string& content, const std::string& origin);
std::map<std::string, std::string> parse_kv_file(const std::string& path);

/// All DatasetSpec keys are required; a missing or unknown key is an error
/// naming it.
DatasetSpec dataset_spec_from_kv(const std::map<std::string, std::string>& kv,
                                 const std::string& origin);
DatasetSpec load_dataset_spec(const std::string& path);
std::string dataset_spec_to_kv(const DatasetSpec& spec);

/// TrainConfig keys are optional and fall back to defaults; unknown keys
/// are still rejected.
TrainConfig train_config_from_kv(const std::map<std::string, std::string>& kv,
                                 const std::string& origin);
TrainConfig load_train_config(const std::string& path);
std::string train_config_to_kv(const TrainConfig& config);

/// Experiment manifest for the pipeline command.
struct ExperimentManifest {
  std::string dataset_spec_path;    // empty -> built-in default benchmark
  std::string train_config_path;    // empty -> built-in default settings
  std::string teacher_config_path;  // empty -> derived from the base config
  std::string student_config_path;  // empty -> derived from the base config
  int replicates = 10;
  std::uint64_t seed = 9000;
  int ensemble_last_checkpoints = 3;  // trailing student checkpoints to fuse
  bool counts_pre_balance = false;    // class counts fed to calibration diagnostics
};

void validate_manifest(const ExperimentManifest& manifest);
ExperimentManifest manifest_from_kv(const std::map<std::string, std::string>& kv,
                                    const std::string& origin);
ExperimentManifest load_manifest(const std::string& path);

}  // namespace tinyaction
