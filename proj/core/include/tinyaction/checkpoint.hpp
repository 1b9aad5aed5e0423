#pragma once

#include <optional>
#include <string>

#include "tinyaction/mlp.hpp"
#include "tinyaction/optim.hpp"

namespace tinyaction {

/// Checkpoint file: text header, then little-endian 64-bit float parameter
/// blocks in declaration order; when optimizer state is present, the step
/// counter and moment blocks follow in the same order. Round-trips are
/// bit-exact, so training can resume and replays reproduce runs exactly.
struct Checkpoint {
  MlpModel model;
  std::uint64_t train_seed = 0;
  int epoch = 0;
  std::optional<AdamWState> optimizer;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace tinyaction
