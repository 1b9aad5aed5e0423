#pragma once

#include <string>

#include "tinyaction/data.hpp"

namespace tinyaction {

// Dataset file layout: a plain-text header terminated by `end_header`, then
// one record per sample. Each record is the 64-bit little-endian sample id,
// num_classes multi-hot label bytes, one flag byte (bit 0 = is_augmented),
// and three blocks of little-endian 64-bit floats in row-major T x H x W
// order: HR, LR, SR. LR block dims are (T, H/d, W/d).

void save_dataset(const Dataset& dataset, int frames, int height, int width, int downsample,
                  const std::string& path);

Dataset load_dataset(const std::string& path);

/// Writes train.bin / val.bin / test.bin under out_dir.
void save_splits(const SplitDatasets& splits, const DatasetSpec& spec, const std::string& out_dir);

SplitDatasets load_splits(const std::string& dir);

}  // namespace tinyaction
