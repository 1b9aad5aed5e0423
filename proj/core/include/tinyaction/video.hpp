#pragma once

#include <string>
#include <vector>

namespace tinyaction {

enum class Tier { LR, HR, SR };

const char* tier_name(Tier tier);
Tier tier_from_name(const std::string& name);

/// One clip-sampled "video": T frames of H x W real intensities.
struct VideoTensor {
  int frames = 0;
  int height = 0;
  int width = 0;
  Tier tier = Tier::HR;
  std::vector<double> values;  // row-major [t][y][x]

  VideoTensor() = default;
  VideoTensor(int t, int h, int w, Tier tr);

  double& at(int t, int y, int x) {
    return values[(static_cast<std::size_t>(t) * height + y) * width + x];
  }
  const double& at(int t, int y, int x) const {
    return values[(static_cast<std::size_t>(t) * height + y) * width + x];
  }

  std::size_t frame_size() const { return static_cast<std::size_t>(height) * width; }
  const double* frame(int t) const { return values.data() + static_cast<std::size_t>(t) * frame_size(); }
};

/// Reverses the width axis of every frame. Involution: flip(flip(v)) == v.
VideoTensor flip_horizontal(const VideoTensor& video);

}  // namespace tinyaction
