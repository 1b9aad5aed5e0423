#include "tinyaction/video.hpp"

#include <stdexcept>

namespace tinyaction {

const char* tier_name(Tier tier) {
  switch (tier) {
    case Tier::LR: return "lr";
    case Tier::HR: return "hr";
    case Tier::SR: return "sr";
  }
  return "?";
}

Tier tier_from_name(const std::string& name) {
  if (name == "lr") return Tier::LR;
  if (name == "hr") return Tier::HR;
  if (name == "sr") return Tier::SR;
  throw std::invalid_argument("unknown resolution tier: '" + name + "' (expected lr|hr|sr)");
}

VideoTensor::VideoTensor(int t, int h, int w, Tier tr)
    : frames(t), height(h), width(w), tier(tr),
      values(static_cast<std::size_t>(t) * h * w, 0.0) {
  if (t < 1 || h < 1 || w < 1) throw std::invalid_argument("VideoTensor: dims must be >= 1");
}

VideoTensor flip_horizontal(const VideoTensor& video) {
  VideoTensor out(video.frames, video.height, video.width, video.tier);
  for (int t = 0; t < video.frames; ++t) {
    for (int y = 0; y < video.height; ++y) {
      for (int x = 0; x < video.width; ++x) {
        out.at(t, y, x) = video.at(t, y, video.width - 1 - x);
      }
    }
  }
  return out;
}

}  // namespace tinyaction
