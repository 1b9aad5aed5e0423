#include "tinyaction/dataset_io.hpp"

#include <sstream>
#include <stdexcept>

#include "tinyaction/io_util.hpp"

namespace tinyaction {

namespace {

constexpr const char* kMagic = "tinyaction.dataset 1";

void append_tensor(std::string& out, const VideoTensor& v) {
  for (double x : v.values) append_f64_le(out, x);
}

VideoTensor read_tensor(const std::string& buf, std::size_t& pos, int t, int h, int w, Tier tier) {
  VideoTensor v(t, h, w, tier);
  for (auto& x : v.values) x = read_f64_le(buf, pos);
  return v;
}

}  // namespace

void save_dataset(const Dataset& dataset, int frames, int height, int width, int downsample,
                  const std::string& path) {
  std::ostringstream header;
  header << kMagic << "\n";
  header << "num_classes " << dataset.num_classes << "\n";
  header << "frames " << frames << "\n";
  header << "height " << height << "\n";
  header << "width " << width << "\n";
  header << "downsample " << downsample << "\n";
  header << "num_samples " << dataset.samples.size() << "\n";
  header << "class_counts";
  for (auto c : dataset.class_counts) header << " " << c;
  header << "\n";
  header << "group_map";
  for (auto g : dataset.group_map) header << " " << g;
  header << "\n";
  header << "end_header\n";

  std::string out = header.str();
  for (const auto& s : dataset.samples) {
    append_u64_le(out, static_cast<std::uint64_t>(s.id));
    for (auto b : s.labels) out.push_back(static_cast<char>(b ? 1 : 0));
    out.push_back(static_cast<char>(s.is_augmented ? 1 : 0));
    append_tensor(out, s.hr);
    append_tensor(out, s.lr);
    append_tensor(out, s.sr);
  }
  write_file_atomic(path, out);
}

Dataset load_dataset(const std::string& path) {
  std::string buf = read_file(path);

  std::size_t header_end = buf.find("end_header\n");
  if (header_end == std::string::npos) {
    throw std::runtime_error("dataset file missing end_header: " + path);
  }
  std::istringstream header(buf.substr(0, header_end));
  std::string magic_line;
  std::getline(header, magic_line);
  if (magic_line != kMagic) throw std::runtime_error("not a tinyaction dataset file: " + path);

  Dataset dataset;
  int frames = -1, height = -1, width = -1, downsample = -1;
  std::size_t num_samples = 0;
  std::string key;
  while (header >> key) {
    if (key == "num_classes") {
      header >> dataset.num_classes;
    } else if (key == "frames") {
      header >> frames;
    } else if (key == "height") {
      header >> height;
    } else if (key == "width") {
      header >> width;
    } else if (key == "downsample") {
      header >> downsample;
    } else if (key == "num_samples") {
      header >> num_samples;
    } else if (key == "class_counts") {
      dataset.class_counts.resize(static_cast<std::size_t>(dataset.num_classes));
      for (auto& c : dataset.class_counts) header >> c;
    } else if (key == "group_map") {
      dataset.group_map.resize(static_cast<std::size_t>(dataset.num_classes));
      for (auto& g : dataset.group_map) header >> g;
    } else {
      throw std::runtime_error("dataset header: unknown key '" + key + "'");
    }
  }
  if (dataset.num_classes < 1 || frames < 1 || height < 1 || width < 1 || downsample < 1) {
    throw std::runtime_error("dataset header incomplete: " + path);
  }

  std::size_t pos = header_end + 11;  // past "end_header\n"
  dataset.samples.reserve(num_samples);
  for (std::size_t i = 0; i < num_samples; ++i) {
    LabeledSample s;
    s.id = static_cast<std::int64_t>(read_u64_le(buf, pos));
    s.labels.resize(static_cast<std::size_t>(dataset.num_classes));
    if (pos + s.labels.size() + 1 > buf.size()) throw std::runtime_error("dataset truncated: " + path);
    for (auto& b : s.labels) b = static_cast<std::uint8_t>(buf[pos++]);
    s.is_augmented = buf[pos++] != 0;
    s.hr = read_tensor(buf, pos, frames, height, width, Tier::HR);
    s.lr = read_tensor(buf, pos, frames, height / downsample, width / downsample, Tier::LR);
    s.sr = read_tensor(buf, pos, frames, height, width, Tier::SR);
    dataset.samples.push_back(std::move(s));
  }
  if (pos != buf.size()) throw std::runtime_error("dataset has trailing bytes: " + path);
  return dataset;
}

void save_splits(const SplitDatasets& splits, const DatasetSpec& spec, const std::string& out_dir) {
  ensure_directory(out_dir);
  save_dataset(splits.train, spec.frames, spec.height, spec.width, spec.downsample,
               out_dir + "/train.bin");
  save_dataset(splits.val, spec.frames, spec.height, spec.width, spec.downsample,
               out_dir + "/val.bin");
  save_dataset(splits.test, spec.frames, spec.height, spec.width, spec.downsample,
               out_dir + "/test.bin");
}

SplitDatasets load_splits(const std::string& dir) {
  SplitDatasets splits;
  splits.train = load_dataset(dir + "/train.bin");
  splits.val = load_dataset(dir + "/val.bin");
  splits.test = load_dataset(dir + "/test.bin");
  return splits;
}

}  // namespace tinyaction
