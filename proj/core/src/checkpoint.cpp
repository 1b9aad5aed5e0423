#include "tinyaction/checkpoint.hpp"

#include <sstream>
#include <stdexcept>

#include "tinyaction/io_util.hpp"

namespace tinyaction {

namespace {

constexpr const char* kMagic = "tinyaction.checkpoint 1";

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ostringstream header;
  header << kMagic << "\n";
  header << "input_dim " << ckpt.model.input_dim << "\n";
  header << "hidden_width " << ckpt.model.hidden_width << "\n";
  header << "num_blocks " << ckpt.model.num_blocks << "\n";
  header << "num_classes " << ckpt.model.num_classes << "\n";
  header << "dropout_rate " << format_double(ckpt.model.dropout_rate) << "\n";
  header << "drop_path_rate " << format_double(ckpt.model.drop_path_rate) << "\n";
  header << "train_seed " << ckpt.train_seed << "\n";
  header << "epoch " << ckpt.epoch << "\n";
  if (ckpt.optimizer) {
    const auto& hp = ckpt.optimizer->hp;
    header << "optimizer adamw\n";
    header << "adamw_beta1 " << format_double(hp.beta1) << "\n";
    header << "adamw_beta2 " << format_double(hp.beta2) << "\n";
    header << "adamw_eps " << format_double(hp.eps) << "\n";
    header << "adamw_weight_decay " << format_double(hp.weight_decay) << "\n";
    header << "adamw_step " << ckpt.optimizer->step << "\n";
  }
  header << "end_header\n";

  std::string out = header.str();
  for (const auto& view : param_views(ckpt.model.params)) {
    for (std::size_t i = 0; i < view.size; ++i) append_f64_le(out, view.data[i]);
  }
  if (ckpt.optimizer) {
    for (const auto& arr : ckpt.optimizer->m) {
      for (double x : arr) append_f64_le(out, x);
    }
    for (const auto& arr : ckpt.optimizer->v) {
      for (double x : arr) append_f64_le(out, x);
    }
  }
  write_file_atomic(path, out);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::string buf = read_file(path);
  std::size_t header_end = buf.find("end_header\n");
  if (header_end == std::string::npos) {
    throw std::runtime_error("checkpoint missing end_header: " + path);
  }
  std::istringstream header(buf.substr(0, header_end));
  std::string magic_line;
  std::getline(header, magic_line);
  if (magic_line != kMagic) throw std::runtime_error("not a tinyaction checkpoint: " + path);

  int input_dim = 0, hidden = 0, blocks = 0, classes = 0;
  double dropout = 0.0, drop_path = 0.0;
  std::uint64_t train_seed = 0;
  int epoch = 0;
  bool has_opt = false;
  AdamWParams hp;
  std::int64_t opt_step = 0;

  std::string key;
  while (header >> key) {
    if (key == "input_dim") header >> input_dim;
    else if (key == "hidden_width") header >> hidden;
    else if (key == "num_blocks") header >> blocks;
    else if (key == "num_classes") header >> classes;
    else if (key == "dropout_rate") header >> dropout;
    else if (key == "drop_path_rate") header >> drop_path;
    else if (key == "train_seed") header >> train_seed;
    else if (key == "epoch") header >> epoch;
    else if (key == "optimizer") {
      std::string kind;
      header >> kind;
      if (kind != "adamw") throw std::runtime_error("unknown optimizer kind: " + kind);
      has_opt = true;
    } else if (key == "adamw_beta1") header >> hp.beta1;
    else if (key == "adamw_beta2") header >> hp.beta2;
    else if (key == "adamw_eps") header >> hp.eps;
    else if (key == "adamw_weight_decay") header >> hp.weight_decay;
    else if (key == "adamw_step") header >> opt_step;
    else throw std::runtime_error("checkpoint header: unknown key '" + key + "'");
  }

  Checkpoint ckpt;
  // Rebuild the model skeleton, then overwrite every parameter from the file.
  ckpt.model = init_model(input_dim, hidden, blocks, classes, dropout, drop_path, /*seed=*/0);
  ckpt.train_seed = train_seed;
  ckpt.epoch = epoch;

  std::size_t pos = header_end + 11;
  for (auto& view : param_views(ckpt.model.params)) {
    for (std::size_t i = 0; i < view.size; ++i) view.data[i] = read_f64_le(buf, pos);
  }
  if (has_opt) {
    AdamWState state = init_adamw(param_views(ckpt.model.params), hp);
    state.step = opt_step;
    for (auto& arr : state.m) {
      for (double& x : arr) x = read_f64_le(buf, pos);
    }
    for (auto& arr : state.v) {
      for (double& x : arr) x = read_f64_le(buf, pos);
    }
    ckpt.optimizer = std::move(state);
  }
  if (pos != buf.size()) throw std::runtime_error("checkpoint has trailing bytes: " + path);
  return ckpt;
}

}  // namespace tinyaction
