#include "tinyaction/io_util.hpp"

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace tinyaction {

void append_u64_le(std::string& out, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((x >> (8 * i)) & 0xffu));
  }
}

void append_f64_le(std::string& out, double x) {
  append_u64_le(out, std::bit_cast<std::uint64_t>(x));
}

std::uint64_t read_u64_le(const std::string& buf, std::size_t& pos) {
  if (pos + 8 > buf.size()) throw std::runtime_error("binary read past end of buffer");
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) {
    x |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
  }
  pos += 8;
  return x;
}

double read_f64_le(const std::string& buf, std::size_t& pos) {
  return std::bit_cast<double>(read_u64_le(buf, pos));
}

std::string format_double(double x) {
  char tmp[64];
  std::snprintf(tmp, sizeof(tmp), "%.17g", x);
  return std::string(tmp);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open file for writing: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void ensure_directory(const std::string& path) {
  if (path.empty()) return;
  std::filesystem::create_directories(path);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t at = s.find(sep, start);
    if (at == std::string::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, at - start));
    start = at + 1;
  }
  return parts;
}

}  // namespace tinyaction
