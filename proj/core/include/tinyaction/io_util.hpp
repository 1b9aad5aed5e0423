#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tinyaction {

// Little-endian binary encoding helpers. Explicit byte shuffling rather than
// memcpy so the on-disk formats do not depend on host endianness.

void append_u64_le(std::string& out, std::uint64_t x);
void append_f64_le(std::string& out, double x);

std::uint64_t read_u64_le(const std::string& buf, std::size_t& pos);
double read_f64_le(const std::string& buf, std::size_t& pos);

/// Formats a double with 17 significant digits (round-trips exactly).
std::string format_double(double x);

std::string read_file(const std::string& path);

/// Writes via a temp file in the same directory, then renames into place.
void write_file_atomic(const std::string& path, const std::string& content);

void ensure_directory(const std::string& path);

std::vector<std::string> split(const std::string& s, char sep);

}  // namespace tinyaction
