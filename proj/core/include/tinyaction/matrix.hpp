#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace tinyaction {

/// Dense row-major matrix of doubles. 64-bit floats everywhere; the tight
/// finite-difference tolerances in the test suite assume it.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0)
      : rows(r), cols(c), v(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {
    if (r < 0 || c < 0) throw std::invalid_argument("Mat: negative dimension");
  }

  double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
  const double& at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }

  double* row(int r) { return v.data() + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const { return v.data() + static_cast<std::size_t>(r) * cols; }

  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }

  bool all_finite() const {
    for (double x : v) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  }
};

inline void require_same_shape(const Mat& a, const Mat& b, const char* what) {
  if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

}  // namespace tinyaction
