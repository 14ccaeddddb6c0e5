#include "weenie/resample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace weenie {

double keys_kernel(double x, double a) {
  const double t = std::abs(x);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

namespace {

struct Tap {
  std::size_t index[4];
  double weight[4];
};

// Four clamped taps per output coordinate along one axis.
std::vector<Tap> axis_taps(std::size_t in, std::size_t out, double a) {
  std::vector<Tap> taps(out);
  const double ratio = static_cast<double>(in) / static_cast<double>(out);
  const auto last = static_cast<long long>(in) - 1;
  for (std::size_t i = 0; i < out; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * ratio - 0.5;
    const double base = std::floor(x);
    for (int k = 0; k < 4; ++k) {
      const long long j = static_cast<long long>(base) - 1 + k;
      taps[i].index[k] = static_cast<std::size_t>(std::clamp(j, 0LL, last));
      taps[i].weight[k] = keys_kernel(x - static_cast<double>(j), a);
    }
  }
  return taps;
}

}  // namespace

Slice resize_slice(const Slice& s, std::size_t rows, std::size_t cols, double a) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("resize: output dims must be >= 1");
  if (rows == s.rows() && cols == s.cols()) return s;

  const auto row_taps = axis_taps(s.rows(), rows, a);
  const auto col_taps = axis_taps(s.cols(), cols, a);

  // Horizontal pass, then vertical.
  Slice tmp(s.rows(), cols);
  for (std::size_t r = 0; r < s.rows(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const Tap& t = col_taps[c];
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += t.weight[k] * s(r, t.index[k]);
      tmp(r, c) = acc;
    }
  }
  Slice out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const Tap& t = row_taps[r];
    for (std::size_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += t.weight[k] * tmp(t.index[k], c);
      out(r, c) = acc;
    }
  }
  return out;
}

Volume resize_to(const Volume& v, std::size_t rows, std::size_t cols, double a) {
  std::vector<Slice> slices;
  slices.reserve(v.depth());
  for (const auto& s : v.slices()) slices.push_back(resize_slice(s, rows, cols, a));
  return Volume(std::move(slices));
}

Volume bicubic_resize(const Volume& v, double scale, double a) {
  if (!(scale > 0.0)) throw std::invalid_argument("bicubic_resize: scale must be > 0");
  const auto rows = static_cast<std::size_t>(std::llround(static_cast<double>(v.rows()) * scale));
  const auto cols = static_cast<std::size_t>(std::llround(static_cast<double>(v.cols()) * scale));
  return resize_to(v, rows, cols, a);
}

Volume degrade(const Volume& v, const DegradationSpec& spec) {
  return bicubic_resize(v, spec.scale, spec.kernel_a);
}

}  // namespace weenie
