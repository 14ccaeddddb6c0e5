#include "weenie/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>

namespace weenie {

Slice::Slice(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Slice::Slice(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw std::invalid_argument("Slice: data length does not match rows*cols");
  }
}

bool Slice::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Volume::Volume(std::size_t rows, std::size_t cols, std::size_t depth, double fill)
    : rows_(rows), cols_(cols), slices_(depth, Slice(rows, cols, fill)) {}

Volume::Volume(std::vector<Slice> slices) : slices_(std::move(slices)) {
  if (slices_.empty()) {
    throw std::invalid_argument("Volume: depth must be at least 1");
  }
  rows_ = slices_.front().rows();
  cols_ = slices_.front().cols();
  for (const auto& s : slices_) {
    if (s.rows() != rows_ || s.cols() != cols_) {
      throw std::invalid_argument("Volume: slices must share rows/cols");
    }
  }
}

double Volume::min() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : slices_) {
    for (double v : s.values()) m = std::min(m, v);
  }
  return m;
}

double Volume::max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& s : slices_) {
    for (double v : s.values()) m = std::max(m, v);
  }
  return m;
}

double Volume::mean() const {
  double acc = 0.0;
  for (const auto& s : slices_) {
    acc = std::accumulate(s.values().begin(), s.values().end(), acc);
  }
  return voxel_count() == 0 ? 0.0 : acc / static_cast<double>(voxel_count());
}

namespace {

std::size_t wrap(long long i, std::size_t n) {
  long long m = static_cast<long long>(n);
  long long r = i % m;
  return static_cast<std::size_t>(r < 0 ? r + m : r);
}

// FFTW plans are created once per shape and reused with the new-array
// execute interface. Planning is not thread-safe, execution is.
enum class PlanKind { Forward, Inverse, RealForward, RealInverse };

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(PlanKind kind, std::size_t rows, std::size_t cols) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(kind, rows, cols);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    const int r = static_cast<int>(rows);
    const int c = static_cast<int>(cols);
    const std::size_t half = rows * (cols / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = nullptr;
    switch (kind) {
      case PlanKind::Forward:
      case PlanKind::Inverse: {
        auto* buf = fftw_alloc_complex(rows * cols);
        plan = fftw_plan_dft_2d(r, c, buf, buf,
                                kind == PlanKind::Forward ? FFTW_FORWARD : FFTW_BACKWARD, flags);
        fftw_free(buf);
        break;
      }
      case PlanKind::RealForward: {
        auto* in = fftw_alloc_real(rows * cols);
        auto* out = fftw_alloc_complex(half);
        plan = fftw_plan_dft_r2c_2d(r, c, in, out, flags);
        fftw_free(in);
        fftw_free(out);
        break;
      }
      case PlanKind::RealInverse: {
        auto* in = fftw_alloc_complex(half);
        auto* out = fftw_alloc_real(rows * cols);
        plan = fftw_plan_dft_c2r_2d(r, c, in, out, flags);
        fftw_free(in);
        fftw_free(out);
        break;
      }
    }
    if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<PlanKind, std::size_t, std::size_t>, fftw_plan> plans_;
};

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

void require_nonempty(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("FFT dimensions must be >= 1");
}

}  // namespace

Slice pad_periodic(const Slice& s, std::size_t margin) {
  if (margin == 0) return s;
  const std::size_t rows = s.rows() + 2 * margin;
  const std::size_t cols = s.cols() + 2 * margin;
  Slice out(rows, cols);
  const auto m = static_cast<long long>(margin);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t sr = wrap(static_cast<long long>(r) - m, s.rows());
    for (std::size_t c = 0; c < cols; ++c) {
      out(r, c) = s(sr, wrap(static_cast<long long>(c) - m, s.cols()));
    }
  }
  return out;
}

Slice crop(const Slice& s, std::size_t top, std::size_t left, std::size_t rows, std::size_t cols) {
  if (top + rows > s.rows() || left + cols > s.cols()) {
    throw std::invalid_argument("crop: window exceeds slice");
  }
  Slice out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(&s.values()[(top + r) * s.cols() + left], cols, &out.values()[r * cols]);
  }
  return out;
}

Slice crop(const Slice& s, std::size_t margin) {
  if (2 * margin > s.rows() || 2 * margin > s.cols()) {
    throw std::invalid_argument("crop: margin exceeds slice");
  }
  return crop(s, margin, margin, s.rows() - 2 * margin, s.cols() - 2 * margin);
}

ComplexGrid fft2(const Slice& s) {
  require_nonempty(s.rows(), s.cols());
  ComplexGrid g(s.rows(), s.cols());
  std::copy(s.values().begin(), s.values().end(), g.data.begin());
  auto plan = PlanCache::instance().get(PlanKind::Forward, s.rows(), s.cols());
  fftw_execute_dft(plan, as_fftw(g.data.data()), as_fftw(g.data.data()));
  return g;
}

Slice ifft2(const ComplexGrid& g) {
  require_nonempty(g.rows, g.cols);
  std::vector<Complex> buf = g.data;
  auto plan = PlanCache::instance().get(PlanKind::Inverse, g.rows, g.cols);
  fftw_execute_dft(plan, as_fftw(buf.data()), as_fftw(buf.data()));
  const double scale = 1.0 / static_cast<double>(g.rows * g.cols);
  Slice out(g.rows, g.cols);
  for (std::size_t i = 0; i < buf.size(); ++i) out.values()[i] = buf[i].real() * scale;
  return out;
}

void rfft2_into(std::span<const double> data, std::size_t rows, std::size_t cols,
                std::span<Complex> out) {
  require_nonempty(rows, cols);
  if (data.size() != rows * cols || out.size() != rows * (cols / 2 + 1)) {
    throw std::invalid_argument("rfft2: buffer size mismatch");
  }
  auto plan = PlanCache::instance().get(PlanKind::RealForward, rows, cols);
  // r2c does not modify its input.
  fftw_execute_dft_r2c(plan, const_cast<double*>(data.data()), as_fftw(out.data()));
}

ComplexGrid rfft2(std::span<const double> data, std::size_t rows, std::size_t cols) {
  ComplexGrid g(rows, cols / 2 + 1);
  rfft2_into(data, rows, cols, g.data);
  return g;
}

ComplexGrid rfft2(const Slice& s) { return rfft2(s.data(), s.rows(), s.cols()); }

void irfft2_into(std::span<const Complex> half, std::size_t rows, std::size_t cols,
                 std::span<double> out) {
  require_nonempty(rows, cols);
  if (half.size() != rows * (cols / 2 + 1) || out.size() != rows * cols) {
    throw std::invalid_argument("irfft2: buffer size mismatch");
  }
  // c2r overwrites its input, so work on a copy.
  thread_local std::vector<Complex> scratch;
  scratch.assign(half.begin(), half.end());
  auto plan = PlanCache::instance().get(PlanKind::RealInverse, rows, cols);
  fftw_execute_dft_c2r(plan, as_fftw(scratch.data()), out.data());
  const double scale = 1.0 / static_cast<double>(rows * cols);
  for (double& v : out) v *= scale;
}

Slice irfft2(const ComplexGrid& half, std::size_t cols) {
  if (half.cols != cols / 2 + 1) throw std::invalid_argument("irfft2: column count mismatch");
  Slice out(half.rows, cols);
  irfft2_into(half.data, half.rows, cols, out.data());
  return out;
}

std::vector<double> half_spectrum_weights(std::size_t cols) {
  const std::size_t half = cols / 2 + 1;
  std::vector<double> w(half, 2.0);
  w[0] = 1.0;
  if (cols % 2 == 0) w[half - 1] = 1.0;
  return w;
}

Slice tikhonov_lowpass(const Slice& s, double mu) {
  if (!(mu >= 0.0)) throw std::invalid_argument("tikhonov_lowpass: mu must be >= 0");
  if (mu == 0.0) return s;
  ComplexGrid h = rfft2(s);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t r = 0; r < h.rows; ++r) {
    const double gr = 2.0 - 2.0 * std::cos(two_pi * static_cast<double>(r) / static_cast<double>(s.rows()));
    for (std::size_t c = 0; c < h.cols; ++c) {
      const double gc =
          2.0 - 2.0 * std::cos(two_pi * static_cast<double>(c) / static_cast<double>(s.cols()));
      h(r, c) /= 1.0 + mu * (gr + gc);
    }
  }
  return irfft2(h, s.cols());
}

Slice embed_kernel(const Kernel2D& f, std::size_t rows, std::size_t cols) {
  if (f.rows > rows || f.cols > cols) {
    throw std::invalid_argument("filter support exceeds slice size");
  }
  Slice out(rows, cols);
  const auto cr = static_cast<long long>(f.rows / 2);
  const auto cc = static_cast<long long>(f.cols / 2);
  for (std::size_t a = 0; a < f.rows; ++a) {
    for (std::size_t b = 0; b < f.cols; ++b) {
      out(wrap(static_cast<long long>(a) - cr, rows), wrap(static_cast<long long>(b) - cc, cols)) +=
          f(a, b);
    }
  }
  return out;
}

Slice conv_spatial(const Slice& s, const Kernel2D& f) {
  if (f.rows > s.rows() || f.cols > s.cols()) {
    throw std::invalid_argument("conv_spatial: filter support exceeds slice size");
  }
  const std::size_t rows = s.rows();
  const std::size_t cols = s.cols();
  const auto cr = static_cast<long long>(f.rows / 2);
  const auto cc = static_cast<long long>(f.cols / 2);
  Slice out(rows, cols);
  std::vector<std::size_t> colmap(cols);
  for (std::size_t a = 0; a < f.rows; ++a) {
    for (std::size_t b = 0; b < f.cols; ++b) {
      const double w = f(a, b);
      if (w == 0.0) continue;
      const long long dr = static_cast<long long>(a) - cr;
      const long long dc = static_cast<long long>(b) - cc;
      for (std::size_t j = 0; j < cols; ++j) colmap[j] = wrap(static_cast<long long>(j) - dc, cols);
      for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t si = wrap(static_cast<long long>(i) - dr, rows);
        const double* src = &s.values()[si * cols];
        double* dst = &out.values()[i * cols];
        for (std::size_t j = 0; j < cols; ++j) dst[j] += w * src[colmap[j]];
      }
    }
  }
  return out;
}

ComplexGrid conv_fourier(const ComplexGrid& s_hat, const ComplexGrid& f_hat) {
  if (s_hat.rows != f_hat.rows || s_hat.cols != f_hat.cols) {
    throw std::invalid_argument("conv_fourier: dimension mismatch");
  }
  ComplexGrid out(s_hat.rows, s_hat.cols);
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = s_hat.data[i] * f_hat.data[i];
  return out;
}

}  // namespace weenie
