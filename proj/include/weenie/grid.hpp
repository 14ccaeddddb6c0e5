#pragma once

// Core 2D/3D grid types, periodic padding and circular convolution.
//
// FFT convention: the forward transform is unnormalized and the inverse is
// scaled by 1/(rows*cols), so ifft2(fft2(s)) == s.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace weenie {

using Complex = std::complex<double>;

/// A single rows x cols intensity image stored row-major.
class Slice {
 public:
  Slice() = default;
  Slice(std::size_t rows, std::size_t cols, double fill = 0.0);
  Slice(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool all_finite() const;

  friend bool operator==(const Slice&, const Slice&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// A stack of equally sized slices (rows x cols x depth).
class Volume {
 public:
  Volume() = default;
  Volume(std::size_t rows, std::size_t cols, std::size_t depth, double fill = 0.0);
  explicit Volume(std::vector<Slice> slices);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t depth() const { return slices_.size(); }
  std::size_t voxel_count() const { return rows_ * cols_ * slices_.size(); }

  Slice& slice(std::size_t z) { return slices_[z]; }
  const Slice& slice(std::size_t z) const { return slices_[z]; }
  std::vector<Slice>& slices() { return slices_; }
  const std::vector<Slice>& slices() const { return slices_; }

  double& operator()(std::size_t r, std::size_t c, std::size_t z) { return slices_[z](r, c); }
  double operator()(std::size_t r, std::size_t c, std::size_t z) const { return slices_[z](r, c); }

  double min() const;
  double max() const;
  double mean() const;

  friend bool operator==(const Volume&, const Volume&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Slice> slices_;
};

/// Complex coefficients on a rows x cols grid, row-major. Half spectra
/// produced by rfft2 have cols == n/2 + 1 of the real grid's n.
struct ComplexGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Complex> data;

  ComplexGrid() = default;
  ComplexGrid(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  Complex& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  Complex operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Square d x d filter kernel, row-major, centre at (d/2, d/2).
struct Kernel2D {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> taps;

  double operator()(std::size_t r, std::size_t c) const { return taps[r * cols + c]; }
};

Slice pad_periodic(const Slice& s, std::size_t margin);
Slice crop(const Slice& s, std::size_t margin);
Slice crop(const Slice& s, std::size_t top, std::size_t left, std::size_t rows, std::size_t cols);

ComplexGrid fft2(const Slice& s);
Slice ifft2(const ComplexGrid& g);

// Real-input transforms on the non-redundant half spectrum.
ComplexGrid rfft2(std::span<const double> data, std::size_t rows, std::size_t cols);
ComplexGrid rfft2(const Slice& s);
void rfft2_into(std::span<const double> data, std::size_t rows, std::size_t cols,
                std::span<Complex> out);
Slice irfft2(const ComplexGrid& half, std::size_t cols);
void irfft2_into(std::span<const Complex> half, std::size_t rows, std::size_t cols,
                 std::span<double> out);

/// Weight of each half-spectrum column in a full-spectrum sum
/// (1 for the DC and Nyquist columns, 2 otherwise).
std::vector<double> half_spectrum_weights(std::size_t cols);

/// Places a centred kernel on a rows x cols grid with wrap-around so that
/// circular convolution with the embedded grid equals conv_spatial.
Slice embed_kernel(const Kernel2D& f, std::size_t rows, std::size_t cols);

/// Circular 2D convolution by direct summation:
/// out(i,j) = sum_{a,b} f(a,b) * s(i - (a - ca), j - (b - cb)), indices wrapped.
Slice conv_spatial(const Slice& s, const Kernel2D& f);

/// Gradient-regularized (Tikhonov) low-pass: argmin_l ||s - l||^2 + mu ||grad l||^2
/// with circular forward differences, solved in the Fourier domain.
/// mu == 0 returns s.
Slice tikhonov_lowpass(const Slice& s, double mu);

/// Elementwise product of two spectra.
ComplexGrid conv_fourier(const ComplexGrid& s_hat, const ComplexGrid& f_hat);

}  // namespace weenie
