#pragma once

// Keys bicubic resampling and the LR degradation protocol.

#include "weenie/grid.hpp"

namespace weenie {

struct DegradationSpec {
  double scale = 0.5;
  double kernel_a = -0.5;
};

/// Keys cubic convolution kernel with parameter a.
double keys_kernel(double x, double a = -0.5);

/// Separable bicubic resampling of one slice to an explicit size.
/// Output pixel i samples the input at (i + 0.5) * in / out - 0.5, edges clamped.
Slice resize_slice(const Slice& s, std::size_t rows, std::size_t cols, double a = -0.5);

/// Per-slice resize to an explicit in-plane size; depth untouched.
Volume resize_to(const Volume& v, std::size_t rows, std::size_t cols, double a = -0.5);

/// Per-slice resize by a scale factor; each in-plane dim becomes round(dim * scale).
Volume bicubic_resize(const Volume& v, double scale, double a = -0.5);

/// Canonical LR generator: plain bicubic downsampling, no anti-alias prefilter.
Volume degrade(const Volume& v, const DegradationSpec& spec = {});

}  // namespace weenie
