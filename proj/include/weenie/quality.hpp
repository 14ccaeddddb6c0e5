#pragma once

// PSNR and SSIM.

#include <limits>
#include <vector>

#include "weenie/grid.hpp"

namespace weenie {

struct SliceMetrics {
  std::size_t index = 0;
  double psnr_db = 0.0;
  double ssim = 0.0;
};

struct MetricReport {
  double psnr_db = 0.0;  // +inf when the volumes are identical
  double ssim = 0.0;
  std::vector<SliceMetrics> slices;
};

/// 10 log10(peak^2 / MSE) over all voxels; +inf for MSE == 0.
double psnr(const Volume& a, const Volume& b, double peak = 1.0);
double psnr(const Slice& a, const Slice& b, double peak = 1.0);

/// Mean local SSIM (11x11 Gaussian window, sigma 1.5, K1 0.01, K2 0.03) over
/// the valid region of each slice, averaged over slices.
double ssim(const Volume& a, const Volume& b, double peak = 1.0);
double ssim(const Slice& a, const Slice& b, double peak = 1.0);

MetricReport evaluate(const Volume& pred, const Volume& ref, double peak = 1.0);

}  // namespace weenie
