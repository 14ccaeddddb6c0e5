#pragma once

// High-frequency features for hetero-domain alignment.

#include <vector>

#include "weenie/grid.hpp"

namespace weenie {

enum class FeatureOrigin { Source, Target };

struct HfFeatures {
  std::vector<Volume> channels;
  FeatureOrigin origin = FeatureOrigin::Source;
};

/// The four gradient kernels applied to LR images, in channel order:
/// [-1 0 1], its transpose, [-2 -1 0 1 2], its transpose.
std::vector<Kernel2D> hf_gradient_kernels();

/// Correlation response of every slice with k (out(j) = sum_b k(b) x(j + b - c)),
/// circular boundaries.
Volume filter_slices(const Volume& v, const Kernel2D& k);

/// Four gradient channels of an LR source volume.
HfFeatures extract_hf_lr(const Volume& v);

/// HR target volume minus its global mean.
HfFeatures extract_hf_hr(const Volume& v);

enum class TargetReconcile {
  /// Gradient-kernel channel energy of the mean-removed target, matching the
  /// source aggregation.
  GradientEnergy,
  /// Mean-removed intensities compared directly.
  Intensity,
};

/// Single-channel comparable form of a feature set at the given in-plane size.
/// Source features are bicubically resized and their channel energies summed.
/// Target features are resized if needed and then aggregated per target_mode.
/// With standardize set the result is shifted and scaled to zero mean and
/// unit RMS.
Volume reconcile_features(const HfFeatures& f, std::size_t rows, std::size_t cols,
                          bool standardize = true,
                          TargetReconcile target_mode = TargetReconcile::GradientEnergy);

}  // namespace weenie
