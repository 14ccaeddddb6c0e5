#pragma once

// Hetero-domain alignment: Gaussian-kernel similarity between HF features of
// unpaired LR source and HR target volumes, binarized to a one-to-one
// source -> target correspondence.

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "weenie/features.hpp"
#include "weenie/grid.hpp"

namespace weenie {

struct TrainingPair {
  Volume source;  // LR source modality
  Volume target;  // HR target modality
  bool registered = false;
  std::optional<double> kernel;  // similarity that created a virtual pair
};

struct AlignOptions {
  double sigma = 1.0;
  bool standardize = true;
  TargetReconcile target_mode = TargetReconcile::GradientEnergy;
};

struct KernelMatrix {
  Eigen::MatrixXd entries;  // P x Q
  double sigma = 1.0;
};

struct AlignmentMatrix {
  std::vector<std::size_t> match;  // column chosen for each row
  std::size_t cols = 0;

  std::size_t rows() const { return match.size(); }
  Eigen::MatrixXi entries() const;
};

/// (2 pi)^(-3/2) sigma^(-3) exp(-D / (2 sigma^2)).
double gaussian_kernel(double mean_sq_distance, double sigma);

/// Mean squared voxel difference of two equally shaped volumes.
double mean_squared_distance(const Volume& a, const Volume& b);

/// Kernel between two feature sets, compared at the target feature size.
double kernel_value(const HfFeatures& xf, const HfFeatures& yf, const AlignOptions& opt);

KernelMatrix build_kernel_matrix(const std::vector<HfFeatures>& xs,
                                 const std::vector<HfFeatures>& ys, const AlignOptions& opt);

/// Row-wise argmax; ties go to the lowest column index.
AlignmentMatrix binarize_alignment(const KernelMatrix& km);

/// Registered pairs pass through unchanged; every row of the alignment adds a
/// virtual pair (xs[p], ys[match[p]]) carrying its kernel value.
std::vector<TrainingPair> make_virtual_pairs(const std::vector<Volume>& xs,
                                             const std::vector<Volume>& ys,
                                             const AlignmentMatrix& am, const KernelMatrix& km,
                                             const std::vector<TrainingPair>& registered);

struct AlignmentResult {
  KernelMatrix kernels;
  AlignmentMatrix alignment;
  std::vector<TrainingPair> pairs;
};

/// Feature extraction, kernel matrix, binarization and pairing in one call.
AlignmentResult align_unpaired(const std::vector<Volume>& xs, const std::vector<Volume>& ys,
                               const std::vector<TrainingPair>& registered,
                               const AlignOptions& opt = {});

/// Sum over pairs of the squared difference of reconciled HF features.
/// Constant with respect to every trained variable; reported for diagnostics.
double alignment_residual(const std::vector<TrainingPair>& pairs, const AlignOptions& opt = {});

}  // namespace weenie
