#pragma once

// Joint training of source/target filter banks and the cross-domain mapping
// by alternating minimization over feature maps, filters and W.

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "weenie/align.hpp"
#include "weenie/csc.hpp"
#include "weenie/grid.hpp"

namespace weenie {

struct Rational {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Per-pair MMD weights: 1/P for registered pairs, -1/P^2 for virtual pairs.
struct MmdWeights {
  std::vector<Rational> exact;

  std::size_t size() const { return exact.size(); }
  double operator[](std::size_t i) const { return exact[i].value(); }
  std::vector<double> values() const;
};

MmdWeights build_mmd_weights(const std::vector<TrainingPair>& pairs);
MmdWeights build_mmd_weights(const std::vector<bool>& registered);

/// W = (Zy Zx^T - R)(Zx Zx^T + (gamma/beta) I)^{-1}, R = 1/2 Zy diag(m) Zx^T.
/// zx, zy are K x N; m holds one weight per column.
Eigen::MatrixXd update_mapping(const Eigen::MatrixXd& zx, const Eigen::MatrixXd& zy,
                               std::span<const double> m, double beta, double gamma);

/// Same minimizer accumulated over per-sample K x N_i map sets, each with a
/// single weight broadcast over its positions.
Eigen::MatrixXd update_mapping(std::span<const FeatureMapSet> zx,
                               std::span<const FeatureMapSet> zy, std::span<const double> m,
                               double beta, double gamma);

/// The quadratic minimized by update_mapping.
double mapping_objective(const Eigen::MatrixXd& w, const Eigen::MatrixXd& zx,
                         const Eigen::MatrixXd& zy, std::span<const double> m, double beta,
                         double gamma);

struct TrainConfig {
  double lambda = 0.05;
  double beta = 0.1;
  double gamma = 0.15;
  double sigma = 1.0;
  std::size_t k = 64;
  std::size_t d = 11;
  std::size_t outer_iters = 10;
  std::size_t pad = 8;
  std::size_t slice_stride = 1;
  std::uint64_t seed = 0;
  /// Standard deviation of the Gaussian map initialization.
  double init_scale = 0.01;
  /// Strength of the Tikhonov low-pass split; sparse coding then runs on the
  /// high-pass residual. 0 codes the full slices.
  double lowpass = 5.0;
  /// Start both banks from the same random draw so atom k means the same
  /// structure in each domain.
  bool tied_init = true;
  SolverConfig inner{};
  FilterUpdateConfig filter{};

  /// Throws std::invalid_argument on the first violated constraint.
  void validate() const;
};

/// One 2D training sample: padded source (upscaled to the target size) and
/// padded target slices plus the MMD weight of the pair they came from.
struct TrainingSample {
  Slice x;   // coded part of the source (high-pass when the split is on)
  Slice y;   // coded part of the target
  Slice lx;  // low-pass source (empty when the split is off)
  Slice ly;  // low-pass target
  double mmd = 0.0;
  std::size_t pair = 0;
  std::size_t slice = 0;
};

/// Slice indices used for training: every stride-th slice, centred in depth.
std::vector<std::size_t> training_slices(std::size_t depth, std::size_t stride);

std::vector<TrainingSample> prepare_samples(const std::vector<TrainingPair>& pairs,
                                            const MmdWeights& mmd, const TrainConfig& cfg);

/// Affine map carrying the source low-pass component to the target one.
struct IntensityMap {
  double gain = 1.0;
  double offset = 0.0;
  friend bool operator==(const IntensityMap&, const IntensityMap&) = default;
};

/// Least-squares fit of ly ~ gain * lx + offset over all samples.
IntensityMap fit_intensity_map(std::span<const TrainingSample> samples);

/// Splits a slice into (low-pass, residual); mu == 0 gives (empty, s).
std::pair<Slice, Slice> split_frequencies(const Slice& s, double mu);

struct TrainedModel {
  FilterBank fbx;
  FilterBank fby;
  Eigen::MatrixXd w;
  IntensityMap low;
  TrainConfig config;
  std::string provenance;

  std::size_t k() const { return fbx.k(); }
  std::size_t d() const { return fbx.d(); }
};

struct ObjectiveTerms {
  double total = 0.0;
  double recon_x = 0.0;
  double recon_y = 0.0;
  double coupling = 0.0;
  double l1 = 0.0;
  double w_reg = 0.0;
  double mmd = 0.0;
  double align_const = 0.0;
};

/// Every term of the joint objective, evaluated in the spatial domain.
ObjectiveTerms joint_objective(std::span<const TrainingSample> samples, const FilterBank& fbx,
                               const FilterBank& fby, std::span<const FeatureMapSet> zx,
                               std::span<const FeatureMapSet> zy, const Eigen::MatrixXd& w,
                               const TrainConfig& cfg, double align_const = 0.0);

struct TrainResult {
  TrainedModel model;
  std::vector<ObjectiveTerms> trace;  // entry 0 is the initialization
  std::size_t nonconverged = 0;       // inner solves that hit max_iters
  std::vector<TrainingSample> samples;
  std::vector<FeatureMapSet> zx;
  std::vector<FeatureMapSet> zy;
};

TrainResult train(const std::vector<TrainingPair>& pairs, const TrainConfig& cfg);

}  // namespace weenie
