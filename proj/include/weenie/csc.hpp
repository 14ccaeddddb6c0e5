#pragma once

// Convolutional sparse coding: ADMM feature-map inference in the Fourier
// domain (plain and coupled) and filter learning under support and norm
// constraints.
//
// Feature maps have the size of the (padded) slice they encode. Convolution
// is circular everywhere; filters are d x d with their centre at (d/2, d/2).

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "weenie/grid.hpp"

namespace weenie {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class FilterBank {
 public:
  FilterBank() = default;
  FilterBank(std::size_t k, std::size_t d);
  FilterBank(std::size_t k, std::size_t d, std::vector<double> coeffs);

  std::size_t k() const { return k_; }
  std::size_t d() const { return d_; }

  std::span<double> taps(std::size_t i) { return {coeffs_.data() + i * d_ * d_, d_ * d_}; }
  std::span<const double> taps(std::size_t i) const {
    return {coeffs_.data() + i * d_ * d_, d_ * d_};
  }
  const std::vector<double>& coeffs() const { return coeffs_; }
  std::vector<double>& coeffs() { return coeffs_; }

  Kernel2D filter(std::size_t i) const;
  double norm(std::size_t i) const;
  double max_norm() const;

  friend bool operator==(const FilterBank&, const FilterBank&) = default;

 private:
  std::size_t k_ = 0;
  std::size_t d_ = 0;
  std::vector<double> coeffs_;
};

/// Gaussian-noise filters scaled to unit norm.
FilterBank random_filter_bank(std::size_t k, std::size_t d, std::uint64_t seed);

/// K sparse coefficient maps, one row per filter, each rows x cols row-major.
struct FeatureMapSet {
  std::size_t rows = 0;
  std::size_t cols = 0;
  RowMatrix coeffs;

  FeatureMapSet() = default;
  FeatureMapSet(std::size_t k, std::size_t r, std::size_t c)
      : rows(r), cols(c), coeffs(RowMatrix::Zero(static_cast<Eigen::Index>(k),
                                                  static_cast<Eigen::Index>(r * c))) {}

  std::size_t k() const { return static_cast<std::size_t>(coeffs.rows()); }
  Slice map(std::size_t i) const;
  double l1() const { return coeffs.cwiseAbs().sum(); }
};

struct SolverConfig {
  double lambda = 0.05;
  double rho = 1.0;
  std::size_t max_iters = 60;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  std::size_t coupled_passes = 1;
};

struct FilterUpdateConfig {
  std::size_t max_iters = 100;
  double tol = 1e-9;
  double ridge = 1e-8;
  /// ADMM penalty relative to the mean diagonal of the per-frequency Gram matrices.
  double rho_scale = 1.0;
};

struct EncodeResult {
  FeatureMapSet maps;
  bool converged = false;
  std::size_t iterations = 0;
  /// Objective of each ADMM iterate (filled when requested).
  std::vector<double> trace;
};

/// Coupling of one side of a source/target pair to the other:
/// beta * ||Zy - W Zx||^2 + beta * mmd_weight * <W Zx, Zy>.
struct Coupling {
  Eigen::MatrixXd w;
  double beta = 0.0;
  double mmd_weight = 0.0;
};

struct CoupledResult {
  FeatureMapSet zx;
  FeatureMapSet zy;
  bool converged = false;
};

double soft_threshold(double v, double t);
std::vector<double> soft_threshold(std::span<const double> v, double t);

/// Minimizes 1/2 ||s - sum_k f_k * z_k||^2 + lambda sum_k ||z_k||_1.
/// Starts from `warm` when given, otherwise from zero maps.
EncodeResult encode(const Slice& s, const FilterBank& fb, const SolverConfig& cfg,
                    const FeatureMapSet* warm = nullptr, bool record_trace = false);

/// Alternating coupled encoding: a Zx sweep with Zy fixed, then a Zy sweep
/// with Zx fixed, cfg.coupled_passes times.
CoupledResult encode_coupled(const Slice& sx, const Slice& sy, const FilterBank& fbx,
                             const FilterBank& fby, const Coupling& coupling,
                             const SolverConfig& cfg, const FeatureMapSet* warm_x = nullptr,
                             const FeatureMapSet* warm_y = nullptr);

/// Least-squares filter update with maps held fixed, solved by ADMM over a
/// frequency-domain filter and a support/unit-ball constrained copy. Returns
/// `prev` when every map is zero or when the update would not lower the
/// reconstruction error.
FilterBank update_filters(std::span<const Slice> slices, std::span<const FeatureMapSet> maps,
                          const FilterBank& prev, const FilterUpdateConfig& cfg = {});

/// sum_k f_k * z_k by direct spatial summation.
Slice reconstruct_spatial(const FilterBank& fb, const FeatureMapSet& maps);
/// sum_k f_k * z_k through the FFT.
Slice reconstruct(const FilterBank& fb, const FeatureMapSet& maps);

/// 1/2 ||s - sum_k f_k * z_k||^2 + lambda sum_k ||z_k||_1, evaluated spatially.
double csc_objective(const Slice& s, const FilterBank& fb, const FeatureMapSet& maps,
                     double lambda);

/// Half-spectrum reconstruction error 1/2 ||s - sum_k f_k * z_k||^2.
double reconstruction_error_fourier(const Slice& s, const FilterBank& fb,
                                    const FeatureMapSet& maps);

}  // namespace weenie
