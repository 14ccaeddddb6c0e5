#include "weenie/align.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace weenie {

Eigen::MatrixXi AlignmentMatrix::entries() const {
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(match.size()),
                                            static_cast<Eigen::Index>(cols));
  for (std::size_t p = 0; p < match.size(); ++p) {
    a(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(match[p])) = 1;
  }
  return a;
}

double gaussian_kernel(double mean_sq_distance, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("kernel: sigma must be > 0");
  const double norm = std::sqrt(2.0 * std::numbers::pi) * sigma;
  return std::exp(-mean_sq_distance / (2.0 * sigma * sigma)) / (norm * norm * norm);
}

double mean_squared_distance(const Volume& a, const Volume& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.depth() != b.depth()) {
    throw std::invalid_argument("mean_squared_distance: shape mismatch");
  }
  double acc = 0.0;
  for (std::size_t z = 0; z < a.depth(); ++z) {
    const auto& x = a.slice(z).values();
    const auto& y = b.slice(z).values();
    for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
  }
  return acc / static_cast<double>(a.voxel_count());
}

namespace {

std::pair<std::size_t, std::size_t> reference_size(const HfFeatures& yf) {
  if (yf.channels.empty()) throw std::invalid_argument("kernel: empty feature set");
  return {yf.channels.front().rows(), yf.channels.front().cols()};
}

}  // namespace

double kernel_value(const HfFeatures& xf, const HfFeatures& yf, const AlignOptions& opt) {
  if (!(opt.sigma > 0.0)) throw std::invalid_argument("kernel: sigma must be > 0");
  const auto [rows, cols] = reference_size(yf);
  const Volume a = reconcile_features(xf, rows, cols, opt.standardize, opt.target_mode);
  const Volume b = reconcile_features(yf, rows, cols, opt.standardize, opt.target_mode);
  return gaussian_kernel(mean_squared_distance(a, b), opt.sigma);
}

KernelMatrix build_kernel_matrix(const std::vector<HfFeatures>& xs,
                                 const std::vector<HfFeatures>& ys, const AlignOptions& opt) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("build_kernel_matrix: empty set");
  if (!(opt.sigma > 0.0)) throw std::invalid_argument("kernel: sigma must be > 0");
  const auto [rows, cols] = reference_size(ys.front());

  std::vector<Volume> rx;
  std::vector<Volume> ry;
  for (const auto& x : xs) rx.push_back(reconcile_features(x, rows, cols, opt.standardize, opt.target_mode));
  for (const auto& y : ys) ry.push_back(reconcile_features(y, rows, cols, opt.standardize, opt.target_mode));

  KernelMatrix km;
  km.sigma = opt.sigma;
  km.entries.resize(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
  for (std::size_t p = 0; p < rx.size(); ++p) {
    for (std::size_t q = 0; q < ry.size(); ++q) {
      km.entries(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) =
          gaussian_kernel(mean_squared_distance(rx[p], ry[q]), opt.sigma);
    }
  }
  return km;
}

AlignmentMatrix binarize_alignment(const KernelMatrix& km) {
  if (km.entries.rows() == 0 || km.entries.cols() == 0) {
    throw std::invalid_argument("binarize_alignment: empty kernel matrix");
  }
  AlignmentMatrix am;
  am.cols = static_cast<std::size_t>(km.entries.cols());
  am.match.resize(static_cast<std::size_t>(km.entries.rows()));
  for (Eigen::Index p = 0; p < km.entries.rows(); ++p) {
    Eigen::Index best = 0;
    for (Eigen::Index q = 1; q < km.entries.cols(); ++q) {
      if (km.entries(p, q) > km.entries(p, best)) best = q;
    }
    am.match[static_cast<std::size_t>(p)] = static_cast<std::size_t>(best);
  }
  return am;
}

std::vector<TrainingPair> make_virtual_pairs(const std::vector<Volume>& xs,
                                             const std::vector<Volume>& ys,
                                             const AlignmentMatrix& am, const KernelMatrix& km,
                                             const std::vector<TrainingPair>& registered) {
  if (am.rows() != xs.size()) {
    throw std::invalid_argument("make_virtual_pairs: alignment rows must equal source count");
  }
  std::vector<TrainingPair> out;
  out.reserve(registered.size() + xs.size());
  for (const auto& r : registered) {
    TrainingPair p = r;
    p.registered = true;
    out.push_back(std::move(p));
  }
  for (std::size_t p = 0; p < xs.size(); ++p) {
    const std::size_t q = am.match[p];
    if (q >= ys.size()) throw std::invalid_argument("make_virtual_pairs: target index out of range");
    TrainingPair tp;
    tp.source = xs[p];
    tp.target = ys[q];
    tp.registered = false;
    tp.kernel = km.entries(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
    out.push_back(std::move(tp));
  }
  return out;
}

AlignmentResult align_unpaired(const std::vector<Volume>& xs, const std::vector<Volume>& ys,
                               const std::vector<TrainingPair>& registered,
                               const AlignOptions& opt) {
  AlignmentResult res;
  if (xs.empty()) {
    res.pairs = make_virtual_pairs(xs, ys, res.alignment, res.kernels, registered);
    return res;
  }
  std::vector<HfFeatures> xf;
  std::vector<HfFeatures> yf;
  for (const auto& x : xs) xf.push_back(extract_hf_lr(x));
  for (const auto& y : ys) yf.push_back(extract_hf_hr(y));
  res.kernels = build_kernel_matrix(xf, yf, opt);
  res.alignment = binarize_alignment(res.kernels);
  res.pairs = make_virtual_pairs(xs, ys, res.alignment, res.kernels, registered);
  return res;
}

double alignment_residual(const std::vector<TrainingPair>& pairs, const AlignOptions& opt) {
  double total = 0.0;
  for (const auto& p : pairs) {
    const auto xf = extract_hf_lr(p.source);
    const auto yf = extract_hf_hr(p.target);
    const Volume a = reconcile_features(xf, p.target.rows(), p.target.cols(), opt.standardize, opt.target_mode);
    const Volume b = reconcile_features(yf, p.target.rows(), p.target.cols(), opt.standardize, opt.target_mode);
    total += mean_squared_distance(a, b) * static_cast<double>(a.voxel_count());
  }
  return total;
}

}  // namespace weenie
