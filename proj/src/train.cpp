#include "weenie/train.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <tuple>

#include "weenie/resample.hpp"

namespace weenie {

std::vector<double> MmdWeights::values() const {
  std::vector<double> v(exact.size());
  for (std::size_t i = 0; i < exact.size(); ++i) v[i] = exact[i].value();
  return v;
}

MmdWeights build_mmd_weights(const std::vector<bool>& registered) {
  if (registered.empty()) throw std::invalid_argument("build_mmd_weights: no pairs");
  const auto p = static_cast<long long>(registered.size());
  MmdWeights m;
  m.exact.reserve(registered.size());
  for (bool r : registered) m.exact.push_back(r ? Rational{1, p} : Rational{-1, p * p});
  return m;
}

MmdWeights build_mmd_weights(const std::vector<TrainingPair>& pairs) {
  std::vector<bool> reg;
  reg.reserve(pairs.size());
  for (const auto& p : pairs) reg.push_back(p.registered);
  return build_mmd_weights(reg);
}

namespace {

void check_mapping_args(double beta, double gamma) {
  if (!(beta > 0.0)) throw std::invalid_argument("update_mapping: beta must be > 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("update_mapping: gamma must be >= 0");
}

// Solves W G = C for SPD G.
Eigen::MatrixXd solve_right(const Eigen::MatrixXd& c, const Eigen::MatrixXd& g) {
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) {
    return g.ldlt().solve(c.transpose()).transpose();
  }
  return llt.solve(c.transpose()).transpose();
}

}  // namespace

Eigen::MatrixXd update_mapping(const Eigen::MatrixXd& zx, const Eigen::MatrixXd& zy,
                               std::span<const double> m, double beta, double gamma) {
  check_mapping_args(beta, gamma);
  if (zx.rows() != zy.rows() || zx.cols() != zy.cols()) {
    throw std::invalid_argument("update_mapping: Zx and Zy must have the same shape");
  }
  if (static_cast<std::size_t>(zx.cols()) != m.size()) {
    throw std::invalid_argument("update_mapping: one MMD weight per column required");
  }
  const auto K = zx.rows();
  Eigen::VectorXd scale(zx.cols());
  for (Eigen::Index i = 0; i < zx.cols(); ++i) scale(i) = 1.0 - 0.5 * m[static_cast<std::size_t>(i)];
  const Eigen::MatrixXd c = zy * scale.asDiagonal() * zx.transpose();
  Eigen::MatrixXd g = zx * zx.transpose();
  g.diagonal().array() += gamma / beta;
  if (K == 0) return Eigen::MatrixXd(0, 0);
  return solve_right(c, g);
}

Eigen::MatrixXd update_mapping(std::span<const FeatureMapSet> zx,
                               std::span<const FeatureMapSet> zy, std::span<const double> m,
                               double beta, double gamma) {
  check_mapping_args(beta, gamma);
  if (zx.empty() || zx.size() != zy.size() || zx.size() != m.size()) {
    throw std::invalid_argument("update_mapping: need matching, non-empty map lists");
  }
  const auto K = static_cast<Eigen::Index>(zx.front().k());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(K, K);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(K, K);
  for (std::size_t i = 0; i < zx.size(); ++i) {
    const auto& a = zx[i].coeffs;
    const auto& b = zy[i].coeffs;
    if (a.rows() != K || b.rows() != K || a.cols() != b.cols()) {
      throw std::invalid_argument("update_mapping: inconsistent map shapes");
    }
    c.noalias() += (1.0 - 0.5 * m[i]) * (b * a.transpose());
    g.noalias() += a * a.transpose();
  }
  g.diagonal().array() += gamma / beta;
  return solve_right(c, g);
}

double mapping_objective(const Eigen::MatrixXd& w, const Eigen::MatrixXd& zx,
                         const Eigen::MatrixXd& zy, std::span<const double> m, double beta,
                         double gamma) {
  const Eigen::MatrixXd wz = w * zx;
  double trace = 0.0;
  for (Eigen::Index i = 0; i < zx.cols(); ++i) {
    trace += m[static_cast<std::size_t>(i)] * wz.col(i).dot(zy.col(i));
  }
  return beta * (zy - wz).squaredNorm() + gamma * w.squaredNorm() + beta * trace;
}

void TrainConfig::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  if (d == 0 || d % 2 == 0) throw std::invalid_argument("d must be odd");
  if (slice_stride == 0) throw std::invalid_argument("slice_stride must be >= 1");
  if (!(init_scale >= 0.0)) throw std::invalid_argument("init_scale must be >= 0");
  if (!(lowpass >= 0.0)) throw std::invalid_argument("lowpass must be >= 0");
  if (!(inner.rho > 0.0)) throw std::invalid_argument("inner.rho must be > 0");
  if (inner.max_iters == 0) throw std::invalid_argument("inner.max_iters must be >= 1");
}

std::vector<std::size_t> training_slices(std::size_t depth, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("training_slices: stride must be >= 1");
  if (depth == 0) return {};
  const std::size_t count = (depth - 1) / stride + 1;
  const std::size_t start = (depth - 1 - (count - 1) * stride) / 2;
  std::vector<std::size_t> idx(count);
  for (std::size_t i = 0; i < count; ++i) idx[i] = start + i * stride;
  return idx;
}

std::pair<Slice, Slice> split_frequencies(const Slice& s, double mu) {
  if (mu == 0.0) return {Slice(), s};
  Slice low = tikhonov_lowpass(s, mu);
  Slice high = s;
  for (std::size_t i = 0; i < high.size(); ++i) high.values()[i] -= low.values()[i];
  return {std::move(low), std::move(high)};
}

IntensityMap fit_intensity_map(std::span<const TrainingSample> samples) {
  double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& s : samples) {
    if (s.lx.empty() || s.ly.empty()) continue;
    for (std::size_t i = 0; i < s.lx.size(); ++i) {
      const double a = s.lx.values()[i];
      const double b = s.ly.values()[i];
      n += 1.0;
      sx += a;
      sy += b;
      sxx += a * a;
      sxy += a * b;
    }
  }
  IntensityMap m;
  if (n == 0.0) return m;
  const double var = sxx - sx * sx / n;
  if (var > 1e-12 * n) {
    m.gain = (sxy - sx * sy / n) / var;
    m.offset = (sy - m.gain * sx) / n;
  } else {
    m.gain = 0.0;
    m.offset = sy / n;
  }
  return m;
}

std::vector<TrainingSample> prepare_samples(const std::vector<TrainingPair>& pairs,
                                            const MmdWeights& mmd, const TrainConfig& cfg) {
  if (pairs.empty()) throw std::invalid_argument("prepare_samples: no pairs");
  if (mmd.size() != pairs.size()) throw std::invalid_argument("prepare_samples: weight count");
  std::vector<TrainingSample> out;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& tp = pairs[p];
    if (tp.source.depth() != tp.target.depth()) {
      throw std::invalid_argument("prepare_samples: source and target depth differ");
    }
    const Volume up = resize_to(tp.source, tp.target.rows(), tp.target.cols());
    for (std::size_t z : training_slices(tp.target.depth(), cfg.slice_stride)) {
      TrainingSample s;
      std::tie(s.lx, s.x) = split_frequencies(pad_periodic(up.slice(z), cfg.pad), cfg.lowpass);
      std::tie(s.ly, s.y) = split_frequencies(pad_periodic(tp.target.slice(z), cfg.pad), cfg.lowpass);
      s.mmd = mmd[p];
      s.pair = p;
      s.slice = z;
      out.push_back(std::move(s));
    }
  }
  const auto rows = out.front().y.rows();
  const auto cols = out.front().y.cols();
  for (const auto& s : out) {
    if (s.y.rows() != rows || s.y.cols() != cols) {
      throw std::invalid_argument("prepare_samples: all targets must share an in-plane size");
    }
  }
  return out;
}

namespace {

double squared_diff(const Slice& a, const Slice& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    acc += d * d;
  }
  return acc;
}

double inner_product(const RowMatrix& a, const RowMatrix& b) {
  return (a.array() * b.array()).sum();
}

// Terms of the joint objective that depend on one sample's maps.
double sample_objective(const TrainingSample& s, const FilterBank& fbx, const FilterBank& fby,
                        const FeatureMapSet& zx, const FeatureMapSet& zy,
                        const Eigen::MatrixXd& w, const TrainConfig& cfg) {
  const RowMatrix wz = w * zx.coeffs;
  return reconstruction_error_fourier(s.x, fbx, zx) + reconstruction_error_fourier(s.y, fby, zy) +
         cfg.beta * (zy.coeffs - wz).squaredNorm() + cfg.lambda * (zx.l1() + zy.l1()) +
         cfg.beta * s.mmd * inner_product(wz, zy.coeffs);
}

// Rounds toward zero so no filter norm grows past its projection bound.
void round_to_float(std::vector<double>& v) {
  for (double& x : v) {
    float f = static_cast<float>(x);
    if (std::abs(static_cast<double>(f)) > std::abs(x)) f = std::nextafter(f, 0.0f);
    x = static_cast<double>(f);
  }
}

}  // namespace

ObjectiveTerms joint_objective(std::span<const TrainingSample> samples, const FilterBank& fbx,
                               const FilterBank& fby, std::span<const FeatureMapSet> zx,
                               std::span<const FeatureMapSet> zy, const Eigen::MatrixXd& w,
                               const TrainConfig& cfg, double align_const) {
  if (zx.size() != samples.size() || zy.size() != samples.size()) {
    throw std::invalid_argument("joint_objective: one map set per sample required");
  }
  ObjectiveTerms t;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    t.recon_x += 0.5 * squared_diff(samples[i].x, reconstruct_spatial(fbx, zx[i]));
    t.recon_y += 0.5 * squared_diff(samples[i].y, reconstruct_spatial(fby, zy[i]));
    const RowMatrix wz = w * zx[i].coeffs;
    t.coupling += cfg.beta * (zy[i].coeffs - wz).squaredNorm();
    t.l1 += cfg.lambda * (zx[i].l1() + zy[i].l1());
    t.mmd += cfg.beta * samples[i].mmd * inner_product(wz, zy[i].coeffs);
  }
  t.w_reg = cfg.gamma * w.squaredNorm();
  t.align_const = align_const;
  t.total = t.recon_x + t.recon_y + t.coupling + t.l1 + t.w_reg + t.mmd + t.align_const;
  return t;
}

TrainResult train(const std::vector<TrainingPair>& pairs, const TrainConfig& cfg) {
  cfg.validate();
  if (pairs.empty()) throw std::invalid_argument("train: no training pairs");
  const MmdWeights mmd = build_mmd_weights(pairs);
  const auto samples = prepare_samples(pairs, mmd, cfg);
  const std::size_t rows = samples.front().x.rows();
  const std::size_t cols = samples.front().x.cols();
  if (cfg.d > rows || cfg.d > cols) throw std::invalid_argument("train: d exceeds padded slice");

  AlignOptions aopt;
  aopt.sigma = cfg.sigma;
  const double align_const = alignment_residual(pairs, aopt);

  TrainResult res;
  TrainedModel& model = res.model;
  model.config = cfg;
  model.fbx = random_filter_bank(cfg.k, cfg.d, cfg.seed);
  model.fby = cfg.tied_init ? model.fbx : random_filter_bank(cfg.k, cfg.d, cfg.seed + 1);
  model.low = fit_intensity_map(samples);
  model.w = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(cfg.k),
                                      static_cast<Eigen::Index>(cfg.k));

  std::mt19937_64 rng(cfg.seed + 2);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<FeatureMapSet> zx;
  std::vector<FeatureMapSet> zy;
  zx.reserve(samples.size());
  zy.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    FeatureMapSet m(cfg.k, rows, cols);
    for (Eigen::Index j = 0; j < m.coeffs.size(); ++j) {
      m.coeffs.data()[j] = cfg.init_scale * normal(rng);
    }
    FeatureMapSet my = m;
    my.coeffs = model.w * m.coeffs;
    zx.push_back(std::move(m));
    zy.push_back(std::move(my));
  }

  res.trace.push_back(joint_objective(samples, model.fbx, model.fby, zx, zy, model.w, cfg,
                                      align_const));

  std::vector<Slice> xs;
  std::vector<Slice> ys;
  for (const auto& s : samples) {
    xs.push_back(s.x);
    ys.push_back(s.y);
  }

  SolverConfig inner = cfg.inner;
  inner.lambda = cfg.lambda;
  for (std::size_t it = 0; it < cfg.outer_iters; ++it) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      Coupling coupling{model.w, cfg.beta, samples[i].mmd};
      auto enc = encode_coupled(samples[i].x, samples[i].y, model.fbx, model.fby, coupling,
                                inner, &zx[i], &zy[i]);
      if (!enc.converged) ++res.nonconverged;
      const double before = sample_objective(samples[i], model.fbx, model.fby, zx[i], zy[i],
                                             model.w, cfg);
      const double after = sample_objective(samples[i], model.fbx, model.fby, enc.zx, enc.zy,
                                            model.w, cfg);
      if (after <= before) {
        zx[i] = std::move(enc.zx);
        zy[i] = std::move(enc.zy);
      }
    }
    model.fbx = update_filters(xs, zx, model.fbx, cfg.filter);
    model.fby = update_filters(ys, zy, model.fby, cfg.filter);

    std::vector<double> weights;
    for (const auto& s : samples) weights.push_back(s.mmd);
    model.w = update_mapping(zx, zy, weights, cfg.beta, cfg.gamma);

    res.trace.push_back(joint_objective(samples, model.fbx, model.fby, zx, zy, model.w, cfg,
                                        align_const));
  }

  res.samples = samples;
  res.zx = std::move(zx);
  res.zy = std::move(zy);

  // Stored models hold float32 values, so round here to make saving lossless.
  round_to_float(model.fbx.coeffs());
  round_to_float(model.fby.coeffs());
  model.low.gain = static_cast<double>(static_cast<float>(model.low.gain));
  model.low.offset = static_cast<double>(static_cast<float>(model.low.offset));
  for (Eigen::Index i = 0; i < model.w.size(); ++i) {
    model.w.data()[i] = static_cast<double>(static_cast<float>(model.w.data()[i]));
  }
  return res;
}

}  // namespace weenie
