#include "weenie/csc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace weenie {

namespace {

void check_shape(std::size_t k, std::size_t d) {
  if (k == 0 || d % 2 == 0) throw std::invalid_argument("FilterBank: need k >= 1 and odd d");
}

}  // namespace

FilterBank::FilterBank(std::size_t k, std::size_t d) : k_(k), d_(d), coeffs_(k * d * d, 0.0) {
  check_shape(k, d);
}

FilterBank::FilterBank(std::size_t k, std::size_t d, std::vector<double> coeffs)
    : k_(k), d_(d), coeffs_(std::move(coeffs)) {
  check_shape(k, d);
  if (coeffs_.size() != k_ * d_ * d_) {
    throw std::invalid_argument("FilterBank: coefficient count must be k*d*d");
  }
}

Kernel2D FilterBank::filter(std::size_t i) const {
  auto t = taps(i);
  return Kernel2D{d_, d_, std::vector<double>(t.begin(), t.end())};
}

double FilterBank::norm(std::size_t i) const {
  double acc = 0.0;
  for (double v : taps(i)) acc += v * v;
  return std::sqrt(acc);
}

double FilterBank::max_norm() const {
  double m = 0.0;
  for (std::size_t i = 0; i < k_; ++i) m = std::max(m, norm(i));
  return m;
}

FilterBank random_filter_bank(std::size_t k, std::size_t d, std::uint64_t seed) {
  if (k == 0 || d == 0) throw std::invalid_argument("random_filter_bank: k and d must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  FilterBank fb(k, d);
  for (std::size_t i = 0; i < k; ++i) {
    auto t = fb.taps(i);
    for (double& v : t) v = normal(rng);
    const double n = fb.norm(i);
    for (double& v : t) v /= n;
  }
  return fb;
}

Slice FeatureMapSet::map(std::size_t i) const {
  const auto row = coeffs.row(static_cast<Eigen::Index>(i));
  return Slice(rows, cols, std::vector<double>(row.data(), row.data() + row.size()));
}

double soft_threshold(double v, double t) {
  if (t < 0.0) throw std::invalid_argument("soft_threshold: threshold must be >= 0");
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

std::vector<double> soft_threshold(std::span<const double> v, double t) {
  if (t < 0.0) throw std::invalid_argument("soft_threshold: threshold must be >= 0");
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [t](double x) { return soft_threshold(x, t); });
  return out;
}

namespace {

using ComplexRowMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct GridShape {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t pixels() const { return rows * cols; }
  std::size_t freqs() const { return rows * (cols / 2 + 1); }
};

// Real view of a row-major complex K x F matrix as K x 2F (re/im interleaved).
Eigen::Map<RowMatrix> real_view(ComplexRowMatrix& m) {
  return {reinterpret_cast<double*>(m.data()), m.rows(), 2 * m.cols()};
}

// Per-channel half-spectrum transforms of K x N spatial rows.
ComplexRowMatrix forward_rows(const RowMatrix& x, const GridShape& g) {
  ComplexRowMatrix out(x.rows(), static_cast<Eigen::Index>(g.freqs()));
  for (Eigen::Index k = 0; k < x.rows(); ++k) {
    rfft2_into({x.row(k).data(), g.pixels()}, g.rows, g.cols,
               {out.row(k).data(), g.freqs()});
  }
  return out;
}

void inverse_rows(const ComplexRowMatrix& x, const GridShape& g, RowMatrix& out) {
  out.resize(x.rows(), static_cast<Eigen::Index>(g.pixels()));
  for (Eigen::Index k = 0; k < x.rows(); ++k) {
    irfft2_into({x.row(k).data(), g.freqs()}, g.rows, g.cols, {out.row(k).data(), g.pixels()});
  }
}

std::size_t wrap_index(long long i, std::size_t n) {
  const auto m = static_cast<long long>(n);
  const long long r = i % m;
  return static_cast<std::size_t>(r < 0 ? r + m : r);
}

// Grid positions of the d x d support of a centred filter.
std::vector<std::size_t> support_indices(std::size_t d, const GridShape& g) {
  if (d > g.rows || d > g.cols) throw std::invalid_argument("filter support exceeds slice size");
  std::vector<std::size_t> idx(d * d);
  const auto c = static_cast<long long>(d / 2);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      idx[a * d + b] = wrap_index(static_cast<long long>(a) - c, g.rows) * g.cols +
                       wrap_index(static_cast<long long>(b) - c, g.cols);
    }
  }
  return idx;
}

RowMatrix embed_bank(const FilterBank& fb, const GridShape& g,
                     const std::vector<std::size_t>& support) {
  RowMatrix out = RowMatrix::Zero(static_cast<Eigen::Index>(fb.k()),
                                  static_cast<Eigen::Index>(g.pixels()));
  for (std::size_t k = 0; k < fb.k(); ++k) {
    auto t = fb.taps(k);
    for (std::size_t j = 0; j < support.size(); ++j) {
      out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(support[j])) += t[j];
    }
  }
  return out;
}

ComplexRowMatrix filter_spectra(const FilterBank& fb, const GridShape& g) {
  return forward_rows(embed_bank(fb, g, support_indices(fb.d(), g)), g);
}

std::vector<double> frequency_weights(const GridShape& g) {
  const auto col_w = half_spectrum_weights(g.cols);
  const std::size_t hc = g.cols / 2 + 1;
  std::vector<double> w(g.freqs());
  for (std::size_t f = 0; f < w.size(); ++f) w[f] = col_w[f % hc];
  return w;
}

// 1/2 ||s - sum_k f_k * z_k||^2 from spectra (Parseval with the half-spectrum weights).
double spectral_residual(const std::vector<Complex>& s_hat, const ComplexRowMatrix& f_hat,
                         const ComplexRowMatrix& z_hat, const std::vector<double>& weights,
                         std::size_t pixels) {
  double acc = 0.0;
  const Eigen::Index freqs = f_hat.cols();
  for (Eigen::Index f = 0; f < freqs; ++f) {
    Complex r = s_hat[static_cast<std::size_t>(f)];
    for (Eigen::Index k = 0; k < f_hat.rows(); ++k) r -= f_hat(k, f) * z_hat(k, f);
    acc += weights[static_cast<std::size_t>(f)] * std::norm(r);
  }
  return 0.5 * acc / static_cast<double>(pixels);
}

// Frequency-independent quadratic 1/2 z^T H z - g^T z acting at every pixel.
struct Quadratic {
  bool dense = false;
  double h = 0.0;
  Eigen::MatrixXd hmat;
  RowMatrix g;  // K x N or empty
};

double quadratic_value(const Quadratic& q, const RowMatrix& u) {
  double v = 0.0;
  if (q.dense) {
    v += 0.5 * (u.array() * (q.hmat * u).array()).sum();
  } else if (q.h != 0.0) {
    v += 0.5 * q.h * u.squaredNorm();
  }
  if (q.g.size() != 0) v -= (q.g.array() * u.array()).sum();
  return v;
}

struct SweepResult {
  RowMatrix u;
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<double> trace;
};

// ADMM for min_z 1/2 ||s - sum_k f_k * z_k||^2 + Q(z) + lambda ||z||_1 with the
// split z = u. The z-step is a per-frequency K x K solve of
// (conj(f) f^T + H + rho I) z = conj(f) s + g + rho (u - eta), done with the
// Sherman-Morrison identity around the frequency-independent A = H + rho I.
SweepResult admm_sweep(const Slice& s, const ComplexRowMatrix& f_hat, const Quadratic& q,
                       double lambda, double rho, std::size_t max_iters, double tol,
                       const RowMatrix* warm, bool record_trace) {
  const GridShape g{s.rows(), s.cols()};
  const auto K = f_hat.rows();
  const auto F = static_cast<Eigen::Index>(g.freqs());
  const auto N = static_cast<Eigen::Index>(g.pixels());

  std::vector<Complex> s_hat(g.freqs());
  rfft2_into(s.data(), g.rows, g.cols, s_hat);
  const auto weights = frequency_weights(g);

  // A^{-1} applied to a K x F spectrum.
  Eigen::MatrixXd a_inv;
  double a_scalar = 0.0;
  if (q.dense) {
    Eigen::MatrixXd a = q.hmat + rho * Eigen::MatrixXd::Identity(K, K);
    a_inv = a.llt().solve(Eigen::MatrixXd::Identity(K, K));
  } else {
    a_scalar = 1.0 / (q.h + rho);
  }
  auto apply_a_inv = [&](ComplexRowMatrix& m) {
    if (q.dense) {
      RowMatrix tmp = a_inv * real_view(m);
      real_view(m) = tmp;
    } else {
      m *= a_scalar;
    }
  };

  // p_f = A^{-1} conj(f_f), denom_f = 1 + f_f^T p_f.
  ComplexRowMatrix p = f_hat.conjugate();
  apply_a_inv(p);
  std::vector<Complex> denom(g.freqs());
  for (Eigen::Index f = 0; f < F; ++f) {
    Complex acc = 1.0;
    for (Eigen::Index k = 0; k < K; ++k) acc += f_hat(k, f) * p(k, f);
    denom[static_cast<std::size_t>(f)] = acc;
  }

  // Constant part of the right-hand side, pre-multiplied by A^{-1}.
  ComplexRowMatrix y_const(K, F);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index f = 0; f < F; ++f) {
      y_const(k, f) = std::conj(f_hat(k, f)) * s_hat[static_cast<std::size_t>(f)];
    }
  }
  if (q.g.size() != 0) y_const += forward_rows(q.g, g);
  apply_a_inv(y_const);

  SweepResult res;
  RowMatrix u = warm != nullptr ? *warm : RowMatrix::Zero(K, N);
  RowMatrix eta = RowMatrix::Zero(K, N);
  ComplexRowMatrix u_hat = forward_rows(u, g);
  ComplexRowMatrix eta_hat = ComplexRowMatrix::Zero(K, F);
  RowMatrix z(K, N);
  ComplexRowMatrix y(K, F);

  auto objective = [&](const RowMatrix& uu, const ComplexRowMatrix& uu_hat) {
    return spectral_residual(s_hat, f_hat, uu_hat, weights, g.pixels()) + quadratic_value(q, uu) +
           lambda * uu.cwiseAbs().sum();
  };

  RowMatrix best = u;
  double best_obj = objective(u, u_hat);
  const double threshold = lambda / rho;

  for (std::size_t it = 1; it <= max_iters; ++it) {
    y = u_hat - eta_hat;
    apply_a_inv(y);
    y = y_const + rho * y;
    for (Eigen::Index f = 0; f < F; ++f) {
      Complex dot = 0.0;
      for (Eigen::Index k = 0; k < K; ++k) dot += f_hat(k, f) * y(k, f);
      const Complex c = dot / denom[static_cast<std::size_t>(f)];
      for (Eigen::Index k = 0; k < K; ++k) y(k, f) -= p(k, f) * c;
    }
    inverse_rows(y, g, z);

    double diff_sq = 0.0;
    const double z_sq = z.squaredNorm();
    for (Eigen::Index k = 0; k < K; ++k) {
      for (Eigen::Index n = 0; n < N; ++n) {
        const double zn = z(k, n);
        const double un = soft_threshold(zn + eta(k, n), threshold);
        eta(k, n) += zn - un;
        u(k, n) = un;
        diff_sq += (zn - un) * (zn - un);
      }
    }
    u_hat = forward_rows(u, g);
    eta_hat += y - u_hat;

    const double obj = objective(u, u_hat);
    if (record_trace) res.trace.push_back(obj);
    if (obj < best_obj) {
      best_obj = obj;
      best = u;
    }
    res.iterations = it;
    const double rel = z_sq > 0.0 ? std::sqrt(diff_sq / z_sq) : std::sqrt(diff_sq);
    if (rel <= tol) {
      res.converged = true;
      break;
    }
  }
  res.u = res.converged ? std::move(u) : std::move(best);
  return res;
}

void check_slice(const Slice& s, const FilterBank& fb) {
  if (s.empty()) throw std::invalid_argument("encode: empty slice");
  if (!s.all_finite()) throw std::invalid_argument("encode: non-finite input");
  if (fb.k() == 0) throw std::invalid_argument("encode: empty filter bank");
  if (fb.d() > s.rows() || fb.d() > s.cols()) {
    throw std::invalid_argument("encode: filter support exceeds slice size");
  }
}

const RowMatrix* warm_coeffs(const FeatureMapSet* warm, const Slice& s, const FilterBank& fb) {
  if (warm == nullptr) return nullptr;
  if (warm->rows != s.rows() || warm->cols != s.cols() || warm->k() != fb.k()) {
    throw std::invalid_argument("encode: warm start shape mismatch");
  }
  return &warm->coeffs;
}

}  // namespace

EncodeResult encode(const Slice& s, const FilterBank& fb, const SolverConfig& cfg,
                    const FeatureMapSet* warm, bool record_trace) {
  check_slice(s, fb);
  if (!(cfg.lambda > 0.0) || !(cfg.rho > 0.0) || cfg.max_iters == 0) {
    throw std::invalid_argument("encode: invalid solver configuration");
  }
  const GridShape g{s.rows(), s.cols()};
  auto sweep = admm_sweep(s, filter_spectra(fb, g), Quadratic{}, cfg.lambda, cfg.rho,
                          cfg.max_iters, cfg.tol, warm_coeffs(warm, s, fb), record_trace);
  EncodeResult res;
  res.maps.rows = s.rows();
  res.maps.cols = s.cols();
  res.maps.coeffs = std::move(sweep.u);
  res.converged = sweep.converged;
  res.iterations = sweep.iterations;
  res.trace = std::move(sweep.trace);
  return res;
}

CoupledResult encode_coupled(const Slice& sx, const Slice& sy, const FilterBank& fbx,
                             const FilterBank& fby, const Coupling& coupling,
                             const SolverConfig& cfg, const FeatureMapSet* warm_x,
                             const FeatureMapSet* warm_y) {
  check_slice(sx, fbx);
  check_slice(sy, fby);
  if (sx.rows() != sy.rows() || sx.cols() != sy.cols()) {
    throw std::invalid_argument("encode_coupled: source and target slices differ in size");
  }
  const auto K = static_cast<Eigen::Index>(fbx.k());
  if (fby.k() != fbx.k() || coupling.w.rows() != K || coupling.w.cols() != K) {
    throw std::invalid_argument("encode_coupled: mapping must be K x K for both banks");
  }
  if (!(cfg.lambda > 0.0) || !(cfg.rho > 0.0) || cfg.max_iters == 0) {
    throw std::invalid_argument("encode_coupled: invalid solver configuration");
  }

  const GridShape g{sx.rows(), sx.cols()};
  const auto fx_hat = filter_spectra(fbx, g);
  const auto fy_hat = filter_spectra(fby, g);
  const Eigen::MatrixXd& w = coupling.w;
  const double beta = coupling.beta;
  const bool coupled = beta != 0.0;
  // Linear coefficient of the other side: 2 beta from the coupling, minus
  // beta * m from the MMD trace.
  const double link = beta * (2.0 - coupling.mmd_weight);

  CoupledResult res;
  res.zx = FeatureMapSet(fbx.k(), g.rows, g.cols);
  res.zy = FeatureMapSet(fby.k(), g.rows, g.cols);
  if (const auto* wx = warm_coeffs(warm_x, sx, fbx)) res.zx.coeffs = *wx;
  if (const auto* wy = warm_coeffs(warm_y, sy, fby)) res.zy.coeffs = *wy;
  const bool have_x = warm_x != nullptr;
  const bool have_y = warm_y != nullptr;

  const std::size_t passes = std::max<std::size_t>(cfg.coupled_passes, 1);
  for (std::size_t pass = 0; pass < passes; ++pass) {
    Quadratic qx;
    if (coupled) {
      qx.dense = true;
      qx.hmat = 2.0 * beta * (w.transpose() * w);
      qx.g = link * (w.transpose() * res.zy.coeffs);
    }
    const bool warm_zx = pass > 0 || have_x;
    auto sx_res = admm_sweep(sx, fx_hat, qx, cfg.lambda, cfg.rho, cfg.max_iters, cfg.tol,
                             warm_zx ? &res.zx.coeffs : nullptr, false);
    res.zx.coeffs = std::move(sx_res.u);

    Quadratic qy;
    if (coupled) {
      qy.h = 2.0 * beta;
      qy.g = link * (w * res.zx.coeffs);
    }
    const bool warm_zy = pass > 0 || have_y;
    auto sy_res = admm_sweep(sy, fy_hat, qy, cfg.lambda, cfg.rho, cfg.max_iters, cfg.tol,
                             warm_zy ? &res.zy.coeffs : nullptr, false);
    res.zy.coeffs = std::move(sy_res.u);
    res.converged = sx_res.converged && sy_res.converged;
  }
  return res;
}

FilterBank update_filters(std::span<const Slice> slices, std::span<const FeatureMapSet> maps,
                          const FilterBank& prev, const FilterUpdateConfig& cfg) {
  if (slices.empty()) throw std::invalid_argument("update_filters: no samples");
  if (slices.size() != maps.size()) {
    throw std::invalid_argument("update_filters: one map set per slice required");
  }
  const GridShape g{slices.front().rows(), slices.front().cols()};
  const auto K = static_cast<Eigen::Index>(prev.k());
  for (std::size_t i = 0; i < slices.size(); ++i) {
    if (slices[i].rows() != g.rows || slices[i].cols() != g.cols || maps[i].rows != g.rows ||
        maps[i].cols != g.cols || maps[i].coeffs.rows() != K) {
      throw std::invalid_argument("update_filters: inconsistent sample shapes");
    }
  }
  const bool all_zero = std::all_of(maps.begin(), maps.end(), [](const FeatureMapSet& m) {
    return m.coeffs.cwiseAbs().maxCoeff() == 0.0;
  });
  if (all_zero) return prev;

  const auto F = static_cast<Eigen::Index>(g.freqs());
  const auto n = static_cast<Eigen::Index>(slices.size());
  const auto support = support_indices(prev.d(), g);
  const auto weights = frequency_weights(g);

  std::vector<ComplexRowMatrix> z_hat;
  std::vector<std::vector<Complex>> s_hat;
  z_hat.reserve(slices.size());
  s_hat.reserve(slices.size());
  for (std::size_t i = 0; i < slices.size(); ++i) {
    z_hat.push_back(forward_rows(maps[i].coeffs, g));
    std::vector<Complex> sh(g.freqs());
    rfft2_into(slices[i].data(), g.rows, g.cols, sh);
    s_hat.push_back(std::move(sh));
  }

  // Per-frequency Gram matrices sum_i conj(z_i) z_i^T and right-hand sides.
  std::vector<Eigen::MatrixXcd> gram(static_cast<std::size_t>(F));
  ComplexRowMatrix b(K, F);
  double trace_sum = 0.0;
  Eigen::MatrixXcd zf(n, K);
  Eigen::VectorXcd sf(n);
  for (Eigen::Index f = 0; f < F; ++f) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& zi = z_hat[static_cast<std::size_t>(i)];
      for (Eigen::Index k = 0; k < K; ++k) zf(i, k) = zi(k, f);
      sf(i) = s_hat[static_cast<std::size_t>(i)][static_cast<std::size_t>(f)];
    }
    auto& gf = gram[static_cast<std::size_t>(f)];
    gf = zf.adjoint() * zf;
    b.col(f) = zf.adjoint() * sf;
    trace_sum += gf.trace().real();
  }
  const double rho = std::max(cfg.rho_scale * trace_sum / static_cast<double>(F * K), 1e-12);

  std::vector<Eigen::LLT<Eigen::MatrixXcd>> chol(static_cast<std::size_t>(F));
  for (Eigen::Index f = 0; f < F; ++f) {
    auto& gf = gram[static_cast<std::size_t>(f)];
    gf.diagonal().array() += rho + cfg.ridge;
    chol[static_cast<std::size_t>(f)].compute(gf);
  }
  gram.clear();

  FilterBank s_bank = prev;
  RowMatrix xi = RowMatrix::Zero(K, static_cast<Eigen::Index>(g.pixels()));
  RowMatrix f_grid;
  ComplexRowMatrix f_hat(K, F);
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    RowMatrix target = embed_bank(s_bank, g, support) - xi;
    ComplexRowMatrix t_hat = forward_rows(target, g);
    for (Eigen::Index f = 0; f < F; ++f) {
      Eigen::VectorXcd rhs = b.col(f) + rho * t_hat.col(f);
      f_hat.col(f) = chol[static_cast<std::size_t>(f)].solve(rhs);
    }
    inverse_rows(f_hat, g, f_grid);

    // Project f + xi onto the d x d support and the unit ball.
    RowMatrix v = f_grid + xi;
    FilterBank next(prev.k(), prev.d());
    for (Eigen::Index k = 0; k < K; ++k) {
      auto t = next.taps(static_cast<std::size_t>(k));
      for (std::size_t j = 0; j < support.size(); ++j) {
        t[j] = v(k, static_cast<Eigen::Index>(support[j]));
      }
      const double nrm = next.norm(static_cast<std::size_t>(k));
      if (nrm > 1.0) {
        for (double& x : t) x /= nrm;
      }
    }
    RowMatrix embedded = embed_bank(next, g, support);
    xi += f_grid - embedded;

    double primal = (f_grid - embedded).norm();
    double change = 0.0;
    for (std::size_t j = 0; j < next.coeffs().size(); ++j) {
      change = std::max(change, std::abs(next.coeffs()[j] - s_bank.coeffs()[j]));
    }
    s_bank = std::move(next);
    if (primal <= cfg.tol && change <= cfg.tol) break;
  }

  auto total_error = [&](const FilterBank& fb) {
    const auto fh = filter_spectra(fb, g);
    double acc = 0.0;
    for (std::size_t i = 0; i < slices.size(); ++i) {
      acc += spectral_residual(s_hat[i], fh, z_hat[i], weights, g.pixels());
    }
    return acc;
  };
  return total_error(s_bank) <= total_error(prev) ? s_bank : prev;
}

Slice reconstruct_spatial(const FilterBank& fb, const FeatureMapSet& maps) {
  if (maps.k() != fb.k()) throw std::invalid_argument("reconstruct: map/filter count mismatch");
  Slice out(maps.rows, maps.cols);
  for (std::size_t k = 0; k < fb.k(); ++k) {
    const Slice part = conv_spatial(maps.map(k), fb.filter(k));
    for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] += part.values()[i];
  }
  return out;
}

Slice reconstruct(const FilterBank& fb, const FeatureMapSet& maps) {
  if (maps.k() != fb.k()) throw std::invalid_argument("reconstruct: map/filter count mismatch");
  const GridShape g{maps.rows, maps.cols};
  const auto f_hat = filter_spectra(fb, g);
  const auto z_hat = forward_rows(maps.coeffs, g);
  std::vector<Complex> acc(g.freqs(), Complex(0.0));
  for (Eigen::Index k = 0; k < f_hat.rows(); ++k) {
    for (Eigen::Index f = 0; f < f_hat.cols(); ++f) {
      acc[static_cast<std::size_t>(f)] += f_hat(k, f) * z_hat(k, f);
    }
  }
  Slice out(g.rows, g.cols);
  irfft2_into(acc, g.rows, g.cols, out.data());
  return out;
}

double csc_objective(const Slice& s, const FilterBank& fb, const FeatureMapSet& maps,
                     double lambda) {
  const Slice r = reconstruct_spatial(fb, maps);
  double err = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = s.values()[i] - r.values()[i];
    err += d * d;
  }
  return 0.5 * err + lambda * maps.l1();
}

double reconstruction_error_fourier(const Slice& s, const FilterBank& fb,
                                    const FeatureMapSet& maps) {
  const GridShape g{s.rows(), s.cols()};
  std::vector<Complex> s_hat(g.freqs());
  rfft2_into(s.data(), g.rows, g.cols, s_hat);
  return spectral_residual(s_hat, filter_spectra(fb, g), forward_rows(maps.coeffs, g),
                           frequency_weights(g), g.pixels());
}

}  // namespace weenie
