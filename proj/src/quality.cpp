#include "weenie/quality.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace weenie {

namespace {

constexpr std::size_t kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

void check_shapes(const Volume& a, const Volume& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.depth() != b.depth()) {
    throw std::invalid_argument("metric: volume dimensions differ");
  }
}

void check_shapes(const Slice& a, const Slice& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("metric: slice dimensions differ");
  }
}

double psnr_from_sse(double sse, std::size_t n, double peak) {
  if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be > 0");
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / (sse / static_cast<double>(n)));
}

double sse(const Slice& a, const Slice& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    acc += d * d;
  }
  return acc;
}

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> w{};
  double sum = 0.0;
  const double c = static_cast<double>(kWindow / 2);
  for (std::size_t i = 0; i < kWindow; ++i) {
    const double x = static_cast<double>(i) - c;
    w[i] = std::exp(-x * x / (2.0 * kSigma * kSigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace

double psnr(const Slice& a, const Slice& b, double peak) {
  check_shapes(a, b);
  return psnr_from_sse(sse(a, b), a.size(), peak);
}

double psnr(const Volume& a, const Volume& b, double peak) {
  check_shapes(a, b);
  double acc = 0.0;
  for (std::size_t z = 0; z < a.depth(); ++z) acc += sse(a.slice(z), b.slice(z));
  return psnr_from_sse(acc, a.voxel_count(), peak);
}

double ssim(const Slice& a, const Slice& b, double peak) {
  check_shapes(a, b);
  if (!(peak > 0.0)) throw std::invalid_argument("ssim: peak must be > 0");
  if (a.rows() < kWindow || a.cols() < kWindow) {
    throw std::invalid_argument("ssim: slice smaller than the 11x11 window");
  }
  static const auto w = gaussian_window();
  const double c1 = (kK1 * peak) * (kK1 * peak);
  const double c2 = (kK2 * peak) * (kK2 * peak);
  const std::size_t out_r = a.rows() - kWindow + 1;
  const std::size_t out_c = a.cols() - kWindow + 1;
  double total = 0.0;
  for (std::size_t r = 0; r < out_r; ++r) {
    for (std::size_t c = 0; c < out_c; ++c) {
      double ma = 0.0, mb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
      for (std::size_t i = 0; i < kWindow; ++i) {
        for (std::size_t j = 0; j < kWindow; ++j) {
          const double wt = w[i] * w[j];
          const double x = a(r + i, c + j);
          const double y = b(r + i, c + j);
          ma += wt * x;
          mb += wt * y;
          saa += wt * x * x;
          sbb += wt * y * y;
          sab += wt * (x * y);
        }
      }
      const double va = saa - ma * ma;
      const double vb = sbb - mb * mb;
      const double mab = ma * mb;
      const double cov = sab - mab;
      // Every product is written so that swapping a and b gives the same bits.
      total += ((2.0 * mab + c1) * (2.0 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
  }
  return total / static_cast<double>(out_r * out_c);
}

double ssim(const Volume& a, const Volume& b, double peak) {
  check_shapes(a, b);
  double acc = 0.0;
  for (std::size_t z = 0; z < a.depth(); ++z) acc += ssim(a.slice(z), b.slice(z), peak);
  return acc / static_cast<double>(a.depth());
}

MetricReport evaluate(const Volume& pred, const Volume& ref, double peak) {
  check_shapes(pred, ref);
  MetricReport r;
  r.psnr_db = psnr(pred, ref, peak);
  r.ssim = ssim(pred, ref, peak);
  for (std::size_t z = 0; z < pred.depth(); ++z) {
    r.slices.push_back({z, psnr(pred.slice(z), ref.slice(z), peak),
                        ssim(pred.slice(z), ref.slice(z), peak)});
  }
  return r;
}

}  // namespace weenie
