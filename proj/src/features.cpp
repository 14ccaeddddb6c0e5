#include "weenie/features.hpp"

#include <cmath>
#include <stdexcept>

#include "weenie/resample.hpp"

namespace weenie {

std::vector<Kernel2D> hf_gradient_kernels() {
  return {
      Kernel2D{1, 3, {-1.0, 0.0, 1.0}},
      Kernel2D{3, 1, {-1.0, 0.0, 1.0}},
      Kernel2D{1, 5, {-2.0, -1.0, 0.0, 1.0, 2.0}},
      Kernel2D{5, 1, {-2.0, -1.0, 0.0, 1.0, 2.0}},
  };
}

Volume filter_slices(const Volume& v, const Kernel2D& k) {
  // Correlation is convolution with the flipped kernel.
  Kernel2D flipped{k.rows, k.cols, std::vector<double>(k.taps.rbegin(), k.taps.rend())};
  std::vector<Slice> out;
  out.reserve(v.depth());
  for (const auto& s : v.slices()) out.push_back(conv_spatial(s, flipped));
  return Volume(std::move(out));
}

HfFeatures extract_hf_lr(const Volume& v) {
  if (v.rows() < 5 || v.cols() < 5) {
    throw std::invalid_argument("extract_hf_lr: in-plane dims must be >= 5");
  }
  HfFeatures f;
  f.origin = FeatureOrigin::Source;
  for (const auto& k : hf_gradient_kernels()) f.channels.push_back(filter_slices(v, k));
  return f;
}

HfFeatures extract_hf_hr(const Volume& v) {
  if (v.voxel_count() == 0) throw std::invalid_argument("extract_hf_hr: empty volume");
  const double mean = v.mean();
  Volume out = v;
  for (auto& s : out.slices()) {
    for (double& x : s.values()) x -= mean;
  }
  HfFeatures f;
  f.origin = FeatureOrigin::Target;
  f.channels.push_back(std::move(out));
  return f;
}

Volume reconcile_features(const HfFeatures& f, std::size_t rows, std::size_t cols,
                          bool standardize, TargetReconcile target_mode) {
  if (f.channels.empty()) throw std::invalid_argument("reconcile_features: no channels");
  Volume out;
  if (f.origin == FeatureOrigin::Source) {
    for (const auto& ch : f.channels) {
      Volume up = resize_to(ch, rows, cols);
      if (out.depth() == 0) {
        out = Volume(rows, cols, up.depth());
      }
      for (std::size_t z = 0; z < up.depth(); ++z) {
        auto& dst = out.slice(z).values();
        const auto& src = up.slice(z).values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i] * src[i];
      }
    }
  } else if (target_mode == TargetReconcile::GradientEnergy) {
    const Volume base = resize_to(f.channels.front(), rows, cols);
    out = Volume(rows, cols, base.depth());
    for (const auto& k : hf_gradient_kernels()) {
      const Volume g = filter_slices(base, k);
      for (std::size_t z = 0; z < g.depth(); ++z) {
        auto& dst = out.slice(z).values();
        const auto& src = g.slice(z).values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i] * src[i];
      }
    }
  } else {
    out = resize_to(f.channels.front(), rows, cols);
  }
  if (standardize) {
    const double mean = out.mean();
    double sq = 0.0;
    for (auto& s : out.slices()) {
      for (double& x : s.values()) {
        x -= mean;
        sq += x * x;
      }
    }
    const double rms = std::sqrt(sq / static_cast<double>(out.voxel_count()));
    if (rms > 0.0) {
      for (auto& s : out.slices()) {
        for (double& x : s.values()) x /= rms;
      }
    }
  }
  return out;
}

}  // namespace weenie
