#include "weenie/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "weenie/resample.hpp"

namespace weenie {

SynthesisConfig synthesis_config_for(const TrainedModel& model) {
  SynthesisConfig cfg;
  cfg.inner = model.config.inner;
  cfg.inner.lambda = model.config.lambda;
  cfg.pad = model.config.pad;
  return cfg;
}

namespace {

void check_model(const TrainedModel& m) {
  const auto k = static_cast<Eigen::Index>(m.fbx.k());
  if (m.fbx.k() == 0 || m.fby.k() != m.fbx.k() || m.fby.d() != m.fbx.d() || m.w.rows() != k ||
      m.w.cols() != k) {
    throw std::invalid_argument("synthesize: inconsistent model dimensions");
  }
}

}  // namespace

Slice synthesize_slice(const Slice& s, const TrainedModel& model, const SynthesisConfig& cfg) {
  check_model(model);
  if (cfg.iters == 0) throw std::invalid_argument("synthesize: iters must be >= 1");
  const auto [low, padded] = split_frequencies(pad_periodic(s, cfg.pad), model.config.lowpass);
  if (model.d() > padded.rows() || model.d() > padded.cols()) {
    throw std::invalid_argument("synthesize: filter support exceeds padded slice");
  }

  FeatureMapSet z;
  Slice out;
  for (std::size_t it = 0; it < cfg.iters; ++it) {
    auto enc = encode(padded, model.fbx, cfg.inner, it == 0 ? nullptr : &z);
    z = std::move(enc.maps);
    FeatureMapSet mapped(model.k(), padded.rows(), padded.cols());
    mapped.coeffs = model.w * z.coeffs;
    Slice full = reconstruct(model.fby, mapped);
    if (!low.empty()) {
      for (std::size_t i = 0; i < full.size(); ++i) {
        full.values()[i] += model.low.gain * low.values()[i] + model.low.offset;
      }
    }
    Slice next = crop(full, cfg.pad);
    if (it > 0) {
      double acc = 0.0;
      for (std::size_t i = 0; i < next.size(); ++i) {
        const double d = next.values()[i] - out.values()[i];
        acc += d * d;
      }
      out = std::move(next);
      if (std::sqrt(acc / static_cast<double>(out.size())) < cfg.stop_rms) break;
    } else {
      out = std::move(next);
    }
  }
  if (cfg.clamp) {
    for (double& v : out.values()) v = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

Volume synthesize_volume(const Volume& v, const TrainedModel& model, const SynthesisConfig& cfg) {
  if (v.depth() == 0) throw std::invalid_argument("synthesize: empty volume");
  std::vector<Slice> out;
  out.reserve(v.depth());
  for (const auto& s : v.slices()) out.push_back(synthesize_slice(s, model, cfg));
  return Volume(std::move(out));
}

Volume synthesize_from_lr(const Volume& lr, const TrainedModel& model, const SynthesisConfig& cfg,
                          double scale) {
  return synthesize_volume(bicubic_resize(lr, scale), model, cfg);
}

}  // namespace weenie
