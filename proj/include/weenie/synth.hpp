#pragma once

// Inference: encode with the source filters, map through W, decode with the
// target filters, refined by warm-started re-encoding.

#include "weenie/csc.hpp"
#include "weenie/grid.hpp"
#include "weenie/train.hpp"

namespace weenie {

struct SynthesisConfig {
  std::size_t iters = 3;
  SolverConfig inner{};
  std::size_t pad = 8;
  bool clamp = true;
  /// Stop refining once successive outputs differ by less than this RMS.
  double stop_rms = 1e-5;
};

/// Solver settings taken from a trained model (lambda, rho, iteration budget).
SynthesisConfig synthesis_config_for(const TrainedModel& model);

/// s is an unpadded slice at the target in-plane size; padding and cropping
/// by cfg.pad happen inside.
Slice synthesize_slice(const Slice& s, const TrainedModel& model, const SynthesisConfig& cfg);

/// Per-slice synthesis of a volume already at the target in-plane size.
Volume synthesize_volume(const Volume& v, const TrainedModel& model, const SynthesisConfig& cfg);

/// Bicubic upscaling by `scale`, then synthesize_volume.
Volume synthesize_from_lr(const Volume& lr, const TrainedModel& model, const SynthesisConfig& cfg,
                          double scale = 2.0);

}  // namespace weenie
