#pragma once

// Procedural paired phantoms: an HR volume of random ellipsoids and ridges
// over a smooth background, an LR source-modality copy and an HR
// target-modality copy sharing the same geometry.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "weenie/grid.hpp"

namespace weenie {

enum class Modality { SigmoidRemap, Inverse, Gamma };

Modality parse_modality(std::string_view name);
std::string modality_name(Modality m);

/// Pointwise intensity map of a modality.
double apply_modality(Modality m, double x);
Volume apply_modality(Modality m, const Volume& v);

struct PhantomSpec {
  std::size_t rows = 32;
  std::size_t cols = 32;
  std::size_t depth = 4;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  Modality modality = Modality::SigmoidRemap;
  std::size_t ellipsoids = 5;
  std::size_t ridges = 2;
  double registered_fraction = 1.0;
  double scale = 0.5;
};

struct PhantomPair {
  Volume source;            // LR, identity modality
  Volume target;            // HR, target modality
  Volume hr_source;         // HR, identity modality (ground truth geometry)
  bool registered = false;
  std::size_t source_subject = 0;
  std::size_t target_subject = 0;
};

/// HR identity-modality volume of one subject, min-max normalized to [0, 1].
Volume phantom_subject(const PhantomSpec& spec, std::size_t subject);

/// The first round(registered_fraction * count) entries are registered pairs;
/// the remaining entries carry targets of a random permutation of the
/// unregistered subjects.
std::vector<PhantomPair> generate_phantoms(const PhantomSpec& spec);

}  // namespace weenie
