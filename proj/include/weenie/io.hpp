#pragma once

// On-disk formats: WVOL volumes, WMOD models, pair manifests and training
// traces.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "weenie/grid.hpp"
#include "weenie/quality.hpp"
#include "weenie/train.hpp"

namespace weenie {

/// Malformed file contents (bad magic, version, size or field).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Bytes = std::vector<std::uint8_t>;

Bytes encode_volume(const Volume& v);
Volume decode_volume(const Bytes& bytes);
void save_volume(const std::filesystem::path& path, const Volume& v);
Volume load_volume(const std::filesystem::path& path);

Bytes encode_model(const TrainedModel& m);
TrainedModel decode_model(const Bytes& bytes);
void save_model(const std::filesystem::path& path, const TrainedModel& m);
TrainedModel load_model(const std::filesystem::path& path);

struct ManifestEntry {
  std::string source;
  std::string target;
  bool registered = false;
  std::optional<double> kernel;
};

/// Paths are stored as written; resolve_manifest_path makes them absolute
/// relative to the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);
std::filesystem::path resolve_manifest_path(const std::filesystem::path& manifest,
                                            const std::string& entry);

/// Reads every pair of a manifest; volumes are min-max normalized to [0, 1].
std::vector<TrainingPair> load_pairs(const std::filesystem::path& manifest);

void write_trace(const std::filesystem::path& path, const std::vector<ObjectiveTerms>& trace);
std::string report_json(const MetricReport& r);

/// Min-max normalization to [0, 1]; constant volumes become all zero.
Volume normalize_unit(const Volume& v);

/// 64-bit FNV-1a digest of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const Bytes& bytes);

}  // namespace weenie
