#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <limits>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "json.hpp"
#include "weenie/io.hpp"

using namespace weenie;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("weenie_io_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Volume float_volume(std::size_t r, std::size_t c, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Volume v = oracle::random_volume(r, c, d, rng);
  for (auto& s : v.slices())
    for (double& x : s.values()) x = static_cast<float>(x);
  return v;
}

TrainedModel sample_model() {
  TrainedModel m;
  m.fbx = random_filter_bank(3, 5, 1);
  m.fby = random_filter_bank(3, 5, 2);
  for (auto* fb : {&m.fbx, &m.fby})
    for (double& x : fb->coeffs()) x = static_cast<float>(x);
  m.w = Eigen::MatrixXd::Identity(3, 3) * 0.75;
  m.w(0, 2) = static_cast<float>(0.1);
  m.low = IntensityMap{0.8123456789012345, -0.0123456789};
  m.config.k = 3;
  m.config.d = 5;
  m.config.lambda = 0.01;
  m.config.beta = 0.3;
  m.config.seed = 42;
  m.config.pad = 6;
  m.config.outer_iters = 7;
  m.config.lowpass = 2.5;
  m.config.tied_init = false;
  m.config.inner.max_iters = 33;
  m.config.filter.rho_scale = 2.0;
  m.provenance = "abc123";
  return m;
}

}  // namespace

TEST_CASE("WVOL layout and round trip") {
  const Volume v = float_volume(3, 4, 2, 1);
  const Bytes b = encode_volume(v);
  REQUIRE(b.size() == 4 + 1 + 12 + 4 * 24);
  CHECK(std::string(b.begin(), b.begin() + 4) == "WVOL");
  CHECK(b[4] == 1);
  CHECK(b[5] == 3);
  CHECK(b[9] == 4);
  CHECK(b[13] == 2);
  // First payload value is (row 0, col 0, slice 0); the second is (0, 1, 0).
  float first = 0, second = 0;
  std::memcpy(&first, b.data() + 17, 4);
  std::memcpy(&second, b.data() + 21, 4);
  CHECK(first == static_cast<float>(v(0, 0, 0)));
  CHECK(second == static_cast<float>(v(0, 1, 0)));
  CHECK(decode_volume(b) == v);
  CHECK(encode_volume(decode_volume(b)) == b);
}

TEST_CASE("WVOL rejects malformed input") {
  Bytes b = encode_volume(float_volume(2, 2, 1, 2));
  Bytes bad = b;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_volume(bad), FormatError);
  bad = b;
  bad[4] = 2;
  CHECK_THROWS_AS(decode_volume(bad), FormatError);
  bad = b;
  bad.pop_back();
  CHECK_THROWS_AS(decode_volume(bad), FormatError);
  bad = b;
  bad.push_back(0);
  CHECK_THROWS_AS(decode_volume(bad), FormatError);
  CHECK_THROWS_AS(decode_volume(Bytes{}), FormatError);
}

TEST_CASE("WMOD round trip is exact") {
  const TrainedModel m = sample_model();
  const Bytes b = encode_model(m);
  CHECK(std::string(b.begin(), b.begin() + 4) == "WMOD");
  CHECK(b[4] == 1);
  const TrainedModel r = decode_model(b);
  CHECK(r.fbx == m.fbx);
  CHECK(r.fby == m.fby);
  CHECK(r.w == m.w);
  CHECK(r.low == m.low);
  CHECK(r.provenance == m.provenance);
  CHECK(r.config.k == 3);
  CHECK(r.config.d == 5);
  CHECK(r.config.lambda == m.config.lambda);
  CHECK(r.config.beta == m.config.beta);
  CHECK(r.config.seed == 42);
  CHECK(r.config.pad == 6);
  CHECK(r.config.outer_iters == 7);
  CHECK(r.config.lowpass == 2.5);
  CHECK_FALSE(r.config.tied_init);
  CHECK(r.config.inner.max_iters == 33);
  CHECK(r.config.filter.rho_scale == 2.0);
  CHECK(encode_model(r) == b);

  Bytes bad = b;
  bad[1] = 'X';
  CHECK_THROWS_AS(decode_model(bad), FormatError);
  bad = b;
  bad.resize(b.size() - 4);
  CHECK_THROWS_AS(decode_model(bad), FormatError);
}

TEST_CASE("save and load through files") {
  TempDir dir("files");
  const Volume v = float_volume(5, 6, 3, 3);
  save_volume(dir.path / "v.wvol", v);
  CHECK(load_volume(dir.path / "v.wvol") == v);
  save_model(dir.path / "m.wmod", sample_model());
  CHECK(load_model(dir.path / "m.wmod").w == sample_model().w);
  CHECK_THROWS(load_volume(dir.path / "missing.wvol"));
}

TEST_CASE("manifest round trip and path resolution") {
  TempDir dir("manifest");
  const std::vector<ManifestEntry> entries{{"source/a.wvol", "target/a.wvol", true, std::nullopt},
                                           {"source/b.wvol", "target/c.wvol", false, 0.0123}};
  write_manifest(dir.path / "pairs.json", entries);
  const auto back = read_manifest(dir.path / "pairs.json");
  REQUIRE(back.size() == 2);
  CHECK(back[0].source == "source/a.wvol");
  CHECK(back[0].registered);
  CHECK_FALSE(back[0].kernel.has_value());
  CHECK(back[1].kernel.value() == 0.0123);
  CHECK(resolve_manifest_path(dir.path / "pairs.json", "source/a.wvol") == dir.path / "source/a.wvol");
  CHECK(resolve_manifest_path(dir.path / "pairs.json", "/abs/x.wvol") == fs::path("/abs/x.wvol"));

  std::ofstream(dir.path / "bad.json") << R"([{"source": "a.wvol", "registered": true}])";
  CHECK_THROWS_AS(read_manifest(dir.path / "bad.json"), FormatError);
  std::ofstream(dir.path / "notjson.json") << "{oops";
  CHECK_THROWS_AS(read_manifest(dir.path / "notjson.json"), FormatError);
}

TEST_CASE("load_pairs normalizes and checks files") {
  TempDir dir("pairs");
  fs::create_directories(dir.path / "s");
  Volume src(4, 4, 1, 2.0);
  src(0, 0, 0) = 4.0;
  save_volume(dir.path / "s/a.wvol", src);
  save_volume(dir.path / "s/b.wvol", Volume(8, 8, 1, 0.5));
  write_manifest(dir.path / "pairs.json", {{"s/a.wvol", "s/b.wvol", true, std::nullopt}});
  const auto pairs = load_pairs(dir.path / "pairs.json");
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].source.max() == 1.0);
  CHECK(pairs[0].source.min() == 0.0);
  CHECK(pairs[0].target.max() == 0.0);
  write_manifest(dir.path / "missing.json", {{"s/a.wvol", "s/none.wvol", true, std::nullopt}});
  CHECK_THROWS_AS(load_pairs(dir.path / "missing.json"), FormatError);
}

TEST_CASE("report_json serializes infinite PSNR as inf") {
  MetricReport r;
  r.psnr_db = std::numeric_limits<double>::infinity();
  r.ssim = 1.0;
  r.slices.push_back({0, std::numeric_limits<double>::infinity(), 1.0});
  const auto j = nlohmann::json::parse(report_json(r));
  CHECK(j["psnr_db"] == "inf");
  CHECK(j["slices"][0]["psnr_db"] == "inf");
  CHECK(j["ssim"] == 1.0);
}

TEST_CASE("normalize_unit and fnv1a") {
  Volume v(2, 2, 1);
  v(0, 0, 0) = -1.0;
  v(1, 1, 0) = 3.0;
  const Volume n = normalize_unit(v);
  CHECK(n(0, 0, 0) == 0.0);
  CHECK(n(1, 1, 0) == 1.0);
  CHECK(n(0, 1, 0) == 0.25);
  const Volume flat = normalize_unit(Volume(2, 2, 1, 7.0));
  CHECK(flat.max() == 0.0);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
