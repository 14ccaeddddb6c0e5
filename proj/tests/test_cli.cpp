#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "weenie/cli.hpp"
#include "weenie/io.hpp"
#include "weenie/quality.hpp"

using namespace weenie;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("weenie_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& rel) const { return (path / rel).string(); }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "weenie");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

const char* kSmallConfig =
    R"({"k": 4, "d": 5, "outer_iters": 2, "pad": 4, "lambda": 0.02, "inner": {"max_iters": 20}, "filter": {"max_iters": 20}})";

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"bogus"}).code == kExitUsage);
  CHECK(cli({"phantom"}).code == kExitUsage);
  CHECK(cli({"phantom", "--out", "/tmp/x", "--size", "big"}).code == kExitUsage);
  CHECK(cli({"phantom", "--out", "/tmp/x", "--modality", "t9"}).code == kExitUsage);
  CHECK(cli({"phantom", "--out", "/tmp/x", "--registered-fraction", "1.5"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("phantom writes volumes, a manifest and ground truth deterministically") {
  TempDir a("phantom_a"), b("phantom_b");
  for (const auto* d : {&a, &b}) {
    const auto r = cli({"phantom", "--out", d->path.string(), "--count", "1", "--seed", "7", "--size", "32x32x4"});
    REQUIRE(r.code == kExitOk);
  }
  for (const auto* f : {"source/src_000.wvol", "target/tgt_000.wvol", "pairs.json", "truth.json"})
    CHECK(read_file(a.path / f) == read_file(b.path / f));
  const Volume t = load_volume(a.path / "target/tgt_000.wvol");
  CHECK(t.rows() == 32);
  CHECK(t.cols() == 32);
  CHECK(t.depth() == 4);
  const Volume s = load_volume(a.path / "source/src_000.wvol");
  CHECK(s.rows() == 16);

  REQUIRE(cli({"phantom", "--out", a.path.string(), "--count", "3", "--registered-fraction", "1.0"}).code == kExitOk);
  for (const auto& e : read_manifest(a.path / "pairs.json")) CHECK(e.registered);
}

TEST_CASE("phantom into an unwritable location fails") {
  TempDir d("unwritable");
  write_text(d / "file", "x");
  const auto r = cli({"phantom", "--out", d / "file/sub"});
  CHECK(r.code != kExitOk);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("align pairs one source with one target and recovers a permutation") {
  TempDir d("align");
  REQUIRE(cli({"phantom", "--out", d.path.string(), "--count", "4", "--seed", "5", "--registered-fraction", "0"}).code == kExitOk);
  const auto r = cli({"align", "--source-dir", d / "source", "--target-dir", d / "target", "--out", d / "aligned.json"});
  REQUIRE(r.code == kExitOk);
  const auto truth = read_json(d / "truth.json");
  const auto aligned = read_manifest(d.path / "aligned.json");
  REQUIRE(aligned.size() == 4);
  for (const auto& t : truth) {
    const std::string src = t["source"];
    for (const auto& e : aligned)
      if (e.source == src) {
        // Entry i carries target subject target_subject; the right partner of
        // source subject s is the target whose subject is s.
        for (const auto& u : truth)
          if (u["target_subject"] == t["source_subject"]) CHECK(e.target == u["target"]);
        CHECK_FALSE(e.registered);
        CHECK(e.kernel.has_value());
      }
  }

  TempDir one("align_one");
  fs::create_directories(one.path / "s");
  fs::create_directories(one.path / "t");
  fs::copy_file(d.path / "source/src_000.wvol", one.path / "s/a.wvol");
  fs::copy_file(d.path / "target/tgt_002.wvol", one.path / "t/b.wvol");
  REQUIRE(cli({"align", "--source-dir", one / "s", "--target-dir", one / "t", "--out", one / "p.json"}).code == kExitOk);
  const auto single = read_manifest(one.path / "p.json");
  REQUIRE(single.size() == 1);
  CHECK(single[0].target == "t/b.wvol");

  CHECK(cli({"align", "--source-dir", one / "s", "--target-dir", one / "t", "--out", one / "p.json", "--sigma", "0"}).code == kExitUsage);
  fs::create_directories(one.path / "empty");
  CHECK(cli({"align", "--source-dir", one / "empty", "--target-dir", one / "t", "--out", one / "p.json"}).code != kExitOk);
}

TEST_CASE("align keeps registered pairs from an existing manifest") {
  TempDir d("align_keep");
  REQUIRE(cli({"phantom", "--out", d.path.string(), "--count", "3", "--seed", "6", "--registered-fraction", "0.34"}).code == kExitOk);
  REQUIRE(cli({"align", "--source-dir", d / "source", "--target-dir", d / "target", "--pairs", d / "pairs.json",
               "--out", d / "aligned.json"}).code == kExitOk);
  const auto m = read_manifest(d.path / "aligned.json");
  REQUIRE(m.size() == 3);
  CHECK(m[0].registered);
  CHECK(m[0].source == "source/src_000.wvol");
  CHECK(m[0].target == "target/tgt_000.wvol");
  CHECK_FALSE(m[1].registered);
  CHECK_FALSE(m[2].registered);
}

TEST_CASE("train validates its inputs") {
  TempDir d("train_errors");
  CHECK(cli({"train", "--pairs", d / "missing.json", "--out", d / "m.wmod"}).code == kExitUsage);
  REQUIRE(cli({"phantom", "--out", d.path.string(), "--count", "1", "--size", "16x16x2"}).code == kExitOk);
  write_text(d / "bad.json", R"({"k": 4, "kk": 1})");
  auto r = cli({"train", "--pairs", d / "pairs.json", "--config", d / "bad.json", "--out", d / "m.wmod"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("kk") != std::string::npos);
  write_text(d / "bad.json", R"({"lambda": "x"})");
  r = cli({"train", "--pairs", d / "pairs.json", "--config", d / "bad.json", "--out", d / "m.wmod"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("lambda") != std::string::npos);
  write_text(d / "bad.json", R"({"d": 4})");
  CHECK(cli({"train", "--pairs", d / "pairs.json", "--config", d / "bad.json", "--out", d / "m.wmod"}).code == kExitUsage);
  write_text(d / "bad.json", R"([{"source": 1}])");
  CHECK(cli({"train", "--pairs", d / "bad.json", "--out", d / "m.wmod"}).code == kExitUsage);
}

TEST_CASE("parse_train_config") {
  const auto c = parse_train_config(R"({"lambda": 0.02, "k": 8, "lowpass": 0, "tied_init": false, "inner": {"rho": 2}})");
  CHECK(c.lambda == 0.02);
  CHECK(c.inner.lambda == 0.02);
  CHECK(c.k == 8);
  CHECK(c.lowpass == 0.0);
  CHECK_FALSE(c.tied_init);
  CHECK(c.inner.rho == 2.0);
  CHECK(c.beta == 0.1);
  CHECK(c.gamma == 0.15);
  CHECK(c.sigma == 1.0);
  CHECK_THROWS_AS(parse_train_config(R"({"tied_init": 1})"), FormatError);
  CHECK_THROWS_AS(parse_train_config(R"({"inner": {"lambda": 1}})"), FormatError);
  CHECK_THROWS_AS(parse_train_config("[]"), FormatError);
}

TEST_CASE("train, synth and eval end to end") {
  TempDir d("pipeline");
  REQUIRE(cli({"phantom", "--out", d.path.string(), "--count", "2", "--size", "16x16x2", "--seed", "3"}).code == kExitOk);
  write_text(d / "cfg.json", kSmallConfig);
  REQUIRE(cli({"train", "--pairs", d / "pairs.json", "--config", d / "cfg.json", "--out", d / "m1.wmod", "--trace", d / "t.json"}).code == kExitOk);
  REQUIRE(cli({"train", "--pairs", d / "pairs.json", "--config", d / "cfg.json", "--out", d / "m2.wmod"}).code == kExitOk);
  CHECK(read_file(d.path / "m1.wmod") == read_file(d.path / "m2.wmod"));

  const auto trace = read_json(d / "t.json");
  REQUIRE(trace["iterations"].size() == 3);
  for (const auto* key : {"index", "total", "recon_x", "recon_y", "coupling", "l1", "w_reg", "mmd", "align_const"})
    CHECK(trace["iterations"][0].contains(key));
  CHECK(trace["iterations"][2]["total"].get<double>() < trace["iterations"][0]["total"].get<double>());

  const std::string input = d / "source/src_001.wvol";
  REQUIRE(cli({"synth", "--model", d / "m1.wmod", "--input", input, "--out", d / "o1.wvol"}).code == kExitOk);
  REQUIRE(cli({"synth", "--model", d / "m1.wmod", "--input", input, "--out", d / "o2.wvol"}).code == kExitOk);
  CHECK(read_file(d.path / "o1.wvol") == read_file(d.path / "o2.wvol"));
  const Volume o = load_volume(d.path / "o1.wvol");
  CHECK(o.rows() == 16);
  CHECK(o.cols() == 16);
  CHECK(o.depth() == 2);

  write_text(d / "other.json", R"({"k": 5, "d": 5})");
  CHECK(cli({"synth", "--model", d / "m1.wmod", "--input", input, "--out", d / "o3.wvol", "--config", d / "other.json"}).code == kExitUsage);
  CHECK(cli({"synth", "--model", d / "m1.wmod", "--input", input, "--out", d / "o3.wvol", "--config", d / "cfg.json"}).code == kExitOk);
  CHECK(cli({"synth", "--model", d / "m1.wmod", "--input", input, "--out", d / "o3.wvol", "--iters", "0"}).code == kExitUsage);
  CHECK(cli({"synth", "--model", d / "nope.wmod", "--input", input, "--out", d / "o3.wvol"}).code != kExitOk);

  const std::string ref = d / "target/tgt_001.wvol";
  auto r = cli({"eval", "--pred", d / "o1.wvol", "--ref", ref, "--json", d / "rep.json"});
  REQUIRE(r.code == kExitOk);
  const auto report = read_json(d / "rep.json");
  const auto lib = evaluate(load_volume(d.path / "o1.wvol"), load_volume(ref));
  CHECK(report["psnr_db"].get<double>() == lib.psnr_db);
  CHECK(report["ssim"].get<double>() == lib.ssim);
  REQUIRE(report["slices"].size() == 2);
  CHECK(report["slices"][1]["psnr_db"].get<double>() == lib.slices[1].psnr_db);

  r = cli({"eval", "--pred", ref, "--ref", ref});
  REQUIRE(r.code == kExitOk);
  const auto same = json::parse(r.out);
  CHECK(same["psnr_db"] == "inf");
  CHECK(same["ssim"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cli({"eval", "--pred", input, "--ref", ref}).code == kExitUsage);
}

TEST_CASE("eval of a uniform 0.1 error reports 20 dB") {
  TempDir d("eval");
  save_volume(d.path / "a.wvol", Volume(12, 12, 1, 0.25));
  save_volume(d.path / "b.wvol", Volume(12, 12, 1, 0.375));
  save_volume(d.path / "c.wvol", Volume(12, 12, 1, 0.5));
  const auto r = cli({"eval", "--pred", d / "a.wvol", "--ref", d / "b.wvol", "--peak", "1.25"});
  REQUIRE(r.code == kExitOk);
  CHECK(json::parse(r.out)["psnr_db"].get<double>() == doctest::Approx(20.0).epsilon(1e-12));
  const auto s = cli({"eval", "--pred", d / "a.wvol", "--ref", d / "c.wvol", "--peak", "2.5"});
  CHECK(json::parse(s.out)["psnr_db"].get<double>() == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("outer_iters 0 writes the identity mapping and zero input gives zero output") {
  TempDir d("noop");
  REQUIRE(cli({"phantom", "--out", d.path.string(), "--count", "1", "--size", "16x16x2"}).code == kExitOk);
  write_text(d / "cfg.json", R"({"k": 3, "d": 5, "outer_iters": 0, "pad": 4, "lowpass": 0})");
  REQUIRE(cli({"train", "--pairs", d / "pairs.json", "--config", d / "cfg.json", "--out", d / "m.wmod"}).code == kExitOk);
  const auto m = load_model(d.path / "m.wmod");
  CHECK(m.w == Eigen::MatrixXd::Identity(3, 3));
  save_volume(d.path / "zero.wvol", Volume(8, 8, 2, 0.0));
  REQUIRE(cli({"synth", "--model", d / "m.wmod", "--input", d / "zero.wvol", "--out", d / "z.wvol"}).code == kExitOk);
  const Volume z = load_volume(d.path / "z.wvol");
  CHECK(z.rows() == 16);
  CHECK(z.max() == 0.0);
  CHECK(z.min() == 0.0);
}
