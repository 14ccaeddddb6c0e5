#include "weenie/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "weenie/align.hpp"
#include "weenie/io.hpp"
#include "weenie/phantom.hpp"
#include "weenie/quality.hpp"
#include "weenie/synth.hpp"

namespace weenie {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Validation failures that map to the usage exit code.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double get_number(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.at(key).is_number()) throw FormatError(ctx + key + ": expected a number");
  return j.at(key).get<double>();
}

std::size_t get_count(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.at(key).is_number_unsigned()) {
    throw FormatError(ctx + key + ": expected a non-negative integer");
  }
  return j.at(key).get<std::size_t>();
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& ctx) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.contains(it.key())) throw FormatError(ctx + it.key() + ": unknown field");
  }
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw UsageError("cannot open " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<fs::path> list_volumes(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw UsageError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".wvol") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string zero_padded(std::size_t i) {
  std::ostringstream os;
  os << std::setw(3) << std::setfill('0') << i;
  return os.str();
}

std::string relative_to(const fs::path& p, const fs::path& manifest) {
  const fs::path base = manifest.parent_path().empty() ? fs::path(".") : manifest.parent_path();
  return fs::proximate(p, base).generic_string();
}

int cmd_phantom(const fs::path& out_dir, std::size_t count, const std::string& size,
                std::uint64_t seed, const std::string& modality, double fraction,
                std::ostream& out) {
  static const std::regex size_re(R"((\d+)x(\d+)x(\d+))");
  std::smatch m;
  if (!std::regex_match(size, m, size_re)) throw UsageError("--size must look like 32x32x4");
  PhantomSpec spec;
  spec.rows = std::stoul(m[1]);
  spec.cols = std::stoul(m[2]);
  spec.depth = std::stoul(m[3]);
  if (spec.rows < 10 || spec.cols < 10 || spec.depth == 0) {
    throw UsageError("--size must be at least 10x10x1");
  }
  if (count == 0) throw UsageError("--count must be >= 1");
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw UsageError("--registered-fraction must be in [0, 1]");
  }
  spec.count = count;
  spec.seed = seed;
  try {
    spec.modality = parse_modality(modality);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  spec.registered_fraction = fraction;

  const auto pairs = generate_phantoms(spec);
  fs::create_directories(out_dir / "source");
  fs::create_directories(out_dir / "target");
  const fs::path manifest = out_dir / "pairs.json";
  std::vector<ManifestEntry> entries;
  json truth = json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const fs::path src = out_dir / "source" / ("src_" + zero_padded(i) + ".wvol");
    const fs::path tgt = out_dir / "target" / ("tgt_" + zero_padded(i) + ".wvol");
    save_volume(src, pairs[i].source);
    save_volume(tgt, pairs[i].target);
    entries.push_back({relative_to(src, manifest), relative_to(tgt, manifest),
                       pairs[i].registered, std::nullopt});
    truth.push_back({{"source", relative_to(src, manifest)},
                     {"target", relative_to(tgt, manifest)},
                     {"source_subject", pairs[i].source_subject},
                     {"target_subject", pairs[i].target_subject},
                     {"registered", pairs[i].registered}});
  }
  write_manifest(manifest, entries);
  std::ofstream t(out_dir / "truth.json", std::ios::trunc);
  if (!t) throw std::runtime_error("cannot write truth.json");
  t << truth.dump(2) << '\n';
  out << "wrote " << pairs.size() << " phantom pairs to " << out_dir.string() << '\n';
  return kExitOk;
}

int cmd_align(const fs::path& source_dir, const fs::path& target_dir, double sigma,
              const fs::path& out_path, const std::string& pairs_path, std::ostream& out) {
  if (!(sigma > 0.0)) throw UsageError("--sigma must be > 0");
  auto sources = list_volumes(source_dir);
  auto targets = list_volumes(target_dir);

  std::vector<ManifestEntry> entries;
  std::vector<TrainingPair> registered;
  std::set<fs::path> used;
  if (!pairs_path.empty()) {
    const fs::path pm(pairs_path);
    for (const auto& e : read_manifest(pm)) {
      if (!e.registered) continue;
      const auto src = resolve_manifest_path(pm, e.source);
      const auto tgt = resolve_manifest_path(pm, e.target);
      used.insert(fs::weakly_canonical(src));
      used.insert(fs::weakly_canonical(tgt));
      entries.push_back({relative_to(src, out_path), relative_to(tgt, out_path), true, std::nullopt});
    }
  }
  auto unused = [&](std::vector<fs::path>& v) {
    std::erase_if(v, [&](const fs::path& p) { return used.contains(fs::weakly_canonical(p)); });
  };
  unused(sources);
  unused(targets);
  if (sources.empty() && entries.empty()) throw UsageError("no source volumes to align");
  if (!sources.empty() && targets.empty()) throw UsageError("no target volumes to align");

  std::vector<Volume> xs;
  std::vector<Volume> ys;
  for (const auto& p : sources) xs.push_back(normalize_unit(load_volume(p)));
  for (const auto& p : targets) ys.push_back(normalize_unit(load_volume(p)));
  if (!xs.empty()) {
    AlignOptions opt;
    opt.sigma = sigma;
    const auto res = align_unpaired(xs, ys, {}, opt);
    for (std::size_t p = 0; p < sources.size(); ++p) {
      const std::size_t q = res.alignment.match[p];
      entries.push_back({relative_to(sources[p], out_path), relative_to(targets[q], out_path),
                         false,
                         res.kernels.entries(static_cast<Eigen::Index>(p),
                                             static_cast<Eigen::Index>(q))});
    }
  }
  write_manifest(out_path, entries);
  out << "wrote " << entries.size() << " pairs (" << sources.size() << " aligned) to "
      << out_path.string() << '\n';
  return kExitOk;
}

int cmd_train(const fs::path& pairs_path, const std::string& config_path,
              const fs::path& model_path, const std::string& trace_path, std::ostream& out) {
  if (!fs::exists(pairs_path)) throw UsageError("pairs file not found: " + pairs_path.string());
  TrainConfig cfg;
  std::string config_text;
  if (!config_path.empty()) {
    config_text = read_text(config_path);
    cfg = parse_train_config(config_text);
  }
  const auto pairs = load_pairs(pairs_path);
  auto res = train(pairs, cfg);
  res.model.provenance = "fnv1a:" + fnv1a_hex(read_text(pairs_path) + '\n' + config_text);
  save_model(model_path, res.model);
  if (!trace_path.empty()) write_trace(trace_path, res.trace);
  out << "trained on " << pairs.size() << " pairs: objective " << res.trace.front().total
      << " -> " << res.trace.back().total << '\n';
  if (res.nonconverged > 0) {
    out << res.nonconverged << " inner solves stopped at max_iters\n";
  }
  return kExitOk;
}

int cmd_synth(const fs::path& model_path, const fs::path& input, const fs::path& out_path,
              std::size_t iters, double scale, const std::string& config_path, bool raw,
              std::ostream& out) {
  if (iters == 0) throw UsageError("--iters must be >= 1");
  if (!(scale > 0.0)) throw UsageError("--scale must be > 0");
  const TrainedModel model = load_model(model_path);
  if (!config_path.empty()) {
    const TrainConfig cfg = load_train_config(config_path);
    if (cfg.k != model.k() || cfg.d != model.d()) {
      throw UsageError("model has k=" + std::to_string(model.k()) + ", d=" +
                       std::to_string(model.d()) + " but config has k=" + std::to_string(cfg.k) +
                       ", d=" + std::to_string(cfg.d));
    }
  }
  SynthesisConfig sc = synthesis_config_for(model);
  sc.iters = iters;
  sc.clamp = !raw;
  const Volume lr = normalize_unit(load_volume(input));
  const Volume result = synthesize_from_lr(lr, model, sc, scale);
  save_volume(out_path, result);
  out << "synthesized " << result.rows() << "x" << result.cols() << "x" << result.depth()
      << " volume to " << out_path.string() << '\n';
  return kExitOk;
}

int cmd_eval(const fs::path& pred, const fs::path& ref, const std::string& json_path, double peak,
             std::ostream& out) {
  if (!(peak > 0.0)) throw UsageError("--peak must be > 0");
  const Volume a = load_volume(pred);
  const Volume b = load_volume(ref);
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.depth() != b.depth()) {
    throw UsageError("prediction and reference dimensions differ");
  }
  const auto report = evaluate(a, b, peak);
  const std::string text = report_json(report);
  if (!json_path.empty()) {
    std::ofstream f(json_path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + json_path);
    f << text << '\n';
  }
  out << text << '\n';
  return kExitOk;
}

}  // namespace

TrainConfig parse_train_config(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw FormatError("config: invalid JSON");
  if (!j.is_object()) throw FormatError("config: top level must be an object");
  check_keys(j,
             {"lambda", "beta", "gamma", "sigma", "k", "d", "outer_iters", "pad", "slice_stride",
              "seed", "init_scale", "lowpass", "tied_init", "inner", "filter"},
             "config.");
  TrainConfig c;
  const std::string ctx = "config.";
  if (j.contains("lambda")) c.lambda = get_number(j, "lambda", ctx);
  if (j.contains("beta")) c.beta = get_number(j, "beta", ctx);
  if (j.contains("gamma")) c.gamma = get_number(j, "gamma", ctx);
  if (j.contains("sigma")) c.sigma = get_number(j, "sigma", ctx);
  if (j.contains("k")) c.k = get_count(j, "k", ctx);
  if (j.contains("d")) c.d = get_count(j, "d", ctx);
  if (j.contains("outer_iters")) c.outer_iters = get_count(j, "outer_iters", ctx);
  if (j.contains("pad")) c.pad = get_count(j, "pad", ctx);
  if (j.contains("slice_stride")) c.slice_stride = get_count(j, "slice_stride", ctx);
  if (j.contains("seed")) c.seed = get_count(j, "seed", ctx);
  if (j.contains("init_scale")) c.init_scale = get_number(j, "init_scale", ctx);
  if (j.contains("lowpass")) c.lowpass = get_number(j, "lowpass", ctx);
  if (j.contains("tied_init")) {
    if (!j["tied_init"].is_boolean()) throw FormatError("config.tied_init: expected a boolean");
    c.tied_init = j["tied_init"].get<bool>();
  }
  if (j.contains("inner")) {
    const auto& in = j["inner"];
    const std::string ictx = "config.inner.";
    if (!in.is_object()) throw FormatError("config.inner: expected an object");
    check_keys(in, {"rho", "max_iters", "tol", "coupled_passes"}, ictx);
    if (in.contains("rho")) c.inner.rho = get_number(in, "rho", ictx);
    if (in.contains("max_iters")) c.inner.max_iters = get_count(in, "max_iters", ictx);
    if (in.contains("tol")) c.inner.tol = get_number(in, "tol", ictx);
    if (in.contains("coupled_passes")) c.inner.coupled_passes = get_count(in, "coupled_passes", ictx);
  }
  if (j.contains("filter")) {
    const auto& f = j["filter"];
    const std::string fctx = "config.filter.";
    if (!f.is_object()) throw FormatError("config.filter: expected an object");
    check_keys(f, {"max_iters", "tol", "ridge", "rho_scale"}, fctx);
    if (f.contains("max_iters")) c.filter.max_iters = get_count(f, "max_iters", fctx);
    if (f.contains("tol")) c.filter.tol = get_number(f, "tol", fctx);
    if (f.contains("ridge")) c.filter.ridge = get_number(f, "ridge", fctx);
    if (f.contains("rho_scale")) c.filter.rho_scale = get_number(f, "rho_scale", fctx);
  }
  c.inner.lambda = c.lambda;
  c.inner.seed = c.seed;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  return c;
}

TrainConfig load_train_config(const fs::path& path) { return parse_train_config(read_text(path)); }

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint convolutional sparse coding for super-resolution and cross-modality synthesis",
               "weenie"};
  app.require_subcommand(1);

  std::string p_out, p_size = "32x32x4", p_modality = "sigmoid-remap";
  std::size_t p_count = 1;
  std::uint64_t p_seed = 0;
  double p_fraction = 1.0;
  auto* phantom = app.add_subcommand("phantom", "Generate paired phantom volumes");
  phantom->add_option("--out", p_out, "Output directory")->required();
  phantom->add_option("--count", p_count, "Number of subjects");
  phantom->add_option("--size", p_size, "HR size as RxCxD");
  phantom->add_option("--seed", p_seed, "Random seed");
  phantom->add_option("--modality", p_modality, "sigmoid-remap, inverse or gamma");
  phantom->add_option("--registered-fraction", p_fraction, "Fraction of registered pairs");

  std::string a_src, a_tgt, a_out, a_pairs;
  double a_sigma = 1.0;
  auto* align = app.add_subcommand("align", "Pair unregistered source and target volumes");
  align->add_option("--source-dir", a_src, "Directory of LR source volumes")->required();
  align->add_option("--target-dir", a_tgt, "Directory of HR target volumes")->required();
  align->add_option("--sigma", a_sigma, "Gaussian kernel width");
  align->add_option("--out", a_out, "Output manifest")->required();
  align->add_option("--pairs", a_pairs, "Manifest whose registered pairs are kept as is");

  std::string t_pairs, t_config, t_out, t_trace;
  auto* trainc = app.add_subcommand("train", "Learn filter banks and the mapping");
  trainc->add_option("--pairs", t_pairs, "Pair manifest")->required();
  trainc->add_option("--config", t_config, "Training configuration JSON");
  trainc->add_option("--out", t_out, "Output model (.wmod)")->required();
  trainc->add_option("--trace", t_trace, "Objective trace JSON");

  std::string s_model, s_input, s_out, s_config;
  std::size_t s_iters = 3;
  double s_scale = 2.0;
  bool s_raw = false;
  auto* synth = app.add_subcommand("synth", "Synthesize HR target-modality volumes");
  synth->add_option("--model", s_model, "Trained model")->required();
  synth->add_option("--input", s_input, "LR source volume")->required();
  synth->add_option("--out", s_out, "Output volume")->required();
  synth->add_option("--iters", s_iters, "Refinement iterations");
  synth->add_option("--scale", s_scale, "Upscaling factor");
  synth->add_option("--config", s_config, "Configuration to check against the model");
  synth->add_flag("--raw", s_raw, "Skip the final [0, 1] clamp");

  std::string e_pred, e_ref, e_json;
  double e_peak = 1.0;
  auto* evalc = app.add_subcommand("eval", "PSNR and SSIM of a prediction");
  evalc->add_option("--pred", e_pred, "Predicted volume")->required();
  evalc->add_option("--ref", e_ref, "Reference volume")->required();
  evalc->add_option("--json", e_json, "Report output path");
  evalc->add_option("--peak", e_peak, "Peak intensity");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*phantom) return cmd_phantom(p_out, p_count, p_size, p_seed, p_modality, p_fraction, out);
    if (*align) return cmd_align(a_src, a_tgt, a_sigma, a_out, a_pairs, out);
    if (*trainc) return cmd_train(t_pairs, t_config, t_out, t_trace, out);
    if (*synth) {
      return cmd_synth(s_model, s_input, s_out, s_iters, s_scale, s_config, s_raw, out);
    }
    if (*evalc) return cmd_eval(e_pred, e_ref, e_json, e_peak, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace weenie
