#include "weenie/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace weenie {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::uint8_t kVersion = 1;

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(Bytes& out, double v) { put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

class Reader {
 public:
  Reader(const Bytes& b, const char* what) : b_(b), what_(what) {}

  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw FormatError(std::string(what_) + ": truncated file");
  }
  std::uint8_t u8() {
    need(1);
    return b_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b_[pos_++]) << (8 * i);
    return v;
  }
  double f32() { return static_cast<double>(std::bit_cast<float>(u32())); }
  std::string str(std::size_t n) {
    need(n);
    std::string s(b_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  b_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  const Bytes& b_;
  const char* what_;
  std::size_t pos_ = 0;
};

void expect_header(Reader& r, const char* magic, const char* what) {
  if (r.str(4) != magic) throw FormatError(std::string(what) + ": bad magic");
  const auto v = r.u8();
  if (v != kVersion) {
    throw FormatError(std::string(what) + ": unsupported version " + std::to_string(v));
  }
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xffffffffu) throw std::invalid_argument(std::string(what) + " exceeds 32 bits");
  return static_cast<std::uint32_t>(v);
}

template <typename T>
T field(const json& j, const char* name, const char* ctx) {
  if (!j.contains(name)) throw FormatError(std::string(ctx) + ": missing field '" + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string(ctx) + ": field '" + name + "' has the wrong type");
  }
}

}  // namespace

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Bytes encode_volume(const Volume& v) {
  Bytes out{'W', 'V', 'O', 'L', kVersion};
  put_u32(out, checked_u32(v.rows(), "rows"));
  put_u32(out, checked_u32(v.cols(), "cols"));
  put_u32(out, checked_u32(v.depth(), "depth"));
  out.reserve(out.size() + 4 * v.voxel_count());
  for (const auto& s : v.slices()) {
    for (double x : s.values()) put_f32(out, x);
  }
  return out;
}

Volume decode_volume(const Bytes& bytes) {
  Reader r(bytes, "WVOL");
  expect_header(r, "WVOL", "WVOL");
  const std::size_t rows = r.u32();
  const std::size_t cols = r.u32();
  const std::size_t depth = r.u32();
  if (rows == 0 || cols == 0 || depth == 0) throw FormatError("WVOL: zero dimension");
  if (r.remaining() != 4 * rows * cols * depth) throw FormatError("WVOL: payload size mismatch");
  std::vector<Slice> slices;
  slices.reserve(depth);
  for (std::size_t z = 0; z < depth; ++z) {
    Slice s(rows, cols);
    for (double& x : s.values()) x = r.f32();
    slices.push_back(std::move(s));
  }
  return Volume(std::move(slices));
}

void save_volume(const fs::path& path, const Volume& v) { write_file(path, encode_volume(v)); }
Volume load_volume(const fs::path& path) { return decode_volume(read_file(path)); }

Bytes encode_model(const TrainedModel& m) {
  const TrainConfig& c = m.config;
  json notes = {
      {"outer_iters", c.outer_iters},
      {"slice_stride", c.slice_stride},
      {"init_scale", c.init_scale},
      {"lowpass", c.lowpass},
      {"tied_init", c.tied_init},
      {"low", {{"gain", m.low.gain}, {"offset", m.low.offset}}},
      {"inner",
       {{"lambda", c.inner.lambda},
        {"rho", c.inner.rho},
        {"max_iters", c.inner.max_iters},
        {"tol", c.inner.tol},
        {"seed", c.inner.seed},
        {"coupled_passes", c.inner.coupled_passes}}},
      {"filter",
       {{"max_iters", c.filter.max_iters},
        {"tol", c.filter.tol},
        {"ridge", c.filter.ridge},
        {"rho_scale", c.filter.rho_scale}}},
      {"provenance", m.provenance},
  };
  json header = {{"k", m.fbx.k()},       {"d", m.fbx.d()},       {"lambda", c.lambda},
                 {"beta", c.beta},       {"gamma", c.gamma},     {"sigma", c.sigma},
                 {"seed", c.seed},       {"pad", c.pad},         {"notes", notes.dump()}};
  const std::string hs = header.dump();

  Bytes out{'W', 'M', 'O', 'D', kVersion};
  put_u32(out, checked_u32(hs.size(), "header"));
  out.insert(out.end(), hs.begin(), hs.end());
  for (double x : m.fbx.coeffs()) put_f32(out, x);
  for (double x : m.fby.coeffs()) put_f32(out, x);
  for (Eigen::Index i = 0; i < m.w.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.w.cols(); ++j) put_f32(out, m.w(i, j));
  }
  return out;
}

TrainedModel decode_model(const Bytes& bytes) {
  Reader r(bytes, "WMOD");
  expect_header(r, "WMOD", "WMOD");
  const std::size_t len = r.u32();
  json header;
  try {
    header = json::parse(r.str(len));
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("WMOD: header is not valid JSON: ") + e.what());
  }
  TrainedModel m;
  TrainConfig& c = m.config;
  const auto k = field<std::size_t>(header, "k", "WMOD header");
  const auto d = field<std::size_t>(header, "d", "WMOD header");
  c.k = k;
  c.d = d;
  c.lambda = field<double>(header, "lambda", "WMOD header");
  c.beta = field<double>(header, "beta", "WMOD header");
  c.gamma = field<double>(header, "gamma", "WMOD header");
  c.sigma = field<double>(header, "sigma", "WMOD header");
  c.seed = field<std::uint64_t>(header, "seed", "WMOD header");
  c.pad = field<std::size_t>(header, "pad", "WMOD header");
  const auto notes_text = field<std::string>(header, "notes", "WMOD header");
  if (!notes_text.empty()) {
    json notes = json::parse(notes_text, nullptr, false);
    if (notes.is_discarded() || !notes.is_object()) throw FormatError("WMOD: notes is not a JSON object");
    c.outer_iters = notes.value("outer_iters", c.outer_iters);
    c.slice_stride = notes.value("slice_stride", c.slice_stride);
    c.init_scale = notes.value("init_scale", c.init_scale);
    c.lowpass = notes.value("lowpass", c.lowpass);
    c.tied_init = notes.value("tied_init", c.tied_init);
    if (notes.contains("low")) {
      m.low.gain = notes["low"].value("gain", m.low.gain);
      m.low.offset = notes["low"].value("offset", m.low.offset);
    }
    if (notes.contains("inner")) {
      const auto& in = notes["inner"];
      c.inner.lambda = in.value("lambda", c.inner.lambda);
      c.inner.rho = in.value("rho", c.inner.rho);
      c.inner.max_iters = in.value("max_iters", c.inner.max_iters);
      c.inner.tol = in.value("tol", c.inner.tol);
      c.inner.seed = in.value("seed", c.inner.seed);
      c.inner.coupled_passes = in.value("coupled_passes", c.inner.coupled_passes);
    }
    if (notes.contains("filter")) {
      const auto& f = notes["filter"];
      c.filter.max_iters = f.value("max_iters", c.filter.max_iters);
      c.filter.tol = f.value("tol", c.filter.tol);
      c.filter.ridge = f.value("ridge", c.filter.ridge);
      c.filter.rho_scale = f.value("rho_scale", c.filter.rho_scale);
    }
    m.provenance = notes.value("provenance", std::string());
  }
  if (k == 0 || d == 0) throw FormatError("WMOD: k and d must be >= 1");
  if (r.remaining() != 4 * (2 * k * d * d + k * k)) throw FormatError("WMOD: payload size mismatch");
  std::vector<double> fx(k * d * d);
  std::vector<double> fy(k * d * d);
  for (double& x : fx) x = r.f32();
  for (double& x : fy) x = r.f32();
  m.fbx = FilterBank(k, d, std::move(fx));
  m.fby = FilterBank(k, d, std::move(fy));
  m.w.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < m.w.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.w.cols(); ++j) m.w(i, j) = r.f32();
  }
  return m;
}

void save_model(const fs::path& path, const TrainedModel& m) { write_file(path, encode_model(m)); }
TrainedModel load_model(const fs::path& path) { return decode_model(read_file(path)); }

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open manifest " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw FormatError("manifest " + path.string() + ": invalid JSON");
  if (!j.is_array()) throw FormatError("manifest: top level must be an array");
  std::vector<ManifestEntry> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string ctx = "manifest entry " + std::to_string(i);
    const auto& e = j[i];
    if (!e.is_object()) throw FormatError(ctx + ": must be an object");
    ManifestEntry m;
    m.source = field<std::string>(e, "source", ctx.c_str());
    m.target = field<std::string>(e, "target", ctx.c_str());
    m.registered = field<bool>(e, "registered", ctx.c_str());
    if (e.contains("kernel") && !e["kernel"].is_null()) {
      if (!e["kernel"].is_number()) throw FormatError(ctx + ": field 'kernel' must be a number or null");
      m.kernel = e["kernel"].get<double>();
    }
    out.push_back(std::move(m));
  }
  return out;
}

void write_manifest(const fs::path& path, const std::vector<ManifestEntry>& entries) {
  json j = json::array();
  for (const auto& e : entries) {
    json o = {{"source", e.source}, {"target", e.target}, {"registered", e.registered}};
    o["kernel"] = e.kernel ? json(*e.kernel) : json(nullptr);
    j.push_back(std::move(o));
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

fs::path resolve_manifest_path(const fs::path& manifest, const std::string& entry) {
  const fs::path p(entry);
  if (p.is_absolute()) return p;
  return manifest.parent_path() / p;
}

std::vector<TrainingPair> load_pairs(const fs::path& manifest) {
  const auto entries = read_manifest(manifest);
  if (entries.empty()) throw FormatError("manifest: no pairs");
  std::vector<TrainingPair> pairs;
  for (const auto& e : entries) {
    for (const auto& f : {e.source, e.target}) {
      const auto path = resolve_manifest_path(manifest, f);
      if (!fs::is_regular_file(path)) throw FormatError("manifest: missing volume " + path.string());
    }
    TrainingPair p;
    p.source = normalize_unit(load_volume(resolve_manifest_path(manifest, e.source)));
    p.target = normalize_unit(load_volume(resolve_manifest_path(manifest, e.target)));
    p.registered = e.registered;
    p.kernel = e.kernel;
    pairs.push_back(std::move(p));
  }
  return pairs;
}

void write_trace(const fs::path& path, const std::vector<ObjectiveTerms>& trace) {
  json its = json::array();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& t = trace[i];
    its.push_back({{"index", i},
                   {"total", t.total},
                   {"recon_x", t.recon_x},
                   {"recon_y", t.recon_y},
                   {"coupling", t.coupling},
                   {"l1", t.l1},
                   {"w_reg", t.w_reg},
                   {"mmd", t.mmd},
                   {"align_const", t.align_const}});
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << json{{"iterations", its}}.dump(2) << '\n';
}

std::string report_json(const MetricReport& r) {
  auto num = [](double v) { return std::isinf(v) && v > 0 ? json("inf") : json(v); };
  json slices = json::array();
  for (const auto& s : r.slices) {
    slices.push_back({{"index", s.index}, {"psnr_db", num(s.psnr_db)}, {"ssim", s.ssim}});
  }
  return json{{"psnr_db", num(r.psnr_db)}, {"ssim", r.ssim}, {"slices", slices}}.dump(2);
}

Volume normalize_unit(const Volume& v) {
  const double lo = v.min();
  const double hi = v.max();
  Volume out = v;
  for (auto& s : out.slices()) {
    for (double& x : s.values()) x = hi > lo ? (x - lo) / (hi - lo) : 0.0;
  }
  return out;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace weenie
