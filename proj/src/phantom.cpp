#include "weenie/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "weenie/resample.hpp"

namespace weenie {

Modality parse_modality(std::string_view name) {
  if (name == "sigmoid-remap") return Modality::SigmoidRemap;
  if (name == "inverse") return Modality::Inverse;
  if (name == "gamma") return Modality::Gamma;
  throw std::invalid_argument("unknown modality: " + std::string(name));
}

std::string modality_name(Modality m) {
  switch (m) {
    case Modality::SigmoidRemap: return "sigmoid-remap";
    case Modality::Inverse: return "inverse";
    case Modality::Gamma: return "gamma";
  }
  return "unknown";
}

double apply_modality(Modality m, double x) {
  switch (m) {
    case Modality::SigmoidRemap: return 1.0 / (1.0 + std::exp(-8.0 * (x - 0.5)));
    case Modality::Inverse: return 1.0 - x;
    case Modality::Gamma: return std::sqrt(std::max(x, 0.0));
  }
  return x;
}

Volume apply_modality(Modality m, const Volume& v) {
  Volume out = v;
  for (auto& s : out.slices()) {
    for (double& x : s.values()) x = apply_modality(m, x);
  }
  return out;
}

namespace {

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

std::mt19937_64 subject_rng(std::uint64_t seed, std::size_t subject) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(subject), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

}  // namespace

Volume phantom_subject(const PhantomSpec& spec, std::size_t subject) {
  if (spec.rows == 0 || spec.cols == 0 || spec.depth == 0) {
    throw std::invalid_argument("phantom: dims must be >= 1");
  }
  auto rng = subject_rng(spec.seed, subject);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const double m = static_cast<double>(spec.rows);
  const double n = static_cast<double>(spec.cols);
  const double t = static_cast<double>(spec.depth);
  const double two_pi = 2.0 * std::numbers::pi;

  struct Wave { double kr, kc, kz, phase, amp; };
  std::vector<Wave> waves(3);
  for (auto& w : waves) {
    w = {std::floor(uniform(0.0, 2.99)), std::floor(uniform(0.0, 2.99)),
         std::floor(uniform(0.0, 1.99)), uniform(0.0, two_pi), uniform(0.03, 0.08)};
  }

  struct Ellipsoid { double cr, cc, cz, ra, rb, rz, angle, amp; };
  std::vector<Ellipsoid> ellipsoids(spec.ellipsoids);
  const double extent = std::min(m, n);
  for (auto& e : ellipsoids) {
    e.cr = uniform(0.2, 0.8) * m;
    e.cc = uniform(0.2, 0.8) * n;
    e.cz = uniform(0.0, t - 1.0);
    e.ra = uniform(0.08, 0.25) * extent;
    e.rb = uniform(0.08, 0.25) * extent;
    e.rz = uniform(0.6, 1.5) * t;
    e.angle = uniform(0.0, std::numbers::pi);
    e.amp = uniform(0.25, 0.6) * (unit(rng) < 0.25 ? -0.6 : 1.0);
  }

  struct Ridge { double pr, pc, angle, drift, amp; };
  std::vector<Ridge> ridges(spec.ridges);
  for (auto& r : ridges) {
    r = {uniform(0.2, 0.8) * m, uniform(0.2, 0.8) * n, uniform(0.0, std::numbers::pi),
         uniform(-0.5, 0.5), uniform(0.2, 0.4)};
  }

  Volume v(spec.rows, spec.cols, spec.depth);
  for (std::size_t z = 0; z < spec.depth; ++z) {
    const double zf = static_cast<double>(z);
    for (std::size_t i = 0; i < spec.rows; ++i) {
      const double r = static_cast<double>(i);
      for (std::size_t j = 0; j < spec.cols; ++j) {
        const double c = static_cast<double>(j);
        double value = 0.25;
        for (const auto& w : waves) {
          value += w.amp * std::cos(two_pi * (w.kr * r / m + w.kc * c / n + w.kz * zf / t) + w.phase);
        }
        for (const auto& e : ellipsoids) {
          const double dr = r - e.cr;
          const double dc = c - e.cc;
          const double u = (std::cos(e.angle) * dr + std::sin(e.angle) * dc) / e.ra;
          const double vv = (-std::sin(e.angle) * dr + std::cos(e.angle) * dc) / e.rb;
          const double w = (zf - e.cz) / e.rz;
          const double rho = std::sqrt(u * u + vv * vv + w * w);
          // Edge width of roughly one pixel.
          const double scale = 0.5 * (e.ra + e.rb);
          value += e.amp * logistic((1.0 - rho) * scale * 1.5);
        }
        for (const auto& rd : ridges) {
          const double pc = rd.pc + rd.drift * zf;
          const double dist = -std::sin(rd.angle) * (r - rd.pr) + std::cos(rd.angle) * (c - pc);
          value += rd.amp * std::exp(-0.5 * dist * dist / 0.64);
        }
        v(i, j, z) = value;
      }
    }
  }

  const double lo = v.min();
  const double hi = v.max();
  const double span = hi > lo ? hi - lo : 1.0;
  for (auto& s : v.slices()) {
    for (double& x : s.values()) x = (x - lo) / span;
  }
  return v;
}

std::vector<PhantomPair> generate_phantoms(const PhantomSpec& spec) {
  if (spec.count == 0) throw std::invalid_argument("phantom: count must be >= 1");
  if (spec.registered_fraction < 0.0 || spec.registered_fraction > 1.0) {
    throw std::invalid_argument("phantom: registered fraction must lie in [0, 1]");
  }

  std::vector<Volume> hr(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) hr[i] = phantom_subject(spec, i);

  const auto registered = static_cast<std::size_t>(
      std::llround(spec.registered_fraction * static_cast<double>(spec.count)));
  std::vector<std::size_t> target_of(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) target_of[i] = i;
  auto shuffle_rng = subject_rng(spec.seed ^ 0x5bd1e995ULL, spec.count);
  std::shuffle(target_of.begin() + static_cast<std::ptrdiff_t>(registered), target_of.end(),
               shuffle_rng);

  const DegradationSpec degradation{spec.scale, -0.5};
  std::vector<PhantomPair> pairs(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    auto& p = pairs[i];
    p.source = degrade(hr[i], degradation);
    p.target = apply_modality(spec.modality, hr[target_of[i]]);
    p.hr_source = hr[i];
    p.registered = i < registered;
    p.source_subject = i;
    p.target_subject = target_of[i];
  }
  return pairs;
}

}  // namespace weenie
