#include "doctest.h"

#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "weenie/grid.hpp"

using namespace weenie;

TEST_CASE("pad_periodic with zero margin is the identity") {
  Slice s(2, 2, std::vector<double>{1, 2, 3, 4});
  CHECK(pad_periodic(s, 0) == s);
}

TEST_CASE("pad_periodic of a 1x1 constant fills the margin") {
  Slice s(1, 1, std::vector<double>{5});
  const Slice p = pad_periodic(s, 1);
  REQUIRE(p.rows() == 3);
  REQUIRE(p.cols() == 3);
  for (double v : p.values()) CHECK(v == 5.0);
}

TEST_CASE("pad_periodic matches index-wrap oracle") {
  std::mt19937_64 rng(3);
  for (std::size_t margin : {1u, 2u, 5u}) {
    Slice s(2, 2, std::vector<double>{0, 1, 2, 3});
    if (margin > 1) s = oracle::random_slice(3, 5, rng);
    const Slice p = pad_periodic(s, margin);
    REQUIRE(p.rows() == s.rows() + 2 * margin);
    REQUIRE(p.cols() == s.cols() + 2 * margin);
    const auto m = static_cast<long long>(margin);
    for (std::size_t i = 0; i < p.rows(); ++i)
      for (std::size_t j = 0; j < p.cols(); ++j)
        CHECK(p(i, j) == s(oracle::wrap(static_cast<long long>(i) - m, s.rows()),
                           oracle::wrap(static_cast<long long>(j) - m, s.cols())));
  }
}

TEST_CASE("crop after pad_periodic is the identity") {
  std::mt19937_64 rng(4);
  for (std::size_t margin : {0u, 1u, 8u}) {
    const Slice s = oracle::random_slice(7, 11, rng);
    CHECK(crop(pad_periodic(s, margin), margin) == s);
  }
}

TEST_CASE("fft2 of a constant is DC only") {
  Slice s(4, 6, 2.5);
  const auto g = fft2(s);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 6; ++c) {
      const Complex expect = (r == 0 && c == 0) ? Complex(2.5 * 24, 0) : Complex(0, 0);
      CHECK(std::abs(g(r, c) - expect) < 1e-12);
    }
}

TEST_CASE("fft2 of a delta is flat") {
  Slice s(5, 4, 0.0);
  s(0, 0) = 1.0;
  const auto g = fft2(s);
  for (const auto& v : g.data) CHECK(std::abs(v - Complex(1, 0)) < 1e-14);
}

TEST_CASE("fft2/ifft2 and rfft2/irfft2 round trip") {
  std::mt19937_64 rng(5);
  const Slice s = oracle::random_slice(8, 8, rng);
  CHECK(oracle::max_abs_diff(ifft2(fft2(s)), s) < 1e-10);
  const Slice odd = oracle::random_slice(7, 9, rng);
  CHECK(oracle::max_abs_diff(irfft2(rfft2(odd), 9), odd) < 1e-10);
  CHECK(oracle::max_abs_diff(ifft2(fft2(odd)), odd) < 1e-10);
}

TEST_CASE("rfft2 equals the first half of fft2") {
  std::mt19937_64 rng(6);
  const Slice s = oracle::random_slice(6, 10, rng);
  const auto full = fft2(s);
  const auto half = rfft2(s);
  REQUIRE(half.cols == 6);
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < half.cols; ++c) CHECK(std::abs(half(r, c) - full(r, c)) < 1e-10);
}

TEST_CASE("half spectrum weights reproduce Parseval") {
  std::mt19937_64 rng(7);
  for (std::size_t cols : {8u, 9u}) {
    const Slice s = oracle::random_slice(5, cols, rng);
    const auto half = rfft2(s);
    const auto w = half_spectrum_weights(cols);
    double spec = 0.0;
    for (std::size_t r = 0; r < half.rows; ++r)
      for (std::size_t c = 0; c < half.cols; ++c) spec += w[c] * std::norm(half(r, c));
    double space = 0.0;
    for (double v : s.values()) space += v * v;
    CHECK(spec / static_cast<double>(5 * cols) == doctest::Approx(space).epsilon(1e-12));
  }
}

TEST_CASE("conv_spatial with a delta filter is the identity") {
  std::mt19937_64 rng(8);
  const Slice s = oracle::random_slice(9, 7, rng);
  Kernel2D delta{3, 3, std::vector<double>(9, 0.0)};
  delta.taps[4] = 1.0;
  CHECK(conv_spatial(s, delta) == s);
}

TEST_CASE("conv_spatial of a constant scales by the tap sum") {
  std::mt19937_64 rng(9);
  const auto f = oracle::random_kernel(5, rng);
  double sum = 0.0;
  for (double t : f.taps) sum += t;
  const Slice out = conv_spatial(Slice(8, 8, 0.7), f);
  for (double v : out.values()) CHECK(v == doctest::Approx(0.7 * sum).epsilon(1e-12));
}

TEST_CASE("conv_spatial matches the index oracle and the frequency-domain product") {
  std::mt19937_64 rng(10);
  const Slice s = oracle::random_slice(16, 16, rng);
  const auto f = oracle::random_kernel(5, rng);
  const Slice direct = conv_spatial(s, f);
  CHECK(oracle::max_abs_diff(direct, oracle::conv(s, f)) < 1e-12);

  // Independent embedding: tap (a,b) lands at (a - c, b - c) modulo the size.
  Slice padded(16, 16, 0.0);
  for (std::size_t a = 0; a < 5; ++a)
    for (std::size_t b = 0; b < 5; ++b)
      padded(oracle::wrap(static_cast<long long>(a) - 2, 16),
             oracle::wrap(static_cast<long long>(b) - 2, 16)) = f(a, b);
  auto sh = fft2(s);
  const auto fh = fft2(padded);
  for (std::size_t i = 0; i < sh.data.size(); ++i) sh.data[i] *= fh.data[i];
  CHECK(oracle::max_abs_diff(ifft2(sh), direct) < 1e-8);
  CHECK(embed_kernel(f, 16, 16) == padded);
}

TEST_CASE("conv_spatial rejects filters larger than the slice") {
  std::mt19937_64 rng(11);
  CHECK_THROWS_AS(conv_spatial(Slice(4, 4, 1.0), oracle::random_kernel(5, rng)),
                  std::invalid_argument);
}

TEST_CASE("conv_fourier trivial cases and errors") {
  std::mt19937_64 rng(12);
  const auto sh = fft2(oracle::random_slice(6, 6, rng));
  ComplexGrid ones(6, 6);
  for (auto& v : ones.data) v = 1.0;
  const auto same = conv_fourier(sh, ones);
  for (std::size_t i = 0; i < sh.data.size(); ++i) CHECK(same.data[i] == sh.data[i]);
  const auto zero = conv_fourier(ComplexGrid(6, 6), sh);
  for (const auto& v : zero.data) CHECK(v == Complex(0, 0));
  CHECK_THROWS_AS(conv_fourier(sh, ComplexGrid(6, 5)), std::invalid_argument);
}

TEST_CASE("conv_fourier matches conv_spatial") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 10; ++t) {
    const std::size_t rows = 8 + rng() % 20, cols = 8 + rng() % 20, d = 1 + 2 * (rng() % 4);
    const Slice s = oracle::random_slice(rows, cols, rng);
    const auto f = oracle::random_kernel(d, rng);
    const Slice viaf = ifft2(conv_fourier(fft2(s), fft2(embed_kernel(f, rows, cols))));
    CHECK(oracle::max_abs_diff(viaf, conv_spatial(s, f)) < 1e-8);
  }
}

TEST_CASE("convolution is linear") {
  std::mt19937_64 rng(14);
  const Slice a = oracle::random_slice(12, 10, rng), b = oracle::random_slice(12, 10, rng);
  const auto f = oracle::random_kernel(7, rng);
  Slice mix(12, 10);
  for (std::size_t i = 0; i < mix.size(); ++i) mix.values()[i] = 2.0 * a.values()[i] - 0.5 * b.values()[i];
  const Slice ca = conv_spatial(a, f), cb = conv_spatial(b, f), cm = conv_spatial(mix, f);
  for (std::size_t i = 0; i < cm.size(); ++i)
    CHECK(std::abs(cm.values()[i] - (2.0 * ca.values()[i] - 0.5 * cb.values()[i])) < 1e-10);
}

TEST_CASE("tikhonov_lowpass") {
  std::mt19937_64 rng(15);
  const Slice s = oracle::random_slice(10, 12, rng);
  CHECK(tikhonov_lowpass(s, 0.0) == s);
  CHECK_THROWS_AS(tikhonov_lowpass(s, -1.0), std::invalid_argument);

  // Constants pass unchanged; the result satisfies (I + mu G^T G) l = s with
  // G the circular forward difference.
  const Slice c = tikhonov_lowpass(Slice(6, 6, 0.3), 4.0);
  for (double v : c.values()) CHECK(v == doctest::Approx(0.3).epsilon(1e-12));
  const double mu = 2.5;
  const Slice l = tikhonov_lowpass(s, mu);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 12; ++j) {
      const auto ii = static_cast<long long>(i), jj = static_cast<long long>(j);
      const double lap = 4.0 * l(i, j) - l(oracle::wrap(ii - 1, 10), j) - l(oracle::wrap(ii + 1, 10), j) -
                         l(i, oracle::wrap(jj - 1, 12)) - l(i, oracle::wrap(jj + 1, 12));
      CHECK(l(i, j) + mu * lap == doctest::Approx(s(i, j)).epsilon(1e-10));
    }
}
