// Copyright 2026 cmaf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <vector>

#include "cmaf/error.hpp"
#include "cmaf/rng.hpp"
#include "cmaf/signal.hpp"
#include "doctest.h"

using namespace cmaf::signal;
using cmaf::Rng;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Quadrature oracle for -integral f ln f of a zero-mean Gaussian with
// variance var over [-12 sigma, 12 sigma] (Simpson's rule).
double entropy_by_quadrature(double var, std::size_t intervals = 20000) {
  const double sigma = std::sqrt(var);
  const double lo = -12.0 * sigma, hi = 12.0 * sigma;
  const double h = (hi - lo) / static_cast<double>(intervals);
  auto integrand = [&](double x) {
    const double f =
        std::exp(-x * x / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
    return f > 0.0 ? -f * std::log(f) : 0.0;
  };
  double acc = integrand(lo) + integrand(hi);
  for (std::size_t i = 1; i < intervals; ++i) {
    const double x = lo + h * static_cast<double>(i);
    acc += integrand(x) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

Recording make_recording(std::size_t channels, double seconds,
                         double rate = 128.0) {
  Recording rec;
  rec.sample_rate = rate;
  rec.channels = channels;
  rec.samples = static_cast<std::size_t>(seconds * rate);
  rec.data.assign(rec.channels * rec.samples, 0.0);
  return rec;
}

void fill_sine(Recording& rec, std::size_t ch, double freq, double amp,
               double phase = 0.0) {
  for (std::size_t t = 0; t < rec.samples; ++t)
    rec.data[ch * rec.samples + t] +=
        amp * std::sin(2.0 * kPi * freq * static_cast<double>(t) /
                           rec.sample_rate +
                       phase);
}

}  // namespace

TEST_SUITE_BEGIN("signal");

TEST_CASE("differential entropy closed form vs quadrature") {
  for (double var : {0.1, 1.0, 10.0}) {
    const double closed = differential_entropy(var);
    const double numeric = entropy_by_quadrature(var);
    CHECK(std::fabs(closed - numeric) < 1e-6);
  }
  CHECK(differential_entropy(1.0) == doctest::Approx(1.4189385332046727));
  // var = e/(2 pi) gives exactly 1
  CHECK(differential_entropy(std::exp(1.0) / (2.0 * kPi)) ==
        doctest::Approx(1.0));
}

TEST_CASE("differential entropy scaling identity") {
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    const double var = std::exp(rng.uniform(-3.0, 3.0));
    const double a = std::exp(rng.uniform(-2.0, 2.0));
    CHECK(differential_entropy(a * a * var) - differential_entropy(var) ==
          doctest::Approx(std::log(a)).epsilon(1e-10));
  }
  // monotone in variance
  double prev = differential_entropy(1e-6);
  for (double var = 1e-5; var < 100.0; var *= 10.0) {
    const double h = differential_entropy(var);
    CHECK(h > prev);
    prev = h;
  }
  CHECK_THROWS_AS(differential_entropy(0.0), cmaf::Error);
}

TEST_CASE("segment counts") {
  // 60 s at 128 Hz, 3 s window, 1 s hop -> 58 segments
  auto rec = make_recording(2, 60.0);
  auto segs = segment(rec, 3.0, 1.0);
  CHECK(segs.size() == 58);
  CHECK(segs.front().start == 0);
  CHECK(segs.front().length == 384);
  CHECK(segs.back().start == 57 * 128);

  // exactly one window
  auto rec3 = make_recording(1, 3.0);
  CHECK(segment(rec3, 3.0, 1.0).size() == 1);

  // floor((4-3)/1)+1 = 2
  auto rec4 = make_recording(1, 4.0);
  CHECK(segment(rec4, 3.0, 1.0).size() == 2);

  // shorter than one window -> error
  auto rec2 = make_recording(1, 2.0);
  rec2.samples = 256;
  rec2.data.assign(256, 0.0);
  CHECK_THROWS_AS(segment(rec2, 3.0, 1.0), cmaf::Error);
}

TEST_CASE("segment count formula holds across durations, windows, hops") {
  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const double window = 1.0 + static_cast<double>(rng.below(5));
    const double hop = 1.0 + static_cast<double>(rng.below(3));
    const double dur = window + static_cast<double>(rng.below(100));
    auto rec = make_recording(1, dur);
    const auto segs = segment(rec, window, hop);
    const std::size_t expected =
        static_cast<std::size_t>(std::floor((dur - window) / hop)) + 1;
    CHECK(segs.size() == expected);
    // temporal order and coverage
    for (std::size_t i = 0; i < segs.size(); ++i) {
      CHECK(segs[i].index == i);
      CHECK(segs[i].start ==
            i * static_cast<std::size_t>(hop * rec.sample_rate));
    }
  }
}

TEST_CASE("band variance of a pure alpha tone") {
  // 10 Hz unit sinusoid: alpha carries > 99% of total 4-50 Hz power
  auto rec = make_recording(1, 3.0);
  fill_sine(rec, 0, 10.0, 1.0);
  const auto& bands = default_bands();
  double alpha_power = 0.0, total = 0.0;
  std::vector<double> per_band(bands.size(), 0.0);
  for (std::size_t b = 0; b < bands.size(); ++b) {
    auto vars = band_variance(rec.channel(0), rec.samples, bands[b], 128.0);
    REQUIRE(vars.size() == 3);
    for (double v : vars) per_band[b] += v;
    total += per_band[b];
    if (bands[b].name == "alpha") alpha_power = per_band[b];
  }
  CHECK(alpha_power / total > 0.99);
  for (std::size_t b = 0; b < bands.size(); ++b) {
    if (bands[b].name != "alpha") CHECK(per_band[b] / total < 0.01);
  }
  // a unit sinusoid has variance 1/2; the alpha estimate should be close
  CHECK(alpha_power / 3.0 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("band variance of silence hits the floor") {
  auto rec = make_recording(1, 3.0);
  for (const auto& band : default_bands()) {
    auto vars = band_variance(rec.channel(0), rec.samples, band, 128.0);
    for (double v : vars) CHECK(v == kVarianceFloor);
  }
}

TEST_CASE("band variance rejects bands beyond Nyquist") {
  auto rec = make_recording(1, 3.0);
  BandSpec bad{"ultra", 50.0, 80.0};
  CHECK_THROWS_AS(band_variance(rec.channel(0), rec.samples, bad, 128.0),
                  cmaf::Error);
}

TEST_CASE("white noise band variances match the flat-spectrum fraction") {
  // Monte-Carlo against the expected 45/64 fraction of unit variance.
  Rng rng(1234);
  const auto& bands = default_bands();
  double acc = 0.0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    auto rec = make_recording(1, 3.0);
    for (double& v : rec.data) v = rng.normal();
    double sum = 0.0;
    for (const auto& band : bands) {
      auto vars = band_variance(rec.channel(0), rec.samples, band, 128.0);
      for (double v : vars) sum += v;
    }
    acc += sum / 3.0;  // mean over the three windows
  }
  const double measured = acc / trials;
  const double expected = 45.0 / 64.0;  // 45 one-hertz bins out of 64
  CHECK(std::fabs(measured / expected - 1.0) < 0.10);
}

TEST_CASE("extract features shapes and order") {
  auto rec = make_recording(32, 60.0);
  Rng rng(3);
  for (double& v : rec.data) v = rng.normal();
  auto feats = extract_features(rec, default_bands());
  CHECK(feats.size() == 58);
  for (const auto& fm : feats) {
    CHECK(fm.channels == 32);
    CHECK(fm.feature_dim == 12);
    CHECK(fm.values.size() == 32 * 12);
    for (double v : fm.values) CHECK(std::isfinite(v));
  }

  // single channel
  auto rec1 = make_recording(1, 10.0);
  for (double& v : rec1.data) v = rng.normal();
  auto feats1 = extract_features(rec1, default_bands());
  CHECK(feats1.size() == 8);
  CHECK(feats1[0].channels == 1);
  CHECK(feats1[0].feature_dim == 12);

  // band-major then window ordering: a pure 10 Hz tone pushes the three
  // alpha slots (indices 3..5) above everything else
  auto rec_tone = make_recording(1, 3.0);
  fill_sine(rec_tone, 0, 10.0, 3.0);
  auto ftone = extract_features(rec_tone, default_bands());
  const double* row = ftone[0].row(0);
  for (int w = 0; w < 3; ++w) {
    for (int other : {0, 1, 2, 6, 7, 8, 9, 10, 11})
      CHECK(row[3 + w] > row[other]);
  }
}

TEST_CASE("extract features determinism") {
  auto rec = make_recording(4, 12.0);
  Rng rng(9);
  for (double& v : rec.data) v = rng.normal();
  auto a = extract_features(rec, default_bands());
  auto b = extract_features(rec, default_bands());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].values == b[i].values);
}

TEST_CASE("per-band averaged variant has 4 features") {
  auto rec = make_recording(2, 10.0);
  Rng rng(21);
  for (double& v : rec.data) v = rng.normal();
  FeatureOptions opt;
  opt.per_window = false;
  auto feats = extract_features(rec, default_bands(), opt);
  CHECK(feats[0].feature_dim == 4);

  // averaged value equals the mean of the per-window triple
  FeatureOptions full;
  auto feats12 = extract_features(rec, default_bands(), full);
  for (std::size_t b = 0; b < 4; ++b) {
    const double mean12 = (feats12[0].row(0)[b * 3] + feats12[0].row(0)[b * 3 + 1] +
                           feats12[0].row(0)[b * 3 + 2]) /
                          3.0;
    CHECK(feats[0].row(0)[b] == doctest::Approx(mean12).epsilon(1e-12));
  }
}

TEST_CASE("time-shift robustness for stationary full-period tones") {
  // integer-Hz tone: shifting by whole samples only rotates the phase
  auto base = make_recording(1, 4.0);
  fill_sine(base, 0, 10.0, 1.0, 0.3);
  auto shifted = make_recording(1, 4.0);
  fill_sine(shifted, 0, 10.0, 1.0,
            0.3 + 2.0 * kPi * 10.0 * 17.0 / 128.0);  // 17-sample shift

  auto fa = extract_features(base, default_bands());
  auto fb = extract_features(shifted, default_bands());
  REQUIRE(fa.size() == fb.size());
  for (std::size_t s = 0; s < fa.size(); ++s)
    for (std::size_t j = 0; j < fa[s].values.size(); ++j)
      CHECK(std::fabs(fa[s].values[j] - fb[s].values[j]) < 1e-6);
}

TEST_CASE("band bin table") {
  CHECK(band_bins({"theta", 4.0, 7.0}, 128.0, 128) ==
        std::vector<std::size_t>{4, 5, 6});
  CHECK(band_bins({"alpha", 7.0, 13.0}, 128.0, 128) ==
        std::vector<std::size_t>{7, 8, 9, 10, 11, 12});
  CHECK(band_bins({"beta", 13.0, 30.0}, 128.0, 128).size() == 17);
  // gamma stays [31, 50): bin 30 belongs to no band
  auto gamma = band_bins({"gamma", 31.0, 50.0}, 128.0, 128);
  CHECK(gamma.front() == 31);
  CHECK(gamma.back() == 49);
}

TEST_SUITE_END();
