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

#include "cmaf/signal.hpp"

#include <cmath>

#include "cmaf/error.hpp"
#include "cmaf/kernels.hpp"

namespace cmaf::signal {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Windowed DFT evaluated at a fixed bin set via dot products against
// precomputed hann*cos / hann*sin rows. Rebuilt per recording, reused
// across every window of every channel.
struct DftPlan {
  std::size_t n = 0;
  double sample_rate = 0.0;
  std::vector<std::size_t> bins;
  std::vector<double> cos_rows;  // bins x n, includes the Hann window
  std::vector<double> sin_rows;
  double hann_sumsq = 0.0;

  DftPlan(std::size_t window_len, double rate, std::vector<std::size_t> b)
      : n(window_len), sample_rate(rate), bins(std::move(b)) {
    std::vector<double> hann(n);
    for (std::size_t i = 0; i < n; ++i)
      hann[i] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) /
                                      static_cast<double>(n)));
    hann_sumsq = kernels::active().sumsq(hann.data(), n);
    cos_rows.resize(bins.size() * n);
    sin_rows.resize(bins.size() * n);
    for (std::size_t r = 0; r < bins.size(); ++r) {
      const double w = kTwoPi * static_cast<double>(bins[r]) / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        cos_rows[r * n + i] = hann[i] * std::cos(w * static_cast<double>(i));
        sin_rows[r * n + i] = hann[i] * std::sin(w * static_cast<double>(i));
      }
    }
  }

  // |X_k|^2 for each planned bin of one window.
  void bin_power(const double* x, double* out) const {
    const auto& K = kernels::active();
    for (std::size_t r = 0; r < bins.size(); ++r) {
      const double re = K.dot(x, cos_rows.data() + r * n, n);
      const double im = K.dot(x, sin_rows.data() + r * n, n);
      out[r] = re * re + im * im;
    }
  }

  // One-sided doubling except DC and Nyquist.
  double one_sided_coeff(std::size_t bin) const {
    return (bin == 0 || 2 * bin == n) ? 1.0 : 2.0;
  }
};

std::size_t window_samples(double seconds, double rate) {
  const double w = seconds * rate;
  const auto n = static_cast<std::size_t>(std::llround(w));
  check(n >= 1, "window of ", seconds, " s is empty at ", rate, " Hz");
  return n;
}

}  // namespace

void Recording::validate(double min_seconds) const {
  check(sample_rate > 0.0, "recording: sample_rate must be positive, got ",
        sample_rate);
  check(channels >= 1, "recording: needs at least one channel");
  check(data.size() == channels * samples, "recording: data size ",
        data.size(), " != channels*samples = ", channels * samples);
  check(static_cast<double>(samples) >= min_seconds * sample_rate,
        "recording: ", samples, " samples is shorter than ", min_seconds,
        " s at ", sample_rate, " Hz");
  check(valence >= 1.0 && valence <= 9.0, "recording: valence rating ",
        valence, " outside [1, 9]");
  check(arousal >= 1.0 && arousal <= 9.0, "recording: arousal rating ",
        arousal, " outside [1, 9]");
}

const std::vector<BandSpec>& default_bands() {
  static const std::vector<BandSpec> kBands = {
      {"theta", 4.0, 7.0},
      {"alpha", 7.0, 13.0},
      {"beta", 13.0, 30.0},
      {"gamma", 31.0, 50.0},
  };
  return kBands;
}

std::vector<std::size_t> band_bins(const BandSpec& band, double sample_rate,
                                   std::size_t window_len) {
  check(band.low_hz > 0.0 && band.low_hz < band.high_hz &&
            band.high_hz <= sample_rate / 2.0,
        "band ", band.name, " [", band.low_hz, ", ", band.high_hz,
        ") outside (0, Nyquist=", sample_rate / 2.0, "]");
  std::vector<std::size_t> bins;
  const double hz_per_bin = sample_rate / static_cast<double>(window_len);
  for (std::size_t k = 0; k <= window_len / 2; ++k) {
    const double center = hz_per_bin * static_cast<double>(k);
    if (center >= band.low_hz && center < band.high_hz) bins.push_back(k);
  }
  return bins;
}

std::vector<SegmentView> segment(const Recording& rec, double window_s,
                                 double hop_s) {
  rec.validate(window_s);
  check(hop_s > 0.0, "segment: hop must be positive");
  const std::size_t win = window_samples(window_s, rec.sample_rate);
  const std::size_t hop = window_samples(hop_s, rec.sample_rate);
  check(win <= rec.samples, "segment: window of ", win,
        " samples exceeds recording length ", rec.samples);
  std::vector<SegmentView> out;
  const std::size_t count = (rec.samples - win) / hop + 1;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s)
    out.push_back({s, s * hop, win});
  return out;
}

std::vector<double> band_variance(const double* x, std::size_t n,
                                  const BandSpec& band, double sample_rate) {
  const std::size_t win = window_samples(1.0, sample_rate);
  check(n % win == 0 && n > 0, "band_variance: segment length ", n,
        " is not a whole number of 1-s windows (", win, " samples)");
  DftPlan plan(win, sample_rate, band_bins(band, sample_rate, win));
  const std::size_t n_windows = n / win;
  std::vector<double> powers(plan.bins.size());
  std::vector<double> out(n_windows);
  const double norm = sample_rate * plan.hann_sumsq;
  for (std::size_t w = 0; w < n_windows; ++w) {
    plan.bin_power(x + w * win, powers.data());
    double acc = 0.0;
    for (std::size_t r = 0; r < plan.bins.size(); ++r)
      acc += plan.one_sided_coeff(plan.bins[r]) * powers[r];
    out[w] = std::max(acc / norm, kVarianceFloor);
  }
  return out;
}

double differential_entropy(double variance) {
  check(variance >= kVarianceFloor, "differential_entropy: variance ",
        variance, " below floor ", kVarianceFloor);
  constexpr double kE = 2.71828182845904523536;
  return 0.5 * std::log(kTwoPi * kE * variance);
}

std::vector<FeatureMatrix> extract_features(const Recording& rec,
                                            const std::vector<BandSpec>& bands,
                                            const FeatureOptions& opt) {
  check(!bands.empty(), "extract_features: no bands given");
  const auto segments = segment(rec, opt.window_s, opt.hop_s);
  const std::size_t win = window_samples(1.0, rec.sample_rate);
  const std::size_t windows_per_segment = segments[0].length / win;
  check(segments[0].length % win == 0,
        "extract_features: segment window must be a whole number of seconds");

  // One plan over the union of all band bins; per band, offsets into it.
  std::vector<std::size_t> all_bins;
  std::vector<std::pair<std::size_t, std::size_t>> band_ranges;
  for (const auto& band : bands) {
    auto bins = band_bins(band, rec.sample_rate, win);
    band_ranges.emplace_back(all_bins.size(), bins.size());
    all_bins.insert(all_bins.end(), bins.begin(), bins.end());
  }
  DftPlan plan(win, rec.sample_rate, all_bins);
  const double norm = rec.sample_rate * plan.hann_sumsq;

  const std::size_t per_channel =
      opt.per_window ? bands.size() * windows_per_segment : bands.size();
  std::vector<FeatureMatrix> out;
  out.reserve(segments.size());
  std::vector<double> powers(all_bins.size());

  for (const auto& seg : segments) {
    FeatureMatrix fm;
    fm.segment_index = static_cast<int>(seg.index);
    fm.channels = rec.channels;
    fm.feature_dim = per_channel;
    fm.values.resize(rec.channels * per_channel);
    for (std::size_t ch = 0; ch < rec.channels; ++ch) {
      const double* base = rec.channel(ch) + seg.start;
      double* row = fm.values.data() + ch * per_channel;
      for (std::size_t w = 0; w < windows_per_segment; ++w) {
        plan.bin_power(base + w * win, powers.data());
        for (std::size_t b = 0; b < bands.size(); ++b) {
          const auto [off, cnt] = band_ranges[b];
          double acc = 0.0;
          for (std::size_t r = off; r < off + cnt; ++r)
            acc += plan.one_sided_coeff(all_bins[r]) * powers[r];
          const double var = std::max(acc / norm, kVarianceFloor);
          const double de = differential_entropy(var);
          if (opt.per_window) {
            row[b * windows_per_segment + w] = de;
          } else {
            row[b] += de / static_cast<double>(windows_per_segment);
          }
        }
      }
    }
    out.push_back(std::move(fm));
  }
  return out;
}

}  // namespace cmaf::signal
