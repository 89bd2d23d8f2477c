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
//
// EEG trial -> per-segment differential-entropy feature matrices.
// A trial is cut into 3-s segments (1-s hop); each segment is analysed with
// 1-s non-overlapping Hann windows; per window the variance of each rhythm
// band is estimated from the DFT and mapped through the Gaussian
// differential entropy 0.5*ln(2*pi*e*var).

#ifndef CMAF_SIGNAL_HPP_
#define CMAF_SIGNAL_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace cmaf::signal {

struct Recording {
  int subject_id = 0;
  int trial_id = 0;
  double sample_rate = 128.0;
  std::size_t channels = 0;
  std::size_t samples = 0;
  std::vector<double> data;  // channel-major: data[ch * samples + t]
  double valence = 5.0;      // continuous rating in [1, 9]
  double arousal = 5.0;

  const double* channel(std::size_t ch) const { return data.data() + ch * samples; }
  void validate(double min_seconds = 3.0) const;
};

struct BandSpec {
  std::string name;
  double low_hz = 0.0;
  double high_hz = 0.0;
};

// theta 4-7, alpha 7-13, beta 13-30, gamma 31-50. The 30-31 Hz gap is kept
// as printed in the band table this follows.
const std::vector<BandSpec>& default_bands();

// DFT bins whose center k*rate/n lies in [low_hz, high_hz).
std::vector<std::size_t> band_bins(const BandSpec& band, double sample_rate,
                                   std::size_t window_len);

struct SegmentView {
  std::size_t index = 0;  // position within the trial
  std::size_t start = 0;  // sample offset
  std::size_t length = 0;
};

// count = floor((duration - window_s)/hop_s) + 1, in temporal order.
std::vector<SegmentView> segment(const Recording& rec, double window_s = 3.0,
                                 double hop_s = 1.0);

// Per 1-s Hann window, the band-limited variance estimate:
//   var = sum_{k in band} c_k |X_k|^2 / (sample_rate * sum_n hann[n]^2)
// with c_k = 2 for interior bins (one-sided spectrum), 1 at DC/Nyquist.
// n must be a whole number of 1-s windows; returns one value per window,
// floored at kVarianceFloor.
std::vector<double> band_variance(const double* x, std::size_t n,
                                  const BandSpec& band, double sample_rate);

// 0.5 * ln(2*pi*e*variance), natural log. variance must be >= kVarianceFloor.
double differential_entropy(double variance);

struct FeatureMatrix {
  int segment_index = 0;
  std::size_t channels = 0;
  std::size_t feature_dim = 0;  // bands*windows (12) or bands (4)
  std::vector<double> values;   // channels x feature_dim, row-major

  const double* row(std::size_t ch) const { return values.data() + ch * feature_dim; }
};

struct FeatureOptions {
  double window_s = 3.0;
  double hop_s = 1.0;
  // true: one DE value per (band, window), band-major order
  // (t w1, t w2, t w3, a w1, ...). false: per-band mean of the window DEs.
  bool per_window = true;
};

std::vector<FeatureMatrix> extract_features(const Recording& rec,
                                            const std::vector<BandSpec>& bands,
                                            const FeatureOptions& opt = {});

inline constexpr double kVarianceFloor = 1e-10;

}  // namespace cmaf::signal

#endif  // CMAF_SIGNAL_HPP_
