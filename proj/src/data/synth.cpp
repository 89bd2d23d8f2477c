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
// Synthetic paired EEG/music dataset.
//
// A 16-D latent prototype per track carries the class signal (scaled by
// `separability`) plus a per-track jitter that gives every track an
// identity shared by both modalities. EEG trials are synthesized per 1-s
// block as band-limited sinusoid mixtures whose per-(channel, band)
// log-variance is an affine image of the latent, so the extracted DE
// features recover that image. Music embeddings are a different affine
// image of the same latent, offset by domain_shift in a fixed direction.
// Everything derives from named splitmix64 streams, so identical spec+seed
// reproduces identical bytes.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

#include "cmaf/data.hpp"
#include "cmaf/error.hpp"
#include "cmaf/kernels.hpp"
#include "cmaf/rng.hpp"

namespace cmaf::data {

namespace {

constexpr std::size_t kLatentDim = 16;
constexpr double kClassScale = 1.6;
constexpr double kTrackJitter = 0.35;
constexpr double kSegmentNoise = 0.15;
constexpr double kMusicObsNoise = 0.12;
constexpr double kMusicBias = 0.3;
constexpr double kShiftNorm = 2.5;   // |offset| at domain_shift = 1
constexpr double kLogVarClip = 3.0;  // variances stay in [e^-3, e^3]
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

std::vector<double> draw_normals(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

void normalize(std::vector<double>& v) {
  const double n = std::sqrt(kernels::active().sumsq(v.data(), v.size()));
  check(n > 0.0, "synth: degenerate direction vector");
  for (double& x : v) x /= n;
}

std::string two_digits(int v) {
  return (v < 10 ? "0" : "") + std::to_string(v);
}

}  // namespace

void SynthSpec::validate() const {
  check(tracks >= 10, "synth: tracks must be >= 10, got ", tracks);
  check(subjects >= 1, "synth: subjects must be >= 1");
  check(segments_per_track >= 1, "synth: segments_per_track must be >= 1");
  check(channels >= 1, "synth: channels must be >= 1");
  check(music_dim >= 4, "synth: music_dim must be >= 4");
  check(separability >= 0.0 && separability <= 1.0,
        "synth: separability must lie in [0, 1], got ", separability);
  check(tag_correlation >= 0.0 && tag_correlation <= 1.0,
        "synth: tag_correlation must lie in [0, 1], got ", tag_correlation);
  check(domain_shift >= 0.0, "synth: domain_shift must be >= 0");
  check(eeg_noise >= 0.0, "synth: eeg_noise must be >= 0");
  check(sample_rate >= 100.0 &&
            sample_rate == std::floor(sample_rate),
        "synth: sample_rate must be a whole number >= 100, got ", sample_rate);
  check(hop_s == 1.0, "synth: only a 1-s hop is supported");
  check(window_s >= 1.0 && window_s == std::floor(window_s),
        "synth: window must be a whole number of seconds");
}

std::string synth_dataset(const SynthSpec& spec, const std::string& out_dir) {
  spec.validate();
  const auto& bands = signal::default_bands();
  const std::size_t n_bands = bands.size();
  const std::size_t win = static_cast<std::size_t>(spec.sample_rate);  // 1 s
  const int blocks_per_segment = static_cast<int>(spec.window_s);
  const int blocks = spec.segments_per_track + blocks_per_segment - 1;
  const std::size_t samples = static_cast<std::size_t>(blocks) * win;
  const std::size_t lv_dim = static_cast<std::size_t>(spec.channels) * n_bands;

  // Sinusoid basis rows per band bin (frequency k cycles per 1-s block).
  std::vector<std::vector<std::size_t>> bins(n_bands);
  std::vector<std::size_t> all_bins;
  for (std::size_t b = 0; b < n_bands; ++b) {
    bins[b] = signal::band_bins(bands[b], spec.sample_rate, win);
    check(!bins[b].empty(), "synth: band ", bands[b].name,
          " has no DFT bins at ", spec.sample_rate, " Hz");
    all_bins.insert(all_bins.end(), bins[b].begin(), bins[b].end());
  }
  std::vector<double> cos_rows(all_bins.size() * win);
  std::vector<double> sin_rows(all_bins.size() * win);
  for (std::size_t r = 0; r < all_bins.size(); ++r) {
    const double w = kTwoPi * static_cast<double>(all_bins[r]) /
                     static_cast<double>(win);
    for (std::size_t i = 0; i < win; ++i) {
      cos_rows[r * win + i] = std::cos(w * static_cast<double>(i));
      sin_rows[r * win + i] = std::sin(w * static_cast<double>(i));
    }
  }

  // Global draws: class directions, mixing maps, labels, track latents.
  Rng global(mix_seed({spec.seed, 0x610ba1u}));
  std::vector<double> u_val = draw_normals(global, kLatentDim);
  normalize(u_val);
  std::vector<double> u_aro = draw_normals(global, kLatentDim);
  {
    const double proj = kernels::active().dot(u_aro.data(), u_val.data(), kLatentDim);
    kernels::active().axpy(-proj, u_val.data(), u_aro.data(), kLatentDim);
    normalize(u_aro);
  }
  const double latent_scale = 1.0 / std::sqrt(static_cast<double>(kLatentDim));
  std::vector<double> map_eeg = draw_normals(global, lv_dim * kLatentDim, latent_scale);
  std::vector<double> map_music =
      draw_normals(global, spec.music_dim * kLatentDim, latent_scale);
  std::vector<double> music_bias = draw_normals(global, spec.music_dim, kMusicBias);
  std::vector<double> shift_dir = draw_normals(global, spec.music_dim);
  normalize(shift_dir);
  for (double& x : shift_dir) x *= kShiftNorm;

  const int T = spec.tracks;
  std::vector<int> val_tags(T), aro_tags(T);
  for (int t = 0; t < T; ++t) val_tags[t] = t < T / 2 ? 0 : 1;
  global.shuffle(val_tags);
  for (int t = 0; t < T; ++t) {
    const bool agree = global.uniform() < spec.tag_correlation;
    aro_tags[t] = agree ? val_tags[t] : 1 - val_tags[t];
  }
  // both arousal classes must exist
  {
    int ones = 0;
    for (int v : aro_tags) ones += v;
    if (ones == 0) aro_tags[0] = 1;
    if (ones == T) aro_tags[0] = 0;
  }

  std::vector<std::vector<double>> track_latent(T);
  for (int t = 0; t < T; ++t) {
    auto lam = draw_normals(global, kLatentDim, kTrackJitter);
    const double sv = val_tags[t] == 1 ? 1.0 : -1.0;
    const double sa = aro_tags[t] == 1 ? 1.0 : -1.0;
    const double cs = spec.separability * kClassScale;
    kernels::active().axpy(cs * sv, u_val.data(), lam.data(), kLatentDim);
    kernels::active().axpy(cs * sa, u_aro.data(), lam.data(), kLatentDim);
    track_latent[t] = std::move(lam);
  }

  const std::filesystem::path root(out_dir);
  std::filesystem::create_directories(root / "eeg");
  std::filesystem::create_directories(root / "emb");

  auto latent_row = [&](const std::vector<double>& map, std::size_t row,
                        const double* lam) {
    return kernels::active().dot(map.data() + row * kLatentDim, lam, kLatentDim);
  };

  // Music embeddings: one file per track, shared by all subjects.
  for (int t = 0; t < T; ++t) {
    Rng mstream(mix_seed({spec.seed, 0x3b5cu, static_cast<std::uint64_t>(t)}));
    TrackEmbeddingSet emb;
    emb.track_id = t;
    emb.dim = spec.music_dim;
    emb.segments = static_cast<std::size_t>(spec.segments_per_track);
    emb.valence_tag = val_tags[t];
    emb.arousal_tag = aro_tags[t];
    emb.values.resize(emb.segments * emb.dim);
    std::vector<double> lam(kLatentDim);
    for (std::size_t s = 0; s < emb.segments; ++s) {
      for (std::size_t j = 0; j < kLatentDim; ++j)
        lam[j] = track_latent[t][j] + kSegmentNoise * mstream.normal();
      double* row = emb.values.data() + s * emb.dim;
      for (std::size_t d = 0; d < emb.dim; ++d) {
        row[d] = latent_row(map_music, d, lam.data()) + music_bias[d] +
                 spec.domain_shift * shift_dir[d] +
                 kMusicObsNoise * mstream.normal();
      }
    }
    save_embeddings(emb, (root / "emb" / ("track" + two_digits(t) + ".memb")).string());
  }

  // EEG recordings: one file per (subject, track).
  Manifest manifest;
  for (int subj = 0; subj < spec.subjects; ++subj) {
    for (int t = 0; t < T; ++t) {
      Rng estream(mix_seed({spec.seed, 0xee6u, static_cast<std::uint64_t>(subj),
                            static_cast<std::uint64_t>(t)}));
      signal::Recording rec;
      rec.subject_id = subj;
      rec.trial_id = t;
      rec.sample_rate = spec.sample_rate;
      rec.channels = static_cast<std::size_t>(spec.channels);
      rec.samples = samples;
      rec.data.assign(rec.channels * samples, 0.0);
      rec.valence = val_tags[t] == 1 ? estream.uniform(5.7, 9.0)
                                     : estream.uniform(1.0, 4.8);
      rec.arousal = aro_tags[t] == 1 ? estream.uniform(5.7, 9.0)
                                     : estream.uniform(1.0, 4.8);

      std::vector<double> lam(kLatentDim);
      const double eeg_sigma = kSegmentNoise * spec.eeg_noise;
      for (int blk = 0; blk < blocks; ++blk) {
        for (std::size_t j = 0; j < kLatentDim; ++j)
          lam[j] = track_latent[t][j] + eeg_sigma * estream.normal();
        for (std::size_t ch = 0; ch < rec.channels; ++ch) {
          double* x = rec.data.data() + ch * samples +
                      static_cast<std::size_t>(blk) * win;
          std::size_t bin_row = 0;
          for (std::size_t b = 0; b < n_bands; ++b) {
            double lv = latent_row(map_eeg, ch * n_bands + b, lam.data());
            lv = std::clamp(lv, -kLogVarClip, kLogVarClip);
            const double amp = std::sqrt(2.0 * std::exp(lv) /
                                         static_cast<double>(bins[b].size()));
            for (std::size_t r = 0; r < bins[b].size(); ++r, ++bin_row) {
              const double phase = estream.uniform(0.0, kTwoPi);
              // amp*sin(w i + phase) decomposed over the fixed basis rows
              kernels::active().axpy(amp * std::sin(phase),
                                     cos_rows.data() + bin_row * win, x, win);
              kernels::active().axpy(amp * std::cos(phase),
                                     sin_rows.data() + bin_row * win, x, win);
            }
          }
        }
      }

      const std::string eeg_rel =
          "eeg/s" + two_digits(subj) + "_t" + two_digits(t) + ".eegx";
      save_recording(rec, (root / eeg_rel).string());

      ManifestEntry e;
      e.subject = subj;
      e.trial = t;
      e.track = t;
      e.eeg_path = eeg_rel;
      e.emb_path = "emb/track" + two_digits(t) + ".memb";
      e.valence_rating = rec.valence;
      e.arousal_rating = rec.arousal;
      e.valence_tag = val_tags[t];
      e.arousal_tag = aro_tags[t];
      manifest.entries.push_back(std::move(e));
    }
  }

  const std::string manifest_path = (root / "manifest.csv").string();
  save_manifest(manifest, manifest_path);
  return manifest_path;
}

}  // namespace cmaf::data
