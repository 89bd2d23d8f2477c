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
// Dataset ingestion, pairing, labels, folds, standardization and the
// synthetic paired-dataset generator.

#ifndef CMAF_DATA_HPP_
#define CMAF_DATA_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cmaf/signal.hpp"

namespace cmaf::data {

// Precomputed music segment embeddings for one track, aligned 1:1 with the
// EEG segments of the paired trial.
struct TrackEmbeddingSet {
  int track_id = 0;
  std::size_t dim = 0;
  std::size_t segments = 0;
  std::vector<double> values;  // segments x dim, row-major
  int valence_tag = 0;
  int arousal_tag = 0;

  const double* segment(std::size_t s) const { return values.data() + s * dim; }
};

struct ManifestEntry {
  int subject = 0;
  int trial = 0;
  int track = 0;
  std::string eeg_path;
  std::string emb_path;
  double valence_rating = 5.0;
  double arousal_rating = 5.0;
  int valence_tag = 0;
  int arousal_tag = 0;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  std::string base_dir;  // relative paths resolve against this
};

// --- file formats (little-endian binary + CSV manifest) ---

Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& m, const std::string& path);

signal::Recording load_recording(const std::string& path);
void save_recording(const signal::Recording& rec, const std::string& path);

TrackEmbeddingSet load_embeddings(const std::string& path);
void save_embeddings(const TrackEmbeddingSet& emb, const std::string& path);

// --- labels / folds / weights / standardization ---

enum class Dimension { kValence, kArousal };
const char* dimension_name(Dimension d);

// 1 if rating > 5, else 0 (a rating of exactly 5 is class 0). Rating must
// lie in [1, 9].
int binarize(double rating);

struct FoldSplit {
  int k = 5;
  std::uint64_t seed = 0;
  std::vector<std::pair<int, int>> assignments;  // (trial_id, fold)

  int fold_of(int trial_id) const;
};

// Stratified K-fold over whole trials: per-fold class counts are within 1 of
// perfect stratification and segments of one trial never straddle folds.
// Degrades to plain K-fold with a warning when only one class is present.
FoldSplit stratified_folds(const std::vector<std::pair<int, int>>& trial_labels,
                           int k, std::uint64_t seed);

struct ClassWeights {
  double w0 = 1.0;
  double w1 = 1.0;
  double of(int label) const { return label == 1 ? w1 : w0; }
};

// w_c = N / (2*N_c); a single-class input yields weight 1.0 with a warning.
ClassWeights class_weights(const std::vector<int>& labels);

// Per-feature affine transform fitted on training folds only.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;  // floored at kStdFloor

  std::size_t dim() const { return mean.size(); }
  void fit(const std::vector<const double*>& rows, std::size_t dim);
  void apply(double* row) const;  // in place, length dim()

  static constexpr double kStdFloor = 1e-8;
};

// --- loaded dataset ---

struct TrialData {
  int subject = 0;
  int trial = 0;
  int track = 0;
  double valence_rating = 5.0;
  double arousal_rating = 5.0;
  int valence_tag = 0;
  int arousal_tag = 0;
  std::vector<signal::FeatureMatrix> eeg;  // one per segment
  TrackEmbeddingSet music;

  double rating(Dimension d) const {
    return d == Dimension::kValence ? valence_rating : arousal_rating;
  }
  int label(Dimension d) const { return binarize(rating(d)); }
  int tag(Dimension d) const {
    return d == Dimension::kValence ? valence_tag : arousal_tag;
  }
};

struct Dataset {
  double sample_rate = 0.0;
  std::size_t channels = 0;
  std::size_t feature_dim = 0;  // flattened per-channel feature count
  std::size_t music_dim = 0;
  std::vector<TrialData> trials;

  std::size_t eeg_dim() const { return channels * feature_dim; }
  std::vector<int> subjects() const;
  // Trials of one subject, as indices into `trials`.
  std::vector<std::size_t> trials_of(int subject) const;
};

struct LoadOptions {
  signal::FeatureOptions features;
  // Drop trials whose binarized rating disagrees with the track tag in
  // either dimension (the tag-consistency filter; the precise criterion is
  // caller policy).
  bool require_tag_consistency = false;
};

Dataset load_dataset(const std::string& manifest_path,
                     const LoadOptions& opt = {});

// --- synthetic paired dataset ---

struct SynthSpec {
  int subjects = 1;
  int tracks = 34;
  int segments_per_track = 58;
  int channels = 32;
  std::size_t music_dim = 256;
  double separability = 0.9;  // in [0, 1]; 0 = labels independent of data
  double domain_shift = 1.0;  // >= 0; scales the music-space offset
  // Probability that a track's arousal tag equals its valence tag; rating
  // dimensions co-vary in affect data and fully independent tags would put
  // an artificial ceiling on distance-based retrieval.
  double tag_correlation = 0.8;
  // Multiplier on the EEG-side latent noise. Above 1 the EEG stream gets
  // noisier than the music stream, the regime where cross-modal
  // supervision has something to contribute.
  double eeg_noise = 1.0;
  std::uint64_t seed = 7;
  double sample_rate = 128.0;
  double window_s = 3.0;
  double hop_s = 1.0;

  void validate() const;
};

// Writes manifest.csv plus eeg/ and emb/ files under out_dir; returns the
// manifest path. Deterministic: identical spec+seed gives identical bytes.
std::string synth_dataset(const SynthSpec& spec, const std::string& out_dir);

}  // namespace cmaf::data

#endif  // CMAF_DATA_HPP_
