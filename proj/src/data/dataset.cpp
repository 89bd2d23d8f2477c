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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "cmaf/data.hpp"
#include "cmaf/error.hpp"
#include "cmaf/log.hpp"
#include "cmaf/rng.hpp"

namespace cmaf::data {

const char* dimension_name(Dimension d) {
  return d == Dimension::kValence ? "valence" : "arousal";
}

int binarize(double rating) {
  check(rating >= 1.0 && rating <= 9.0, "binarize: rating ", rating,
        " outside [1, 9]");
  return rating > 5.0 ? 1 : 0;
}

int FoldSplit::fold_of(int trial_id) const {
  for (const auto& [t, f] : assignments) {
    if (t == trial_id) return f;
  }
  fail("fold_of: trial ", trial_id, " not in fold split");
}

FoldSplit stratified_folds(const std::vector<std::pair<int, int>>& trial_labels,
                           int k, std::uint64_t seed) {
  check(k >= 2, "stratified_folds: k must be >= 2, got ", k);
  check(trial_labels.size() >= static_cast<std::size_t>(k),
        "stratified_folds: ", trial_labels.size(), " trials is fewer than k=",
        k);
  {
    std::set<int> ids;
    for (const auto& [t, l] : trial_labels) {
      check(ids.insert(t).second, "stratified_folds: duplicate trial id ", t);
      check(l == 0 || l == 1, "stratified_folds: label must be 0/1, got ", l);
    }
  }

  std::vector<int> pos, neg;
  for (const auto& [t, l] : trial_labels) (l == 1 ? pos : neg).push_back(t);
  if (pos.empty() || neg.empty()) {
    log_warn("stratified_folds: only one class present; using plain K-fold");
  }

  Rng rng(mix_seed({seed, 0xf01d5u}));
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  rng.shuffle(pos);
  rng.shuffle(neg);

  // Deal class by class with one running fold pointer: per-class counts per
  // fold differ by at most 1, and so do total fold sizes.
  FoldSplit split;
  split.k = k;
  split.seed = seed;
  std::size_t ptr = 0;
  for (const auto* cls : {&pos, &neg}) {
    for (int t : *cls) {
      split.assignments.emplace_back(t, static_cast<int>(ptr % k));
      ++ptr;
    }
  }
  std::sort(split.assignments.begin(), split.assignments.end());
  return split;
}

ClassWeights class_weights(const std::vector<int>& labels) {
  check(!labels.empty(), "class_weights: empty label list");
  std::size_t n1 = 0;
  for (int l : labels) n1 += (l == 1);
  const std::size_t n0 = labels.size() - n1;
  const double n = static_cast<double>(labels.size());
  ClassWeights w;
  if (n0 == 0 || n1 == 0) {
    log_warn("class_weights: single-class input, using weight 1.0");
    return w;
  }
  w.w0 = n / (2.0 * static_cast<double>(n0));
  w.w1 = n / (2.0 * static_cast<double>(n1));
  return w;
}

void Standardizer::fit(const std::vector<const double*>& rows,
                       std::size_t dim_in) {
  check(!rows.empty(), "standardizer: no rows to fit");
  mean.assign(dim_in, 0.0);
  stddev.assign(dim_in, 0.0);
  const double n = static_cast<double>(rows.size());
  for (const double* r : rows)
    for (std::size_t j = 0; j < dim_in; ++j) mean[j] += r[j];
  for (std::size_t j = 0; j < dim_in; ++j) mean[j] /= n;
  for (const double* r : rows)
    for (std::size_t j = 0; j < dim_in; ++j) {
      const double d = r[j] - mean[j];
      stddev[j] += d * d;
    }
  for (std::size_t j = 0; j < dim_in; ++j)
    stddev[j] = std::max(std::sqrt(stddev[j] / n), kStdFloor);
}

void Standardizer::apply(double* row) const {
  for (std::size_t j = 0; j < mean.size(); ++j)
    row[j] = (row[j] - mean[j]) / stddev[j];
}

std::vector<int> Dataset::subjects() const {
  std::vector<int> out;
  for (const auto& t : trials)
    if (std::find(out.begin(), out.end(), t.subject) == out.end())
      out.push_back(t.subject);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> Dataset::trials_of(int subject) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < trials.size(); ++i)
    if (trials[i].subject == subject) out.push_back(i);
  return out;
}

Dataset load_dataset(const std::string& manifest_path, const LoadOptions& opt) {
  const Manifest manifest = load_manifest(manifest_path);
  const std::filesystem::path base(manifest.base_dir);

  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };

  Dataset ds;
  for (const auto& e : manifest.entries) {
    signal::Recording rec = load_recording(resolve(e.eeg_path));
    TrackEmbeddingSet emb = load_embeddings(resolve(e.emb_path));

    check(rec.subject_id == e.subject, resolve(e.eeg_path), ": subject_id ",
          rec.subject_id, " != manifest subject ", e.subject);
    check(rec.trial_id == e.trial, resolve(e.eeg_path), ": trial_id ",
          rec.trial_id, " != manifest trial ", e.trial);
    check(emb.track_id == e.track, resolve(e.emb_path), ": track_id ",
          emb.track_id, " != manifest track ", e.track);
    check(emb.valence_tag == e.valence_tag && emb.arousal_tag == e.arousal_tag,
          resolve(e.emb_path), ": tags (", emb.valence_tag, ",",
          emb.arousal_tag, ") != manifest tags (", e.valence_tag, ",",
          e.arousal_tag, ")");

    TrialData td;
    td.subject = e.subject;
    td.trial = e.trial;
    td.track = e.track;
    td.valence_rating = e.valence_rating;
    td.arousal_rating = e.arousal_rating;
    td.valence_tag = e.valence_tag;
    td.arousal_tag = e.arousal_tag;
    td.eeg = signal::extract_features(rec, signal::default_bands(), opt.features);
    td.music = std::move(emb);

    check(td.music.segments == td.eeg.size(), resolve(e.emb_path),
          ": music has ", td.music.segments, " segments but the paired EEG trial has ",
          td.eeg.size());

    if (opt.require_tag_consistency &&
        (binarize(td.valence_rating) != td.valence_tag ||
         binarize(td.arousal_rating) != td.arousal_tag)) {
      log_info(strcat_msg("dropping trial subject=", td.subject, " trial=",
                          td.trial, ": rating/tag conflict"));
      continue;
    }

    if (ds.trials.empty()) {
      ds.sample_rate = rec.sample_rate;
      ds.channels = rec.channels;
      ds.feature_dim = td.eeg.front().feature_dim;
      ds.music_dim = td.music.dim;
    } else {
      check(rec.channels == ds.channels, resolve(e.eeg_path), ": channels ",
            rec.channels, " != dataset channels ", ds.channels);
      check(td.music.dim == ds.music_dim, resolve(e.emb_path),
            ": embedding dim ", td.music.dim, " != dataset dim ", ds.music_dim);
    }
    ds.trials.push_back(std::move(td));
  }
  check(!ds.trials.empty(), manifest_path, ": no trials survived loading");
  return ds;
}

}  // namespace cmaf::data
