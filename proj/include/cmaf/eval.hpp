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
// Metrics: majority-vote trial aggregation, median-of-distances retrieval
// scoring, P@k, AP/mAP, exact-stimulus rate, temporal mAP curves, and the
// embedding export.

#ifndef CMAF_EVAL_HPP_
#define CMAF_EVAL_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "cmaf/data.hpp"
#include "cmaf/model.hpp"

namespace cmaf::eval {

// --- pure metric primitives ---

// Majority vote over segment probabilities (threshold 0.5). A vote tie is
// broken by the mean probability; an exact mean tie goes to class 1.
int aggregate_majority(const std::vector<double>& segment_probs);

// Even-count median = mean of the two central values.
double median(std::vector<double> v);

// Median of per-segment Euclidean distances. Equal-length sequences pair up
// segment by segment; otherwise each query segment is reduced by the median
// of its distances to all track segments first.
double track_distance(const std::vector<std::vector<double>>& query,
                      const std::vector<std::vector<double>>& track);

// relevance: 0/1 flags in rank order. Denominator is min(k, N).
double precision_at_k(const std::vector<int>& relevance, std::size_t k);

// AP = (1/R) * sum over relevant ranks r of precision@r. Requires >= 1
// relevant item.
double average_precision(const std::vector<int>& relevance);

// Mean AP over queries; queries without any relevant item are excluded with
// a warning. Throws when nothing is scoreable.
double mean_average_precision(const std::vector<std::vector<int>>& queries);

// Centered moving average with window truncation at the boundaries.
std::vector<double> moving_average(const std::vector<double>& x, int window);

struct TemporalCurve {
  std::vector<double> raw;       // mean AP across queries per segment index
  std::vector<double> smoothed;  // 7-sample moving average by default
};

// per_query_ap: queries x T matrix of AP scores; all rows must share T.
TemporalCurve temporal_map(const std::vector<std::vector<double>>& per_query_ap,
                           int smooth_window = 7);

// --- model-space evaluation ---

struct TrialEmbeddings {
  std::size_t trial_index = 0;
  int subject = 0;
  int trial = 0;
  int track = 0;
  int label = 0;  // binarized rating of the active dimension
  int tag = 0;    // track-level tag of the active dimension
  std::vector<std::vector<double>> eeg;    // per segment, common_dim values
  std::vector<std::vector<double>> music;  // per segment, common_dim values
  std::vector<double> eeg_probs;           // shared classifier on EEG side
  std::vector<double> music_probs;         // shared classifier on music side
};

// Runs both branches and the classifier over every segment of a trial.
TrialEmbeddings embed_trial(model::ModelParams& params,
                            const data::Standardizer& standardizer,
                            const data::TrialData& trial, std::size_t trial_index,
                            data::Dimension dim);

enum class RetrievalMode { kAggregated, kSegment };
enum class DistanceKind { kEuclidean, kCosine };

struct RetrievalOptions {
  RetrievalMode mode = RetrievalMode::kAggregated;
  DistanceKind distance = DistanceKind::kEuclidean;
  std::size_t k = 10;
  int smooth_window = 7;
};

struct RankedTrack {
  int track_id = 0;
  double score = 0.0;  // distance, ascending
  int relevant = 0;    // track tag == query label
};

using Ranking = std::vector<RankedTrack>;  // ties broken by track_id

// Whole-trial (aggregated) ranking of the corpus tracks for one EEG query.
Ranking retrieve(const TrialEmbeddings& query,
                 const std::vector<const TrialEmbeddings*>& corpus,
                 const RetrievalOptions& opt);

// Ranking using only segment index `segment` on both sides.
Ranking retrieve_segment(const TrialEmbeddings& query, std::size_t segment,
                         const std::vector<const TrialEmbeddings*>& corpus,
                         const RetrievalOptions& opt);

// Fraction of queries whose own stimulus track appears in the top k of
// their aggregated ranking. Every query's track must be in the corpus.
double exact_stimulus_rate(const std::vector<const TrialEmbeddings*>& queries,
                           const std::vector<const TrialEmbeddings*>& corpus,
                           const RetrievalOptions& opt, std::size_t top_k = 1);

struct FoldMetrics {
  std::size_t n_trials = 0;
  std::size_t n_segments = 0;
  std::size_t n_queries_scored = 0;  // mAP after zero-relevant exclusions
  double acc_seg_eeg = 0.0;
  double acc_agg_eeg = 0.0;
  double acc_seg_music = 0.0;
  double acc_agg_music = 0.0;
  double p_at_k = 0.0;
  double map = 0.0;
  double exact_at_1 = 0.0;
};

// Classification + retrieval metrics over one held-out fold. The retrieval
// corpus is the fold's own tracks (pass extra_corpus for the full-corpus
// variant).
FoldMetrics evaluate_fold(const std::vector<TrialEmbeddings>& test,
                          const RetrievalOptions& opt,
                          const std::vector<const TrialEmbeddings*>& extra_corpus = {});

FoldMetrics mean_metrics(const std::vector<FoldMetrics>& folds);

// --- report files ---

struct SubjectRow {
  int subject = 0;
  FoldMetrics metrics;  // mean over the subject's folds
};

// CSV: per-subject rows plus a final mean row.
void write_metrics_report(const std::string& path,
                          const std::vector<SubjectRow>& rows);

// CSV rows (track, segment_index, raw, smoothed), one block per track.
void write_temporal_report(
    const std::string& path,
    const std::vector<std::pair<int, TemporalCurve>>& curves);

// CSV with exactly 6 metadata columns + common_dim value columns; one row
// per segment and modality.
void export_embeddings(const std::vector<TrialEmbeddings>& trials,
                       std::size_t common_dim, const std::string& path);

}  // namespace cmaf::eval

#endif  // CMAF_EVAL_HPP_
