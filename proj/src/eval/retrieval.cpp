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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#include "cmaf/error.hpp"
#include "cmaf/eval.hpp"
#include "cmaf/graph.hpp"
#include "cmaf/kernels.hpp"

namespace cmaf::eval {

TrialEmbeddings embed_trial(model::ModelParams& params,
                            const data::Standardizer& standardizer,
                            const data::TrialData& trial,
                            std::size_t trial_index, data::Dimension dim) {
  TrialEmbeddings out;
  out.trial_index = trial_index;
  out.subject = trial.subject;
  out.trial = trial.trial;
  out.track = trial.track;
  out.label = trial.label(dim);
  out.tag = trial.tag(dim);

  ad::Graph g;
  for (std::size_t s = 0; s < trial.eeg.size(); ++s) {
    g.rewind();
    const auto bound = model::bind(g, params, /*trainable=*/false);

    signal::FeatureMatrix fm = trial.eeg[s];
    check(fm.values.size() == standardizer.dim(), "embed_trial: feature dim ",
          fm.values.size(), " != standardizer dim ", standardizer.dim());
    standardizer.apply(fm.values.data());

    const auto eeg = model::eeg_forward(g, bound, fm);
    const ad::NodeId mus = model::music_forward(g, bound, trial.music.segment(s));
    const ad::NodeId pe = model::classify(g, bound, eeg.embedding);
    const ad::NodeId pm = model::classify(g, bound, mus);

    out.eeg.push_back(g.value(eeg.embedding).data);
    out.music.push_back(g.value(mus).data);
    out.eeg_probs.push_back(g.value(pe).data[0]);
    out.music_probs.push_back(g.value(pm).data[0]);
  }
  return out;
}

namespace {

double pair_distance(const std::vector<double>& a, const std::vector<double>& b,
                     DistanceKind kind) {
  const auto& K = kernels::active();
  if (kind == DistanceKind::kEuclidean)
    return std::sqrt(K.sq_dist(a.data(), b.data(), a.size()));
  const double na = std::sqrt(K.sumsq(a.data(), a.size()));
  const double nb = std::sqrt(K.sumsq(b.data(), b.size()));
  if (na == 0.0 || nb == 0.0) return 1.0;
  return 1.0 - K.dot(a.data(), b.data(), a.size()) / (na * nb);
}

double aggregated_score(const TrialEmbeddings& query,
                        const TrialEmbeddings& track, DistanceKind kind) {
  if (kind == DistanceKind::kEuclidean)
    return track_distance(query.eeg, track.music);
  // cosine variant follows the same median-of-segments aggregation
  std::vector<double> per_segment;
  if (query.eeg.size() == track.music.size()) {
    for (std::size_t i = 0; i < query.eeg.size(); ++i)
      per_segment.push_back(pair_distance(query.eeg[i], track.music[i], kind));
  } else {
    std::vector<double> d(track.music.size());
    for (const auto& q : query.eeg) {
      for (std::size_t j = 0; j < track.music.size(); ++j)
        d[j] = pair_distance(q, track.music[j], kind);
      per_segment.push_back(median(d));
    }
  }
  return median(std::move(per_segment));
}

Ranking rank_tracks(const TrialEmbeddings& query,
                    const std::vector<const TrialEmbeddings*>& corpus,
                    const std::function<double(const TrialEmbeddings&)>& score) {
  check(!corpus.empty(), "retrieve: empty corpus");
  Ranking r;
  r.reserve(corpus.size());
  for (const TrialEmbeddings* t : corpus) {
    RankedTrack e;
    e.track_id = t->track;
    e.score = score(*t);
    e.relevant = t->tag == query.label ? 1 : 0;
    r.push_back(e);
  }
  std::sort(r.begin(), r.end(), [](const RankedTrack& a, const RankedTrack& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.track_id < b.track_id;
  });
  return r;
}

std::vector<int> relevance_of(const Ranking& r) {
  std::vector<int> rel(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) rel[i] = r[i].relevant;
  return rel;
}

}  // namespace

Ranking retrieve(const TrialEmbeddings& query,
                 const std::vector<const TrialEmbeddings*>& corpus,
                 const RetrievalOptions& opt) {
  return rank_tracks(query, corpus, [&](const TrialEmbeddings& t) {
    return aggregated_score(query, t, opt.distance);
  });
}

Ranking retrieve_segment(const TrialEmbeddings& query, std::size_t segment,
                         const std::vector<const TrialEmbeddings*>& corpus,
                         const RetrievalOptions& opt) {
  check(segment < query.eeg.size(), "retrieve_segment: segment ", segment,
        " out of range");
  return rank_tracks(query, corpus, [&](const TrialEmbeddings& t) {
    if (segment < t.music.size())
      return pair_distance(query.eeg[segment], t.music[segment], opt.distance);
    std::vector<double> d(t.music.size());
    for (std::size_t j = 0; j < t.music.size(); ++j)
      d[j] = pair_distance(query.eeg[segment], t.music[j], opt.distance);
    return median(std::move(d));
  });
}

double exact_stimulus_rate(const std::vector<const TrialEmbeddings*>& queries,
                           const std::vector<const TrialEmbeddings*>& corpus,
                           const RetrievalOptions& opt, std::size_t top_k) {
  check(!queries.empty(), "exact_stimulus_rate: no queries");
  check(top_k >= 1, "exact_stimulus_rate: top_k must be >= 1");
  std::size_t hits = 0;
  for (const TrialEmbeddings* q : queries) {
    const bool present =
        std::any_of(corpus.begin(), corpus.end(),
                    [&](const TrialEmbeddings* t) { return t->track == q->track; });
    check(present, "exact_stimulus_rate: stimulus track ", q->track,
          " missing from corpus");
    const Ranking r = retrieve(*q, corpus, opt);
    const std::size_t kk = std::min(top_k, r.size());
    for (std::size_t i = 0; i < kk; ++i) {
      if (r[i].track_id == q->track) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(queries.size());
}

FoldMetrics evaluate_fold(const std::vector<TrialEmbeddings>& test,
                          const RetrievalOptions& opt,
                          const std::vector<const TrialEmbeddings*>& extra_corpus) {
  check(!test.empty(), "evaluate_fold: empty test fold");
  FoldMetrics m;
  m.n_trials = test.size();

  std::size_t seg_eeg = 0, seg_mus = 0, agg_eeg = 0, agg_mus = 0, segs = 0;
  for (const auto& t : test) {
    for (std::size_t s = 0; s < t.eeg_probs.size(); ++s) {
      seg_eeg += ((t.eeg_probs[s] > 0.5 ? 1 : 0) == t.label);
      seg_mus += ((t.music_probs[s] > 0.5 ? 1 : 0) == t.label);
      ++segs;
    }
    agg_eeg += (aggregate_majority(t.eeg_probs) == t.label);
    agg_mus += (aggregate_majority(t.music_probs) == t.label);
  }
  m.n_segments = segs;
  m.acc_seg_eeg = static_cast<double>(seg_eeg) / static_cast<double>(segs);
  m.acc_seg_music = static_cast<double>(seg_mus) / static_cast<double>(segs);
  m.acc_agg_eeg = static_cast<double>(agg_eeg) / static_cast<double>(test.size());
  m.acc_agg_music =
      static_cast<double>(agg_mus) / static_cast<double>(test.size());

  std::vector<const TrialEmbeddings*> corpus;
  for (const auto& t : test) corpus.push_back(&t);
  corpus.insert(corpus.end(), extra_corpus.begin(), extra_corpus.end());

  std::vector<double> p10;
  std::vector<std::vector<int>> rankings;
  std::vector<const TrialEmbeddings*> queries;
  for (const auto& q : test) {
    queries.push_back(&q);
    if (opt.mode == RetrievalMode::kAggregated) {
      rankings.push_back(relevance_of(retrieve(q, corpus, opt)));
      p10.push_back(precision_at_k(rankings.back(), opt.k));
    } else {
      for (std::size_t s = 0; s < q.eeg.size(); ++s) {
        rankings.push_back(relevance_of(retrieve_segment(q, s, corpus, opt)));
        p10.push_back(precision_at_k(rankings.back(), opt.k));
      }
    }
  }
  double p10_sum = 0.0;
  for (double v : p10) p10_sum += v;
  m.p_at_k = p10_sum / static_cast<double>(p10.size());
  m.map = mean_average_precision(rankings);
  std::size_t scored = 0;
  for (const auto& r : rankings)
    scored += std::any_of(r.begin(), r.end(), [](int x) { return x != 0; });
  m.n_queries_scored = scored;
  m.exact_at_1 = exact_stimulus_rate(queries, corpus, opt, 1);
  return m;
}

FoldMetrics mean_metrics(const std::vector<FoldMetrics>& folds) {
  check(!folds.empty(), "mean_metrics: no folds");
  FoldMetrics m;
  for (const auto& f : folds) {
    m.n_trials += f.n_trials;
    m.n_segments += f.n_segments;
    m.n_queries_scored += f.n_queries_scored;
    m.acc_seg_eeg += f.acc_seg_eeg;
    m.acc_agg_eeg += f.acc_agg_eeg;
    m.acc_seg_music += f.acc_seg_music;
    m.acc_agg_music += f.acc_agg_music;
    m.p_at_k += f.p_at_k;
    m.map += f.map;
    m.exact_at_1 += f.exact_at_1;
  }
  const double n = static_cast<double>(folds.size());
  m.acc_seg_eeg /= n;
  m.acc_agg_eeg /= n;
  m.acc_seg_music /= n;
  m.acc_agg_music /= n;
  m.p_at_k /= n;
  m.map /= n;
  m.exact_at_1 /= n;
  return m;
}

namespace {

std::ofstream open_text(const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(path, std::ios::trunc);
  check(os.good(), "cannot open for writing: ", path);
  return os;
}

void format_fixed(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  os << buf;
}

}  // namespace

void write_metrics_report(const std::string& path,
                          const std::vector<SubjectRow>& rows) {
  check(!rows.empty(), "write_metrics_report: no rows");
  auto os = open_text(path);
  os << "subject,acc_seg_eeg,acc_agg_eeg,acc_seg_music,acc_agg_music,"
        "p_at_10,map,exact_at_1\n";
  auto emit = [&](const std::string& name, const FoldMetrics& m) {
    os << name;
    for (double v : {m.acc_seg_eeg, m.acc_agg_eeg, m.acc_seg_music,
                     m.acc_agg_music, m.p_at_k, m.map, m.exact_at_1}) {
      os << ',';
      format_fixed(os, v);
    }
    os << "\n";
  };
  std::vector<FoldMetrics> all;
  for (const auto& r : rows) {
    emit(std::to_string(r.subject), r.metrics);
    all.push_back(r.metrics);
  }
  emit("mean", mean_metrics(all));
  check(os.good(), "write failed: ", path);
}

void write_temporal_report(
    const std::string& path,
    const std::vector<std::pair<int, TemporalCurve>>& curves) {
  check(!curves.empty(), "write_temporal_report: no curves");
  auto os = open_text(path);
  os << "track,segment_index,map_raw,map_smoothed\n";
  for (const auto& [track, curve] : curves) {
    for (std::size_t t = 0; t < curve.raw.size(); ++t) {
      os << track << ',' << t << ',';
      format_fixed(os, curve.raw[t]);
      os << ',';
      format_fixed(os, curve.smoothed[t]);
      os << "\n";
    }
  }
  check(os.good(), "write failed: ", path);
}

void export_embeddings(const std::vector<TrialEmbeddings>& trials,
                       std::size_t common_dim, const std::string& path) {
  check(!trials.empty(), "export_embeddings: nothing to export");
  auto os = open_text(path);
  os << "subject,trial,track,segment_index,modality,label";
  for (std::size_t d = 0; d < common_dim; ++d) os << ",e" << d;
  os << "\n";
  auto emit = [&](const TrialEmbeddings& t, const char* modality,
                  const std::vector<std::vector<double>>& embs) {
    for (std::size_t s = 0; s < embs.size(); ++s) {
      check(embs[s].size() == common_dim, "export_embeddings: embedding dim ",
            embs[s].size(), " != ", common_dim);
      os << t.subject << ',' << t.trial << ',' << t.track << ',' << s << ','
         << modality << ',' << t.label;
      for (double v : embs[s]) {
        os << ',';
        format_fixed(os, v);
      }
      os << "\n";
    }
  };
  for (const auto& t : trials) {
    emit(t, "eeg", t.eeg);
    emit(t, "music", t.music);
  }
  check(os.good(), "write failed: ", path);
}

}  // namespace cmaf::eval
