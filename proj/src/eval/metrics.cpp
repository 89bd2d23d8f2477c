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

#include "cmaf/error.hpp"
#include "cmaf/eval.hpp"
#include "cmaf/kernels.hpp"
#include "cmaf/log.hpp"

namespace cmaf::eval {

int aggregate_majority(const std::vector<double>& segment_probs) {
  check(!segment_probs.empty(), "aggregate_majority: empty prediction list");
  std::size_t votes1 = 0;
  double sum = 0.0;
  for (double p : segment_probs) {
    votes1 += p > 0.5 ? 1 : 0;
    sum += p;
  }
  const std::size_t votes0 = segment_probs.size() - votes1;
  if (votes1 != votes0) return votes1 > votes0 ? 1 : 0;
  const double mean = sum / static_cast<double>(segment_probs.size());
  return mean >= 0.5 ? 1 : 0;  // exact tie goes to class 1
}

double median(std::vector<double> v) {
  check(!v.empty(), "median: empty input");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace {

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  check(a.size() == b.size(), "distance: dimension mismatch ", a.size(),
        " vs ", b.size());
  return std::sqrt(kernels::active().sq_dist(a.data(), b.data(), a.size()));
}

}  // namespace

double track_distance(const std::vector<std::vector<double>>& query,
                      const std::vector<std::vector<double>>& track) {
  check(!query.empty() && !track.empty(), "track_distance: empty input");
  std::vector<double> per_segment;
  per_segment.reserve(query.size());
  if (query.size() == track.size()) {
    for (std::size_t i = 0; i < query.size(); ++i)
      per_segment.push_back(euclidean(query[i], track[i]));
  } else {
    std::vector<double> d(track.size());
    for (const auto& q : query) {
      for (std::size_t j = 0; j < track.size(); ++j) d[j] = euclidean(q, track[j]);
      per_segment.push_back(median(d));
    }
  }
  return median(std::move(per_segment));
}

double precision_at_k(const std::vector<int>& relevance, std::size_t k) {
  check(!relevance.empty(), "precision_at_k: empty ranking");
  check(k >= 1, "precision_at_k: k must be >= 1");
  const std::size_t kk = std::min(k, relevance.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < kk; ++i) hits += relevance[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(kk);
}

double average_precision(const std::vector<int>& relevance) {
  check(!relevance.empty(), "average_precision: empty ranking");
  std::size_t total_relevant = 0;
  for (int r : relevance) total_relevant += r ? 1 : 0;
  check(total_relevant >= 1,
        "average_precision: undefined without relevant items");
  double acc = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < relevance.size(); ++i) {
    if (relevance[i]) {
      ++hits;
      acc += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return acc / static_cast<double>(total_relevant);
}

double mean_average_precision(const std::vector<std::vector<int>>& queries) {
  check(!queries.empty(), "mean_average_precision: no queries");
  double acc = 0.0;
  std::size_t scored = 0;
  for (const auto& q : queries) {
    const bool any = std::any_of(q.begin(), q.end(), [](int r) { return r != 0; });
    if (!any) {
      log_warn("mean_average_precision: query without relevant items excluded");
      continue;
    }
    acc += average_precision(q);
    ++scored;
  }
  check(scored > 0, "mean_average_precision: no query has a relevant item");
  return acc / static_cast<double>(scored);
}

std::vector<double> moving_average(const std::vector<double>& x, int window) {
  check(window >= 1 && window % 2 == 1,
        "moving_average: window must be odd and >= 1, got ", window);
  const int n = static_cast<int>(x.size());
  const int half = window / 2;
  std::vector<double> out(x.size());
  for (int t = 0; t < n; ++t) {
    const int lo = std::max(0, t - half);
    const int hi = std::min(n - 1, t + half);
    // mean relative to the first window value: constant inputs pass
    // through bit-exactly
    const double base = x[lo];
    double s = 0.0;
    for (int i = lo + 1; i <= hi; ++i) s += x[i] - base;
    out[t] = base + s / static_cast<double>(hi - lo + 1);
  }
  return out;
}

TemporalCurve temporal_map(const std::vector<std::vector<double>>& per_query_ap,
                           int smooth_window) {
  check(!per_query_ap.empty(), "temporal_map: no queries");
  const std::size_t t_len = per_query_ap.front().size();
  check(t_len >= 1, "temporal_map: empty time axis");
  for (const auto& row : per_query_ap)
    check(row.size() == t_len, "temporal_map: inconsistent segment counts ",
          row.size(), " vs ", t_len);
  TemporalCurve curve;
  curve.raw.assign(t_len, 0.0);
  for (const auto& row : per_query_ap)
    for (std::size_t t = 0; t < t_len; ++t) curve.raw[t] += row[t];
  for (double& v : curve.raw) v /= static_cast<double>(per_query_ap.size());
  curve.smoothed = moving_average(curve.raw, smooth_window);
  return curve;
}

}  // namespace cmaf::eval
