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

#include "cmaf/training.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "cmaf/adam.hpp"
#include "cmaf/error.hpp"
#include "cmaf/rng.hpp"

namespace cmaf::train {

using ad::Graph;
using ad::NodeId;
using ad::Tensor;

void TrainConfig::validate() const {
  check(learning_rate >= 0.0, "train: learning_rate must be >= 0");
  check(patience >= 1, "train: patience must be >= 1, got ", patience);
  check(max_epochs >= 1, "train: max_epochs must be >= 1");
  check(batch_size >= 2 && batch_size % 2 == 0,
        "train: batch_size must be even and >= 2 (half-batch mixing), got ",
        batch_size);
  check(lambdas.l1 >= 0.0 && lambdas.l2 >= 0.0 && lambdas.l11 >= 0.0 &&
            lambdas.l12 >= 0.0,
        "train: lambda weights must be non-negative");
  check(grl_lambda >= 0.0, "train: grl_lambda must be non-negative");
}

DomainBatch mix_domain_batch(const std::vector<NodeId>& u,
                             const std::vector<NodeId>& v, std::uint64_t seed,
                             MixMode mode) {
  check(u.size() == v.size(), "mix_domain_batch: ", u.size(), " EEG vs ",
        v.size(), " music embeddings");
  const std::size_t n = u.size();
  check(n >= 2 && n % 2 == 0, "mix_domain_batch: batch size must be even, got ",
        n);

  Rng rng(mix_seed({seed, 0x3219u}));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);

  // First half of the permuted instances keeps the EEG embedding, the rest
  // the music one. kPermutePairs additionally breaks the instance pairing
  // on the music side.
  std::vector<std::size_t> music_src(order.begin() + n / 2, order.end());
  if (mode == MixMode::kPermutePairs) {
    for (std::size_t& s : music_src) s = rng.below(n);
  }

  DomainBatch out;
  out.embeddings.reserve(n);
  out.labels.reserve(n);
  for (std::size_t i = 0; i < n / 2; ++i) {
    out.embeddings.push_back(u[order[i]]);
    out.labels.push_back(0);
  }
  for (std::size_t i = 0; i < n / 2; ++i) {
    out.embeddings.push_back(v[music_src[i]]);
    out.labels.push_back(1);
  }
  std::vector<std::size_t> shuffle_idx(n);
  for (std::size_t i = 0; i < n; ++i) shuffle_idx[i] = i;
  rng.shuffle(shuffle_idx);
  DomainBatch shuffled;
  shuffled.embeddings.reserve(n);
  shuffled.labels.reserve(n);
  for (std::size_t i : shuffle_idx) {
    shuffled.embeddings.push_back(out.embeddings[i]);
    shuffled.labels.push_back(out.labels[i]);
  }
  return shuffled;
}

namespace {

// Column tensor (n x 1) from per-sample scalars.
Tensor column(const std::vector<double>& v) {
  Tensor t = Tensor::matrix(v.size(), 1);
  t.data = v;
  return t;
}

}  // namespace

Objective compute_objective(Graph& g, const model::BoundModel& m,
                            const Batch& batch, const TrainConfig& cfg,
                            std::uint64_t mix_seed_value) {
  const std::size_t n = batch.eeg.size();
  check(n >= 1, "compute_objective: empty batch");
  check(batch.music.size() == n && batch.labels.size() == n,
        "compute_objective: ragged batch");

  Lambdas eff = cfg.lambdas;
  if (!cfg.music_supervision) eff.l12 = 0.0;
  if (!cfg.domain_discriminator) eff.l2 = 0.0;
  const bool need_music = cfg.music_supervision || cfg.domain_discriminator;
  const std::size_t common = m.dims.common_dim;

  std::vector<NodeId> eeg_emb(n);
  for (std::size_t i = 0; i < n; ++i)
    eeg_emb[i] = model::eeg_forward(g, m, *batch.eeg[i]).embedding;
  const NodeId eeg_stack = g.concat(eeg_emb);  // (n x common)

  NodeId music_stack = -1;
  if (need_music) {
    std::vector<double> rows(n * m.dims.music_dim);
    for (std::size_t i = 0; i < n; ++i)
      std::copy(batch.music[i], batch.music[i] + m.dims.music_dim,
                rows.begin() + i * m.dims.music_dim);
    music_stack = model::music_forward_batch(
        g, m, g.leaf_rows(rows.data(), n, m.dims.music_dim), n);
  }

  std::vector<double> y(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = batch.labels[i];
    w[i] = batch.weights.of(batch.labels[i]);
  }
  const NodeId y_node = g.leaf(column(y));
  const NodeId w_node = g.leaf(column(w));

  Objective out;
  out.bundle.lambdas = eff;

  const NodeId ell_a = g.bce(model::classify(g, m, eeg_stack), y_node, w_node);
  out.bundle.ell_a = g.value(ell_a).data[0];

  NodeId j1;
  if (cfg.music_supervision) {
    const NodeId ell_b =
        g.bce(model::classify(g, m, music_stack), y_node, w_node);
    out.bundle.ell_b = g.value(ell_b).data[0];
    j1 = g.add(g.mul(g.constant(eff.l11), ell_a),
               g.mul(g.constant(eff.l12), ell_b));
  } else {
    j1 = g.mul(g.constant(eff.l11), ell_a);
  }
  out.bundle.j1 = g.value(j1).data[0];

  NodeId j;
  if (cfg.domain_discriminator) {
    check(n % 2 == 0,
          "compute_objective: domain mixing needs an even batch, got ", n);
    std::vector<NodeId> music_emb(n);
    for (std::size_t i = 0; i < n; ++i)
      music_emb[i] = g.slice(music_stack, i * common, common);
    const DomainBatch mixed =
        mix_domain_batch(eeg_emb, music_emb, mix_seed_value, cfg.mix_mode);
    const NodeId dprobs =
        model::discriminate(g, m, g.concat(mixed.embeddings), cfg.grl_lambda);
    std::vector<double> dy(n);
    for (std::size_t i = 0; i < n; ++i) dy[i] = mixed.labels[i];
    const NodeId ell_dd = g.bce(dprobs, g.leaf(column(dy)));
    out.bundle.ell_dd = g.value(ell_dd).data[0];
    out.bundle.j2 = out.bundle.ell_dd;
    j = g.add(g.mul(g.constant(eff.l1), j1),
              g.mul(g.constant(eff.l2), ell_dd));
  } else {
    j = g.mul(g.constant(eff.l1), j1);
  }
  out.bundle.j = g.value(j).data[0];
  out.j_node = j;
  return out;
}

namespace {

struct PreparedTrial {
  std::size_t trial_index;
  int label;
  std::vector<signal::FeatureMatrix> features;  // standardized copies
};

struct InstanceRef {
  std::size_t prepared;  // index into PreparedTrial vector
  std::size_t segment;
};

std::vector<PreparedTrial> prepare(const data::Dataset& ds,
                                   const std::vector<std::size_t>& trials,
                                   const data::Standardizer& st,
                                   data::Dimension dim) {
  std::vector<PreparedTrial> out;
  out.reserve(trials.size());
  for (std::size_t ti : trials) {
    const auto& trial = ds.trials[ti];
    PreparedTrial pt;
    pt.trial_index = ti;
    pt.label = trial.label(dim);
    pt.features = trial.eeg;
    for (auto& fm : pt.features) {
      check(fm.values.size() == st.dim(), "train: feature dim ",
            fm.values.size(), " != standardizer dim ", st.dim());
      st.apply(fm.values.data());
    }
    out.push_back(std::move(pt));
  }
  return out;
}

std::vector<InstanceRef> instances_of(const std::vector<PreparedTrial>& trials) {
  std::vector<InstanceRef> out;
  for (std::size_t p = 0; p < trials.size(); ++p)
    for (std::size_t s = 0; s < trials[p].features.size(); ++s)
      out.push_back({p, s});
  return out;
}

Batch make_batch(const data::Dataset& ds,
                 const std::vector<PreparedTrial>& prepared,
                 const std::vector<InstanceRef>& refs, std::size_t begin,
                 std::size_t end, const data::ClassWeights& weights) {
  Batch b;
  b.weights = weights;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& ref = refs[i];
    const auto& pt = prepared[ref.prepared];
    b.eeg.push_back(&pt.features[ref.segment]);
    b.music.push_back(ds.trials[pt.trial_index].music.segment(ref.segment));
    b.labels.push_back(pt.label);
  }
  return b;
}

}  // namespace

FoldResult train_fold(const FoldInput& input, const model::Dims& dims,
                      const TrainConfig& cfg) {
  cfg.validate();
  check(input.dataset != nullptr, "train_fold: no dataset");
  check(!input.train_trials.empty(), "train_fold: empty training set");
  for (std::size_t t : input.train_trials)
    for (std::size_t v : input.val_trials)
      check(t != v, "train_fold: trial ", t, " appears in both train and val");

  const data::Dataset& ds = *input.dataset;
  const auto t_start = std::chrono::steady_clock::now();

  // Standardization statistics from the training folds only.
  data::Standardizer st;
  {
    std::vector<const double*> rows;
    for (std::size_t ti : input.train_trials)
      for (const auto& fm : ds.trials[ti].eeg) rows.push_back(fm.values.data());
    st.fit(rows, ds.eeg_dim());
  }

  auto train_prepared = prepare(ds, input.train_trials, st, input.dimension);
  auto val_prepared = prepare(ds, input.val_trials, st, input.dimension);
  auto train_refs = instances_of(train_prepared);
  auto val_refs = instances_of(val_prepared);

  data::ClassWeights weights;
  {
    std::vector<int> labels;
    for (const auto& r : train_refs) labels.push_back(train_prepared[r.prepared].label);
    weights = data::class_weights(labels);
  }

  model::ModelParams params = init_params(dims, mix_seed({cfg.seed, 0x9a7au}));
  ad::AdamOptimizer opt(params.tensors(), cfg.learning_rate);

  Rng shuffle_rng(mix_seed({cfg.seed, 0x5d5du}));
  Graph g;

  // Evaluates total J over a set without touching parameters. The domain
  // mix uses a fixed seed so successive validation passes are comparable.
  auto evaluate_j = [&](const std::vector<PreparedTrial>& prepared,
                        const std::vector<InstanceRef>& refs) {
    double total = 0.0;
    std::size_t counted = 0;
    for (std::size_t base = 0; base < refs.size(); base += cfg.batch_size) {
      std::size_t end = std::min(refs.size(), base + cfg.batch_size);
      if ((end - base) % 2 == 1) --end;  // mixing needs even batches
      if (end <= base) continue;
      g.rewind();
      const auto bound = model::bind(g, params, /*trainable=*/false);
      const Batch batch = make_batch(ds, prepared, refs, base, end, weights);
      const auto obj =
          compute_objective(g, bound, batch, cfg, mix_seed({cfg.seed, 0xeba1u}));
      total += obj.bundle.j * static_cast<double>(end - base);
      counted += end - base;
    }
    check(counted > 0, "train_fold: validation set too small to evaluate");
    return total / static_cast<double>(counted);
  };

  FoldResult out;
  TrainReport& report = out.report;
  model::ModelParams best = params;
  EarlyStopper stopper(cfg.patience);

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle_rng.shuffle(train_refs);
    EpochLog log;
    log.epoch = epoch;
    std::size_t batches = 0;
    for (std::size_t base = 0; base < train_refs.size();
         base += cfg.batch_size) {
      std::size_t end = std::min(train_refs.size(), base + cfg.batch_size);
      if ((end - base) % 2 == 1) --end;  // drop the odd trailing instance
      if (end <= base) continue;
      g.rewind();
      const auto bound = model::bind(g, params, /*trainable=*/true);
      const Batch batch =
          make_batch(ds, train_prepared, train_refs, base, end, weights);
      const auto obj = compute_objective(
          g, bound, batch, cfg,
          mix_seed({cfg.seed, 0xba7c5u, static_cast<std::uint64_t>(epoch),
                    base}));
      check(std::isfinite(obj.bundle.j), "train_fold: non-finite loss at epoch ",
            epoch, " batch ", batches, " (ell_a=", obj.bundle.ell_a, " ell_b=",
            obj.bundle.ell_b, " ell_dd=", obj.bundle.ell_dd, ")");
      g.backward(obj.j_node);
      std::vector<Tensor> grads;
      grads.reserve(bound.all.size());
      for (ad::NodeId id : bound.all) grads.push_back(g.grad_of(id));
      try {
        opt.step(grads);
      } catch (const Error& e) {
        fail("train_fold: aborted at epoch ", epoch, " batch ", batches,
             " (ell_a=", obj.bundle.ell_a, " ell_b=", obj.bundle.ell_b,
             " ell_dd=", obj.bundle.ell_dd, "): ", e.what());
      }
      log.ell_a += obj.bundle.ell_a;
      log.ell_b += obj.bundle.ell_b;
      log.ell_dd += obj.bundle.ell_dd;
      log.j += obj.bundle.j;
      ++batches;
    }
    check(batches > 0, "train_fold: training set too small for one batch");
    log.ell_a /= static_cast<double>(batches);
    log.ell_b /= static_cast<double>(batches);
    log.ell_dd /= static_cast<double>(batches);
    log.j /= static_cast<double>(batches);

    log.val_j = input.val_trials.empty() ? log.j
                                         : evaluate_j(val_prepared, val_refs);
    report.epochs.push_back(log);
    report.stopping_epoch = epoch;

    const bool stop = stopper.observe(epoch, log.val_j);
    if (stopper.improved()) {
      best = params;
      report.best_epoch = epoch;
    }
    if (stop) break;
  }

  out.params = std::move(best);
  out.standardizer = std::move(st);
  report.best_val_j = stopper.best_value();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return out;
}

SubjectCv cross_validate(const data::Dataset& ds, int subject,
                         data::Dimension dim, const model::Dims& dims,
                         const TrainConfig& cfg, int k) {
  const auto subject_trials = ds.trials_of(subject);
  check(!subject_trials.empty(), "cross_validate: subject ", subject,
        " has no trials");

  std::vector<std::pair<int, int>> trial_labels;
  for (std::size_t ti : subject_trials)
    trial_labels.emplace_back(ds.trials[ti].trial, ds.trials[ti].label(dim));

  SubjectCv out;
  out.subject = subject;
  out.split = data::stratified_folds(trial_labels, k, cfg.seed);

  for (int fold = 0; fold < k; ++fold) {
    FoldInput in;
    in.dataset = &ds;
    in.dimension = dim;
    for (std::size_t ti : subject_trials) {
      if (out.split.fold_of(ds.trials[ti].trial) == fold)
        in.val_trials.push_back(ti);
      else
        in.train_trials.push_back(ti);
    }
    check(!in.val_trials.empty(), "cross_validate: fold ", fold, " is empty");

    TrainConfig fold_cfg = cfg;
    fold_cfg.seed = mix_seed({cfg.seed, static_cast<std::uint64_t>(subject),
                              static_cast<std::uint64_t>(fold)});
    FoldOutcome outcome;
    outcome.fold = fold;
    outcome.test_trials = in.val_trials;
    outcome.result = train_fold(in, dims, fold_cfg);
    outcome.result.report.fold = fold;
    out.folds.push_back(std::move(outcome));
  }
  return out;
}

std::vector<SubjectCv> cross_validate_all(const data::Dataset& ds,
                                          data::Dimension dim,
                                          const model::Dims& dims,
                                          const TrainConfig& cfg, int k,
                                          int jobs) {
  const auto subjects = ds.subjects();
  std::vector<SubjectCv> out(subjects.size());

  struct Task {
    std::size_t subject_idx;
    int fold;
  };
  std::vector<Task> tasks;
  for (std::size_t si = 0; si < subjects.size(); ++si) {
    SubjectCv& cv = out[si];
    cv.subject = subjects[si];
    std::vector<std::pair<int, int>> trial_labels;
    for (std::size_t ti : ds.trials_of(subjects[si]))
      trial_labels.emplace_back(ds.trials[ti].trial, ds.trials[ti].label(dim));
    cv.split = data::stratified_folds(trial_labels, k, cfg.seed);
    cv.folds.resize(k);
    for (int f = 0; f < k; ++f) tasks.push_back({si, f});
  }

  run_parallel(jobs, tasks.size(), [&](std::size_t t) {
    const auto [si, fold] = tasks[t];
    SubjectCv& cv = out[si];
    FoldInput in;
    in.dataset = &ds;
    in.dimension = dim;
    for (std::size_t ti : ds.trials_of(cv.subject)) {
      if (cv.split.fold_of(ds.trials[ti].trial) == fold)
        in.val_trials.push_back(ti);
      else
        in.train_trials.push_back(ti);
    }
    check(!in.val_trials.empty(), "cross_validate: fold ", fold, " is empty");
    TrainConfig fold_cfg = cfg;
    fold_cfg.seed = mix_seed({cfg.seed, static_cast<std::uint64_t>(cv.subject),
                              static_cast<std::uint64_t>(fold)});
    FoldOutcome& outcome = cv.folds[fold];
    outcome.fold = fold;
    outcome.test_trials = in.val_trials;
    outcome.result = train_fold(in, dims, fold_cfg);
    outcome.result.report.fold = fold;
  });
  return out;
}

void run_parallel(int jobs, std::size_t count,
                  const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n = std::min(static_cast<std::size_t>(jobs), count);
  pool.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cmaf::train
