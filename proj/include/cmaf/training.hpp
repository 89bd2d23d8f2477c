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
// Objective J = l1*(l11*ell_a + l12*ell_b) + l2*ell_dd, half-batch domain
// mixing, Adam training with early stopping, per-subject 5-fold CV.

#ifndef CMAF_TRAINING_HPP_
#define CMAF_TRAINING_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "cmaf/data.hpp"
#include "cmaf/graph.hpp"
#include "cmaf/model.hpp"

namespace cmaf::train {

struct Lambdas {
  double l1 = 1.0;
  double l2 = 0.5;
  double l11 = 1.0;
  double l12 = 1.0;
};

struct LossBundle {
  double ell_a = 0.0;   // EEG classification BCE
  double ell_b = 0.0;   // music classification BCE
  double ell_dd = 0.0;  // domain discrimination BCE
  double j1 = 0.0;
  double j2 = 0.0;
  double j = 0.0;
  Lambdas lambdas;  // effective values (ablations zero the dropped terms)
};

enum class MixMode {
  kModalitySelect,  // half the instances contribute EEG, half music
  kPermutePairs,    // music half drawn from a permuted instance set
};

struct TrainConfig {
  double learning_rate = 1e-4;
  int patience = 15;
  int max_epochs = 300;
  int batch_size = 32;  // must be even (half-batch mixing)
  Lambdas lambdas;
  double grl_lambda = 1.0;
  bool music_supervision = true;
  bool domain_discriminator = true;
  MixMode mix_mode = MixMode::kModalitySelect;
  std::uint64_t seed = 1;

  void validate() const;
};

struct EpochLog {
  int epoch = 0;
  double ell_a = 0.0;
  double ell_b = 0.0;
  double ell_dd = 0.0;
  double j = 0.0;
  double val_j = 0.0;
};

struct TrainReport {
  std::vector<EpochLog> epochs;
  int stopping_epoch = 0;
  int best_epoch = 0;
  double best_val_j = 0.0;
  int fold = -1;
  double wall_seconds = 0.0;
};

// Half-batch domain mixing over already-built embedding nodes. u and v must
// be pairwise aligned and of equal even length N; the result holds exactly
// N/2 EEG entries (label 0) and N/2 music entries (label 1), shuffled.
struct DomainBatch {
  std::vector<ad::NodeId> embeddings;
  std::vector<int> labels;  // 0 = EEG, 1 = music
};

DomainBatch mix_domain_batch(const std::vector<ad::NodeId>& u,
                             const std::vector<ad::NodeId>& v,
                             std::uint64_t seed,
                             MixMode mode = MixMode::kModalitySelect);

// One mini-batch of aligned instances (features already standardized).
struct Batch {
  std::vector<const signal::FeatureMatrix*> eeg;
  std::vector<const double*> music;
  std::vector<int> labels;
  data::ClassWeights weights;
};

struct Objective {
  LossBundle bundle;
  ad::NodeId j_node = -1;  // -1 when the objective is identically zero
};

// Builds the full forward graph for a batch and returns J plus the bundle.
// music_supervision=false drops the music term from J1 (and its forward);
// domain_discriminator=false drops J2 and the GRL path entirely.
Objective compute_objective(ad::Graph& g, const model::BoundModel& m,
                            const Batch& batch, const TrainConfig& cfg,
                            std::uint64_t mix_seed);

// Early-stopping bookkeeping: stop after `patience` consecutive epochs
// without a strict decrease of the validation loss; the best epoch's
// parameters are what training returns.
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience) : patience_(patience) {}

  // Returns true when training should stop after this epoch. improved() is
  // valid until the next observe().
  bool observe(int epoch, double val_loss) {
    if (!has_best_ || val_loss < best_) {
      best_ = val_loss;
      best_epoch_ = epoch;
      has_best_ = true;
      since_ = 0;
      improved_ = true;
      return false;
    }
    improved_ = false;
    return ++since_ >= patience_;
  }

  bool improved() const { return improved_; }
  int best_epoch() const { return best_epoch_; }
  double best_value() const { return best_; }

 private:
  int patience_;
  double best_ = 0.0;
  int best_epoch_ = 0;
  bool has_best_ = false;
  bool improved_ = false;
  int since_ = 0;
};

struct FoldInput {
  const data::Dataset* dataset = nullptr;
  std::vector<std::size_t> train_trials;  // indices into dataset->trials
  std::vector<std::size_t> val_trials;    // disjoint from train_trials
  data::Dimension dimension = data::Dimension::kValence;
};

struct FoldResult {
  model::ModelParams params;  // parameters of the best validation epoch
  data::Standardizer standardizer;
  TrainReport report;
};

// Adam + early stopping: stops after `patience` consecutive epochs without a
// strict validation-J decrease, returns the best-epoch parameters.
FoldResult train_fold(const FoldInput& input, const model::Dims& dims,
                      const TrainConfig& cfg);

struct FoldOutcome {
  int fold = -1;
  std::vector<std::size_t> test_trials;
  FoldResult result;
};

struct SubjectCv {
  int subject = 0;
  data::FoldSplit split;
  std::vector<FoldOutcome> folds;
};

// Stratified 5-fold CV for one subject: per fold, standardize on the train
// folds, train, and hand the held-out fold (also the early-stop validation
// set) to evaluation. Per-fold seeds derive from (seed, subject, fold).
SubjectCv cross_validate(const data::Dataset& ds, int subject,
                         data::Dimension dim, const model::Dims& dims,
                         const TrainConfig& cfg, int k = 5);

// Runs tasks 0..count-1 on up to `jobs` threads. Exceptions propagate.
void run_parallel(int jobs, std::size_t count,
                  const std::function<void(std::size_t)>& fn);

// CV over every subject, optionally parallel over (subject, fold). Results
// are identical for any job count (per-fold seeds fix the training streams).
std::vector<SubjectCv> cross_validate_all(const data::Dataset& ds,
                                          data::Dimension dim,
                                          const model::Dims& dims,
                                          const TrainConfig& cfg, int k = 5,
                                          int jobs = 1);

}  // namespace cmaf::train

#endif  // CMAF_TRAINING_HPP_
