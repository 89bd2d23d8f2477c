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
// The bi-stream network: an EEG branch (two stacked LSTMs over the channel
// axis plus additive softmax attention), a feed-forward music branch, a
// shared 64-D common space, one linear sigmoid classifier scoring both
// modalities, and a gradient-reversal domain discriminator.

#ifndef CMAF_MODEL_HPP_
#define CMAF_MODEL_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cmaf/data.hpp"
#include "cmaf/graph.hpp"
#include "cmaf/signal.hpp"
#include "cmaf/tensor.hpp"

namespace cmaf::model {

struct Dims {
  std::size_t channels = 32;      // LSTM sequence length (recurrence axis)
  std::size_t eeg_features = 12;  // per-channel input size
  std::size_t lstm_hidden = 32;
  std::size_t attention_dim = 32;
  std::size_t music_dim = 256;
  std::size_t music_hidden = 128;
  std::size_t music_layers = 2;  // tanh hidden layers before the linear map
  std::size_t common_dim = 64;
  std::size_t disc_hidden = 32;

  bool operator==(const Dims&) const = default;
};

// The four gates are fused along the output axis in the fixed order
// input, forget, cell, output, so one matmul feeds a whole cell step.
struct LstmBlock {
  ad::Tensor w_x;   // (input x 4*hidden)
  ad::Tensor w_h;   // (hidden x 4*hidden)
  ad::Tensor bias;  // (1 x 4*hidden); forget block starts at 1
};

struct EegBranchParams {
  LstmBlock lstm1;
  LstmBlock lstm2;
  ad::Tensor attn_w;  // (hidden x attention_dim)
  ad::Tensor attn_b;  // (1 x attention_dim)
  ad::Tensor attn_v;  // (attention_dim x 1)
  ad::Tensor proj_w;  // (hidden x common_dim)
  ad::Tensor proj_b;  // (1 x common_dim)
};

struct MusicBranchParams {
  std::vector<ad::Tensor> weights;  // music_layers hidden maps + final linear
  std::vector<ad::Tensor> biases;
};

struct HeadParams {
  ad::Tensor cls_w;    // (common_dim x 1), shared across modalities
  ad::Tensor cls_b;    // (1 x 1)
  ad::Tensor disc_w1;  // (common_dim x disc_hidden)
  ad::Tensor disc_b1;  // (1 x disc_hidden)
  ad::Tensor disc_w2;  // (disc_hidden x 1)
  ad::Tensor disc_b2;  // (1 x 1)
};

struct ModelParams {
  Dims dims;
  EegBranchParams eeg;
  MusicBranchParams music;
  HeadParams head;

  // Fixed enumeration order; the optimizer, the checkpoint format and
  // bind() all rely on it.
  void visit(const std::function<void(const std::string&, ad::Tensor&)>& fn);
  std::vector<ad::Tensor*> tensors();
  std::size_t tensor_count();
};

// Fan-in scaled uniform init U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights,
// zero biases, LSTM forget-gate bias 1. Deterministic per seed.
ModelParams init_params(const Dims& dims, std::uint64_t seed);

// Parameter node ids inside one graph, in ModelParams order.
struct BoundLstm {
  ad::NodeId w_x = -1;
  ad::NodeId w_h = -1;
  ad::NodeId bias = -1;
};

struct BoundModel {
  Dims dims;
  BoundLstm lstm1, lstm2;
  ad::NodeId attn_w, attn_b, attn_v, proj_w, proj_b;
  std::vector<ad::NodeId> music_w, music_b;
  ad::NodeId cls_w, cls_b, disc_w1, disc_b1, disc_w2, disc_b2;
  std::vector<ad::NodeId> all;  // same order as ModelParams::tensors()
};

// Binds every parameter tensor into the graph as a leaf. Call once per tape
// sweep; with trainable=false the graph treats parameters as constants.
BoundModel bind(ad::Graph& g, ModelParams& params, bool trainable = true);

// Assembles the named views from node ids already in ModelParams order
// (bind() and the gradient tests share this).
BoundModel bind_ids(const Dims& dims, std::size_t music_layer_count,
                    const std::vector<ad::NodeId>& ids);

struct EegForward {
  ad::NodeId embedding;           // (1 x common_dim)
  std::vector<double> attention;  // per-channel softmax weights
};

// x: channels x eeg_features, standardized. The channel index is the
// recurrence axis (inter-channel correlations); attention pools the
// per-channel hidden states of the second LSTM.
EegForward eeg_forward(ad::Graph& g, const BoundModel& m,
                       const signal::FeatureMatrix& x);

// e: music_dim embedding -> (1 x common_dim).
ad::NodeId music_forward(ad::Graph& g, const BoundModel& m, const double* e);

// Batched music branch: rows (n x music_dim) -> (n x common_dim). Biases
// are tiled by concatenating the bias node n times (their gradients
// accumulate across rows).
ad::NodeId music_forward_batch(ad::Graph& g, const BoundModel& m,
                               ad::NodeId rows, std::size_t n);

// (n x 1) probability of the positive emotion class per embedding row.
ad::NodeId classify(ad::Graph& g, const BoundModel& m, ad::NodeId embeddings);

// (n x 1) probability that each row came from the music branch. The
// gradient-reversal layer sits between the embeddings and the discriminator
// stack, so branch gradients arrive negated and scaled by lambda.
ad::NodeId discriminate(ad::Graph& g, const BoundModel& m,
                        ad::NodeId embeddings, double lambda);

// Checkpoint: "CMAF" magic, version, dims, feature standardizer, then all
// parameter tensors as little-endian f64 arrays in ModelParams order.
void save_checkpoint(const std::string& path, ModelParams& params,
                     const data::Standardizer& standardizer);

struct Checkpoint {
  ModelParams params;
  data::Standardizer standardizer;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace cmaf::model

#endif  // CMAF_MODEL_HPP_
