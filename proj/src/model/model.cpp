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

#include "cmaf/model.hpp"

#include <cmath>

#include "cmaf/error.hpp"
#include "cmaf/rng.hpp"

namespace cmaf::model {

using ad::Graph;
using ad::NodeId;
using ad::Tensor;

void ModelParams::visit(
    const std::function<void(const std::string&, Tensor&)>& fn) {
  const std::pair<const char*, LstmBlock*> blocks[] = {{"lstm1", &eeg.lstm1},
                                                       {"lstm2", &eeg.lstm2}};
  for (const auto& [blkname, blk] : blocks) {
    fn(std::string("eeg.") + blkname + ".w_x", blk->w_x);
    fn(std::string("eeg.") + blkname + ".w_h", blk->w_h);
    fn(std::string("eeg.") + blkname + ".bias", blk->bias);
  }
  fn("eeg.attn_w", eeg.attn_w);
  fn("eeg.attn_b", eeg.attn_b);
  fn("eeg.attn_v", eeg.attn_v);
  fn("eeg.proj_w", eeg.proj_w);
  fn("eeg.proj_b", eeg.proj_b);
  for (std::size_t l = 0; l < music.weights.size(); ++l) {
    fn("music.w" + std::to_string(l), music.weights[l]);
    fn("music.b" + std::to_string(l), music.biases[l]);
  }
  fn("head.cls_w", head.cls_w);
  fn("head.cls_b", head.cls_b);
  fn("head.disc_w1", head.disc_w1);
  fn("head.disc_b1", head.disc_b1);
  fn("head.disc_w2", head.disc_w2);
  fn("head.disc_b2", head.disc_b2);
}

std::vector<Tensor*> ModelParams::tensors() {
  std::vector<Tensor*> out;
  visit([&](const std::string&, Tensor& t) { out.push_back(&t); });
  return out;
}

std::size_t ModelParams::tensor_count() { return tensors().size(); }

namespace {

Tensor uniform_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Tensor t = Tensor::matrix(rows, cols);
  const double bound = 1.0 / std::sqrt(static_cast<double>(rows));
  for (double& v : t.data) v = rng.uniform(-bound, bound);
  return t;
}

LstmBlock init_lstm(Rng& rng, std::size_t input, std::size_t hidden) {
  LstmBlock blk;
  blk.w_x = uniform_matrix(rng, input, 4 * hidden);
  blk.w_h = uniform_matrix(rng, hidden, 4 * hidden);
  blk.bias = Tensor::matrix(1, 4 * hidden, 0.0);
  // forget gate block starts open
  for (std::size_t j = hidden; j < 2 * hidden; ++j) blk.bias.data[j] = 1.0;
  return blk;
}

}  // namespace

ModelParams init_params(const Dims& dims, std::uint64_t seed) {
  check(dims.channels >= 1 && dims.eeg_features >= 1 && dims.lstm_hidden >= 1 &&
            dims.attention_dim >= 1 && dims.music_dim >= 1 &&
            dims.music_hidden >= 1 && dims.common_dim >= 1 &&
            dims.disc_hidden >= 1,
        "init_params: all dimensions must be positive");
  Rng rng(mix_seed({seed, 0x1417u}));
  ModelParams p;
  p.dims = dims;
  p.eeg.lstm1 = init_lstm(rng, dims.eeg_features, dims.lstm_hidden);
  p.eeg.lstm2 = init_lstm(rng, dims.lstm_hidden, dims.lstm_hidden);
  p.eeg.attn_w = uniform_matrix(rng, dims.lstm_hidden, dims.attention_dim);
  p.eeg.attn_b = Tensor::matrix(1, dims.attention_dim);
  p.eeg.attn_v = uniform_matrix(rng, dims.attention_dim, 1);
  p.eeg.proj_w = uniform_matrix(rng, dims.lstm_hidden, dims.common_dim);
  p.eeg.proj_b = Tensor::matrix(1, dims.common_dim);

  std::size_t in = dims.music_dim;
  for (std::size_t l = 0; l < dims.music_layers; ++l) {
    p.music.weights.push_back(uniform_matrix(rng, in, dims.music_hidden));
    p.music.biases.push_back(Tensor::matrix(1, dims.music_hidden));
    in = dims.music_hidden;
  }
  p.music.weights.push_back(uniform_matrix(rng, in, dims.common_dim));
  p.music.biases.push_back(Tensor::matrix(1, dims.common_dim));

  p.head.cls_w = uniform_matrix(rng, dims.common_dim, 1);
  p.head.cls_b = Tensor::matrix(1, 1);
  p.head.disc_w1 = uniform_matrix(rng, dims.common_dim, dims.disc_hidden);
  p.head.disc_b1 = Tensor::matrix(1, dims.disc_hidden);
  p.head.disc_w2 = uniform_matrix(rng, dims.disc_hidden, 1);
  p.head.disc_b2 = Tensor::matrix(1, 1);
  return p;
}

BoundModel bind_ids(const Dims& dims, std::size_t music_layer_count,
                    const std::vector<NodeId>& ids) {
  BoundModel b;
  b.dims = dims;
  b.all = ids;

  // Consume ids in the exact visit order.
  std::size_t k = 0;
  auto next = [&]() { return ids.at(k++); };
  for (BoundLstm* blk : {&b.lstm1, &b.lstm2}) {
    blk->w_x = next();
    blk->w_h = next();
    blk->bias = next();
  }
  b.attn_w = next();
  b.attn_b = next();
  b.attn_v = next();
  b.proj_w = next();
  b.proj_b = next();
  for (std::size_t l = 0; l < music_layer_count; ++l) {
    b.music_w.push_back(next());
    b.music_b.push_back(next());
  }
  b.cls_w = next();
  b.cls_b = next();
  b.disc_w1 = next();
  b.disc_b1 = next();
  b.disc_w2 = next();
  b.disc_b2 = next();
  check(k == ids.size(), "bind: parameter enumeration out of sync");
  return b;
}

BoundModel bind(Graph& g, ModelParams& params, bool trainable) {
  std::vector<NodeId> ids;
  params.visit([&](const std::string&, Tensor& t) {
    ids.push_back(g.leaf(t, trainable));
  });
  return bind_ids(params.dims, params.music.weights.size(), ids);
}

namespace {

struct LstmState {
  NodeId h;
  NodeId c;
};

// x_side is the precomputed (1 x 4H) input contribution of this step.
LstmState lstm_cell(Graph& g, const BoundLstm& blk, NodeId x_side, LstmState s,
                    std::size_t hidden) {
  NodeId pre = g.add(g.add(x_side, g.matmul(s.h, blk.w_h)), blk.bias);
  NodeId i = g.sigmoid(g.slice(pre, 0, hidden));
  NodeId f = g.sigmoid(g.slice(pre, hidden, hidden));
  NodeId cin = g.tanh_op(g.slice(pre, 2 * hidden, hidden));
  NodeId o = g.sigmoid(g.slice(pre, 3 * hidden, hidden));
  NodeId c = g.add(g.mul(f, s.c), g.mul(i, cin));
  NodeId h = g.mul(o, g.tanh_op(c));
  return {h, c};
}

NodeId tile_rows(Graph& g, NodeId row, std::size_t n) {
  if (n == 1) return row;
  return g.concat(std::vector<NodeId>(n, row));
}

}  // namespace

EegForward eeg_forward(Graph& g, const BoundModel& m,
                       const signal::FeatureMatrix& x) {
  const Dims& d = m.dims;
  check(x.channels == d.channels && x.feature_dim == d.eeg_features,
        "eeg_forward: input ", x.channels, "x", x.feature_dim,
        " does not match model dims ", d.channels, "x", d.eeg_features);

  const Tensor zero = Tensor::matrix(1, d.lstm_hidden);
  LstmState s1{g.leaf(zero), g.leaf(zero)};
  LstmState s2{g.leaf(zero), g.leaf(zero)};

  // input-side gate contributions of every channel in one matmul
  const NodeId xw = g.matmul(g.leaf_rows(x.values.data(), d.channels, d.eeg_features),
                             m.lstm1.w_x);
  const std::size_t gate_width = 4 * d.lstm_hidden;

  std::vector<NodeId> hidden;
  hidden.reserve(d.channels);
  for (std::size_t ch = 0; ch < d.channels; ++ch) {
    const NodeId x_side = g.slice(xw, ch * gate_width, gate_width);
    s1 = lstm_cell(g, m.lstm1, x_side, s1, d.lstm_hidden);
    s2 = lstm_cell(g, m.lstm2, g.matmul(s1.h, m.lstm2.w_x), s2, d.lstm_hidden);
    hidden.push_back(s2.h);
  }

  // Additive attention: score_c = v . tanh(W h_c + b); mean() reshapes the
  // (1 x 1) score to a scalar so the scores concat into one softmax row.
  std::vector<NodeId> scores;
  scores.reserve(d.channels);
  for (NodeId h : hidden) {
    NodeId e = g.matmul(g.tanh_op(g.add(g.matmul(h, m.attn_w), m.attn_b)),
                        m.attn_v);
    scores.push_back(g.mean(e));
  }
  NodeId alpha = g.softmax(g.concat(scores));      // {channels}
  NodeId stacked = g.concat(hidden);               // (channels x hidden)
  NodeId context = g.matmul(alpha, stacked);       // (1 x hidden)
  NodeId emb = g.add(g.matmul(context, m.proj_w), m.proj_b);

  EegForward out;
  out.embedding = emb;
  out.attention = g.value(alpha).data;
  return out;
}

NodeId music_forward_batch(Graph& g, const BoundModel& m, NodeId rows,
                           std::size_t n) {
  NodeId a = rows;
  const std::size_t layers = m.music_w.size();
  for (std::size_t l = 0; l + 1 < layers; ++l)
    a = g.tanh_op(
        g.add(g.matmul(a, m.music_w[l]), tile_rows(g, m.music_b[l], n)));
  return g.add(g.matmul(a, m.music_w[layers - 1]),
               tile_rows(g, m.music_b[layers - 1], n));
}

NodeId music_forward(Graph& g, const BoundModel& m, const double* e) {
  return music_forward_batch(g, m, g.leaf_row(e, m.dims.music_dim), 1);
}

NodeId classify(Graph& g, const BoundModel& m, NodeId embeddings) {
  const std::size_t n = g.value(embeddings).rows();
  return g.sigmoid(
      g.add(g.matmul(embeddings, m.cls_w), tile_rows(g, m.cls_b, n)));
}

NodeId discriminate(Graph& g, const BoundModel& m, NodeId embeddings,
                    double lambda) {
  const std::size_t n = g.value(embeddings).rows();
  NodeId z = g.grl(embeddings, lambda);
  NodeId h = g.tanh_op(
      g.add(g.matmul(z, m.disc_w1), tile_rows(g, m.disc_b1, n)));
  return g.sigmoid(
      g.add(g.matmul(h, m.disc_w2), tile_rows(g, m.disc_b2, n)));
}

}  // namespace cmaf::model
