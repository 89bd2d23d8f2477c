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
// Tape-based reverse-mode autodiff. Records are appended during the forward
// pass and replayed in reverse by backward(). One Graph per model instance;
// no shared mutable state between graphs. rewind() keeps the node storage
// alive between mini-batches so steady-state training does not allocate.

#ifndef CMAF_GRAPH_HPP_
#define CMAF_GRAPH_HPP_

#include <cstdint>
#include <vector>

#include "cmaf/tensor.hpp"

namespace cmaf::ad {

using NodeId = std::int32_t;

enum class Op : std::uint8_t {
  kLeaf,
  kAdd,
  kMul,
  kMatmul,
  kConcat,
  kSlice,
  kMean,
  kTanh,
  kSigmoid,
  kSoftmax,
  kBce,
  kGrl,
};

const char* op_name(Op op);

struct Node {
  Op op = Op::kLeaf;
  NodeId in0 = -1;
  NodeId in1 = -1;
  std::vector<NodeId> extra;  // concat inputs; bce optional weights at [0]
  Tensor value;
  Tensor grad;  // empty until backward reaches the node
  bool requires_grad = false;
  double aux = 0.0;           // grl lambda
  std::size_t offset = 0;     // slice window
};

class Graph {
 public:
  Graph() { nodes_.reserve(1024); }

  // Leaves. Parameters pass requires_grad=true; data/labels false. `value`
  // must not alias a tensor owned by this graph (growing the tape may
  // relocate node storage).
  NodeId leaf(const Tensor& value, bool requires_grad = false);
  NodeId leaf_row(const double* data, std::size_t n);    // (1 x n), no grad
  NodeId leaf_rows(const double* data, std::size_t r, std::size_t c);
  NodeId constant(double v);                              // shape {1}, no grad

  // Elementwise ops require identical shapes (no broadcasting).
  NodeId add(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  // (m x k) * (k x n) -> (m x n). A rank-1 left operand {k} is promoted to
  // (1 x k); the result is then (1 x n). Right operand must be rank 2.
  NodeId matmul(NodeId a, NodeId b);
  // Concatenation along axis 0; inputs share rank and trailing dims. The
  // same node may appear several times (its gradient accumulates).
  NodeId concat(const std::vector<NodeId>& inputs);
  // Contiguous row-major window [offset, offset+count) as a (1 x count)
  // view copy. Reads a row of a matrix or a gate range of a fused
  // pre-activation; backward scatters into the window.
  NodeId slice(NodeId a, std::size_t offset, std::size_t count);
  // Mean over all elements -> scalar shape {1}.
  NodeId mean(NodeId a);
  NodeId tanh_op(NodeId a);
  NodeId sigmoid(NodeId a);
  // Row-wise softmax (a rank-1 tensor is one row).
  NodeId softmax(NodeId a);

  // Mean binary cross-entropy with probability clamp [kProbEps, 1-kProbEps].
  // y (and weights, when given) must not require gradients. With weights the
  // result is sum(w*l)/sum(w).
  NodeId bce(NodeId p, NodeId y, NodeId weights = -1);

  // Gradient reversal: identity forward; backward replaces the upstream
  // gradient g with -lambda*g. Training passes non-negative lambda; the op
  // accepts any real so backward linearity grad(-l) == -grad(l) is testable.
  NodeId grl(NodeId a, double lambda);

  // Dispatch helper for composing graphs generically (tests use this).
  NodeId primitive(Op kind, const std::vector<NodeId>& inputs);

  // Reverse sweep from a scalar loss. Each node is visited exactly once.
  // Gradients accumulate into every node with requires_grad on a path to
  // the loss; everything else stays detached (zero).
  void backward(NodeId loss);

  const Tensor& value(NodeId id) const { return nodes_[id].value; }
  // Zero tensor of the node's shape when the node is detached from the loss.
  Tensor grad_of(NodeId id) const;
  bool requires_grad(NodeId id) const { return nodes_[id].requires_grad; }

  std::size_t size() const { return live_; }
  // Reset the tape but keep node buffers for reuse by the next batch.
  void rewind() { live_ = 0; }
  void clear() {
    nodes_.clear();
    live_ = 0;
  }

  static constexpr double kProbEps = 1e-7;

 private:
  // Claims the next tape slot, reusing buffers left by a previous sweep.
  NodeId alloc(Op op, NodeId in0 = -1, NodeId in1 = -1);
  void ensure_grad(Node& n);
  void accumulate(NodeId target, const double* g, std::size_t n);

  std::vector<Node> nodes_;
  std::size_t live_ = 0;
};

}  // namespace cmaf::ad

#endif  // CMAF_GRAPH_HPP_
