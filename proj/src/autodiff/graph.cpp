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

#include "cmaf/graph.hpp"

#include <algorithm>
#include <cmath>

#include "cmaf/error.hpp"
#include "cmaf/kernels.hpp"

namespace cmaf::ad {

namespace {
const kernels::KernelTable& K() { return kernels::active(); }

void assign_shape(Tensor& t, std::size_t d0) {
  t.shape.assign({d0});
  t.data.resize(d0);
}

void assign_shape(Tensor& t, std::size_t d0, std::size_t d1) {
  t.shape.assign({d0, d1});
  t.data.resize(d0 * d1);
}
}  // namespace

const char* op_name(Op op) {
  switch (op) {
    case Op::kLeaf: return "leaf";
    case Op::kAdd: return "add";
    case Op::kMul: return "mul";
    case Op::kMatmul: return "matmul";
    case Op::kConcat: return "concat";
    case Op::kSlice: return "slice";
    case Op::kMean: return "mean";
    case Op::kTanh: return "tanh";
    case Op::kSigmoid: return "sigmoid";
    case Op::kSoftmax: return "softmax";
    case Op::kBce: return "bce";
    case Op::kGrl: return "grl";
  }
  return "?";
}

NodeId Graph::alloc(Op op, NodeId in0, NodeId in1) {
  if (live_ == nodes_.size()) nodes_.emplace_back();
  Node& n = nodes_[live_];
  n.op = op;
  n.in0 = in0;
  n.in1 = in1;
  n.extra.clear();
  n.grad.data.clear();  // keeps capacity for the next sweep
  n.grad.shape.clear();
  n.requires_grad = false;
  n.aux = 0.0;
  n.offset = 0;
  return static_cast<NodeId>(live_++);
}

NodeId Graph::leaf(const Tensor& value, bool requires_grad) {
  NodeId id = alloc(Op::kLeaf);
  Node& n = nodes_[id];
  n.value.shape = value.shape;
  n.value.data = value.data;
  n.requires_grad = requires_grad;
  return id;
}

NodeId Graph::leaf_row(const double* data, std::size_t count) {
  NodeId id = alloc(Op::kLeaf);
  Node& n = nodes_[id];
  assign_shape(n.value, 1, count);
  std::copy(data, data + count, n.value.data.begin());
  return id;
}

NodeId Graph::leaf_rows(const double* data, std::size_t r, std::size_t c) {
  NodeId id = alloc(Op::kLeaf);
  Node& n = nodes_[id];
  assign_shape(n.value, r, c);
  std::copy(data, data + r * c, n.value.data.begin());
  return id;
}

NodeId Graph::constant(double v) {
  NodeId id = alloc(Op::kLeaf);
  Node& n = nodes_[id];
  assign_shape(n.value, 1);
  n.value.data[0] = v;
  return id;
}

NodeId Graph::add(NodeId a, NodeId b) {
  if (!nodes_[a].value.same_shape(nodes_[b].value)) {
    fail("add: shape mismatch ", nodes_[a].value.shape_str(), " vs ",
         nodes_[b].value.shape_str());
  }
  NodeId id = alloc(Op::kAdd, a, b);
  Node& n = nodes_[id];
  const Tensor& ta = nodes_[a].value;
  const Tensor& tb = nodes_[b].value;
  n.requires_grad = nodes_[a].requires_grad || nodes_[b].requires_grad;
  n.value.shape = ta.shape;
  n.value.data.resize(ta.numel());
  K().vadd(ta.data.data(), tb.data.data(), n.value.data.data(), ta.numel());
  return id;
}

NodeId Graph::mul(NodeId a, NodeId b) {
  if (!nodes_[a].value.same_shape(nodes_[b].value)) {
    fail("mul: shape mismatch ", nodes_[a].value.shape_str(), " vs ",
         nodes_[b].value.shape_str());
  }
  NodeId id = alloc(Op::kMul, a, b);
  Node& n = nodes_[id];
  const Tensor& ta = nodes_[a].value;
  const Tensor& tb = nodes_[b].value;
  n.requires_grad = nodes_[a].requires_grad || nodes_[b].requires_grad;
  n.value.shape = ta.shape;
  n.value.data.resize(ta.numel());
  K().vmul(ta.data.data(), tb.data.data(), n.value.data.data(), ta.numel());
  return id;
}

NodeId Graph::matmul(NodeId a, NodeId b) {
  {
    const Tensor& ta = nodes_[a].value;
    const Tensor& tb = nodes_[b].value;
    if (ta.rank() < 1 || ta.rank() > 2 || tb.rank() != 2) {
      fail("matmul: unsupported operand ranks ", ta.shape_str(), " vs ",
           tb.shape_str());
    }
    if (ta.cols() != tb.shape[0]) {
      fail("matmul: inner dimensions differ ", ta.shape_str(), " vs ",
           tb.shape_str());
    }
  }
  NodeId id = alloc(Op::kMatmul, a, b);
  Node& n = nodes_[id];
  const Tensor& ta = nodes_[a].value;
  const Tensor& tb = nodes_[b].value;
  n.requires_grad = nodes_[a].requires_grad || nodes_[b].requires_grad;
  assign_shape(n.value, ta.rows(), tb.shape[1]);
  K().mm_nn(ta.data.data(), tb.data.data(), n.value.data.data(), ta.rows(),
            ta.cols(), tb.shape[1]);
  return id;
}

NodeId Graph::concat(const std::vector<NodeId>& inputs) {
  check(!inputs.empty(), "concat: no inputs");
  const std::size_t rank = nodes_[inputs[0]].value.rank();
  const std::size_t cols =
      rank == 2 ? nodes_[inputs[0]].value.shape[1] : std::size_t{1};
  std::size_t lead = 0;
  bool any_grad = false;
  for (NodeId src : inputs) {
    const Tensor& t = nodes_[src].value;
    if (t.rank() != rank || (rank == 2 && t.shape[1] != cols)) {
      fail("concat: incompatible shapes ", nodes_[inputs[0]].value.shape_str(),
           " vs ", t.shape_str());
    }
    lead += t.shape[0];
    any_grad = any_grad || nodes_[src].requires_grad;
  }
  NodeId id = alloc(Op::kConcat);
  Node& n = nodes_[id];
  n.extra = inputs;
  n.requires_grad = any_grad;
  if (rank == 2) {
    assign_shape(n.value, lead, cols);
  } else {
    assign_shape(n.value, lead);
  }
  double* out = n.value.data.data();
  for (NodeId src : inputs) {
    const auto& d = nodes_[src].value.data;
    out = std::copy(d.begin(), d.end(), out);
  }
  return id;
}

NodeId Graph::slice(NodeId a, std::size_t offset, std::size_t count) {
  if (count < 1 || offset + count > nodes_[a].value.numel()) {
    fail("slice: window [", offset, ", ", offset + count,
         ") outside tensor of ", nodes_[a].value.numel(), " values");
  }
  NodeId id = alloc(Op::kSlice, a);
  Node& n = nodes_[id];
  n.offset = offset;
  n.requires_grad = nodes_[a].requires_grad;
  assign_shape(n.value, 1, count);
  const double* src = nodes_[a].value.data.data() + offset;
  std::copy(src, src + count, n.value.data.begin());
  return id;
}

NodeId Graph::mean(NodeId a) {
  NodeId id = alloc(Op::kMean, a);
  Node& n = nodes_[id];
  const Tensor& ta = nodes_[a].value;
  n.requires_grad = nodes_[a].requires_grad;
  assign_shape(n.value, 1);
  n.value.data[0] =
      K().vsum(ta.data.data(), ta.numel()) / static_cast<double>(ta.numel());
  return id;
}

NodeId Graph::tanh_op(NodeId a) {
  NodeId id = alloc(Op::kTanh, a);
  Node& n = nodes_[id];
  const Tensor& ta = nodes_[a].value;
  n.requires_grad = nodes_[a].requires_grad;
  n.value.shape = ta.shape;
  n.value.data.resize(ta.numel());
  for (std::size_t i = 0; i < ta.numel(); ++i)
    n.value.data[i] = std::tanh(ta.data[i]);
  return id;
}

NodeId Graph::sigmoid(NodeId a) {
  NodeId id = alloc(Op::kSigmoid, a);
  Node& n = nodes_[id];
  const Tensor& ta = nodes_[a].value;
  n.requires_grad = nodes_[a].requires_grad;
  n.value.shape = ta.shape;
  n.value.data.resize(ta.numel());
  for (std::size_t i = 0; i < ta.numel(); ++i)
    n.value.data[i] = 1.0 / (1.0 + std::exp(-ta.data[i]));
  return id;
}

NodeId Graph::softmax(NodeId a) {
  check(nodes_[a].value.rank() <= 2, "softmax: rank-1 or rank-2 input required, got ",
        nodes_[a].value.shape_str());
  NodeId id = alloc(Op::kSoftmax, a);
  Node& n = nodes_[id];
  const Tensor& ta = nodes_[a].value;
  n.requires_grad = nodes_[a].requires_grad;
  n.value.shape = ta.shape;
  n.value.data.resize(ta.numel());
  const std::size_t rows = ta.rows(), cols = ta.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = ta.data.data() + r * cols;
    double* out = n.value.data.data() + r * cols;
    double mx = in[0];
    for (std::size_t c = 1; c < cols; ++c) mx = std::max(mx, in[c]);
    double sum = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      out[c] = std::exp(in[c] - mx);
      sum += out[c];
    }
    for (std::size_t c = 0; c < cols; ++c) out[c] /= sum;
  }
  return id;
}

NodeId Graph::bce(NodeId p, NodeId y, NodeId weights) {
  {
    const Tensor& tp = nodes_[p].value;
    const Tensor& ty = nodes_[y].value;
    check(tp.same_shape(ty), "bce: shape mismatch ", tp.shape_str(), " vs ",
          ty.shape_str());
    check(!nodes_[y].requires_grad, "bce: labels must not require gradients");
    if (weights >= 0) {
      check(nodes_[weights].value.same_shape(tp), "bce: weights shape mismatch ",
            nodes_[weights].value.shape_str(), " vs ", tp.shape_str());
      check(!nodes_[weights].requires_grad,
            "bce: weights must not require gradients");
    }
  }
  NodeId id = alloc(Op::kBce, p, y);
  Node& n = nodes_[id];
  if (weights >= 0) n.extra.push_back(weights);
  const Tensor& tp = nodes_[p].value;
  const Tensor& ty = nodes_[y].value;
  const double* w = weights >= 0 ? nodes_[weights].value.data.data() : nullptr;
  double wsum = 0.0;
  double loss = 0.0;
  for (std::size_t i = 0; i < tp.numel(); ++i) {
    const double pc = std::clamp(tp.data[i], kProbEps, 1.0 - kProbEps);
    const double li = -(ty.data[i] * std::log(pc) +
                        (1.0 - ty.data[i]) * std::log(1.0 - pc));
    const double wi = w != nullptr ? w[i] : 1.0;
    loss += wi * li;
    wsum += wi;
  }
  check(wsum > 0.0, "bce: total weight must be positive");
  n.requires_grad = nodes_[p].requires_grad;
  assign_shape(n.value, 1);
  n.value.data[0] = loss / wsum;
  return id;
}

NodeId Graph::grl(NodeId a, double lambda) {
  NodeId id = alloc(Op::kGrl, a);
  Node& n = nodes_[id];
  n.aux = lambda;
  n.requires_grad = nodes_[a].requires_grad;
  n.value.shape = nodes_[a].value.shape;
  n.value.data = nodes_[a].value.data;  // identity forward, bit for bit
  return id;
}

NodeId Graph::primitive(Op kind, const std::vector<NodeId>& inputs) {
  switch (kind) {
    case Op::kAdd:
      check(inputs.size() == 2, "add: expects 2 inputs");
      return add(inputs[0], inputs[1]);
    case Op::kMul:
      check(inputs.size() == 2, "mul: expects 2 inputs");
      return mul(inputs[0], inputs[1]);
    case Op::kMatmul:
      check(inputs.size() == 2, "matmul: expects 2 inputs");
      return matmul(inputs[0], inputs[1]);
    case Op::kConcat:
      return concat(inputs);
    case Op::kMean:
      check(inputs.size() == 1, "mean: expects 1 input");
      return mean(inputs[0]);
    case Op::kTanh:
      check(inputs.size() == 1, "tanh: expects 1 input");
      return tanh_op(inputs[0]);
    case Op::kSigmoid:
      check(inputs.size() == 1, "sigmoid: expects 1 input");
      return sigmoid(inputs[0]);
    case Op::kSoftmax:
      check(inputs.size() == 1, "softmax: expects 1 input");
      return softmax(inputs[0]);
    default:
      fail("primitive: ", op_name(kind), " is not a composable primitive");
  }
}

void Graph::ensure_grad(Node& n) {
  if (n.grad.data.empty()) {
    n.grad.shape = n.value.shape;
    n.grad.data.assign(n.value.numel(), 0.0);
  }
}

void Graph::accumulate(NodeId target, const double* g, std::size_t count) {
  Node& t = nodes_[target];
  if (!t.requires_grad) return;
  ensure_grad(t);
  K().axpy(1.0, g, t.grad.data.data(), count);
}

Tensor Graph::grad_of(NodeId id) const {
  const Node& n = nodes_[id];
  if (!n.grad.data.empty()) return n.grad;
  Tensor zero;
  zero.shape = n.value.shape;
  zero.data.assign(n.value.numel(), 0.0);
  return zero;
}

void Graph::backward(NodeId loss) {
  check(loss >= 0 && static_cast<std::size_t>(loss) < live_,
        "backward: invalid loss node");
  Node& ln = nodes_[loss];
  check(ln.value.is_scalar(), "backward: loss must be scalar, got shape ",
        ln.value.shape_str());
  ensure_grad(ln);
  ln.grad.data[0] = 1.0;

  std::vector<double> scratch;
  for (NodeId id = loss; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.grad.data.empty() || !n.requires_grad) continue;
    const double* g = n.grad.data.data();
    const std::size_t cnt = n.value.numel();
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kAdd:
        accumulate(n.in0, g, cnt);
        accumulate(n.in1, g, cnt);
        break;
      case Op::kMul: {
        scratch.resize(cnt);
        if (nodes_[n.in0].requires_grad) {
          K().vmul(g, nodes_[n.in1].value.data.data(), scratch.data(), cnt);
          accumulate(n.in0, scratch.data(), cnt);
        }
        if (nodes_[n.in1].requires_grad) {
          K().vmul(g, nodes_[n.in0].value.data.data(), scratch.data(), cnt);
          accumulate(n.in1, scratch.data(), cnt);
        }
        break;
      }
      case Op::kMatmul: {
        Node& na = nodes_[n.in0];
        Node& nb = nodes_[n.in1];
        const std::size_t m = na.value.rows();
        const std::size_t k = na.value.cols();
        const std::size_t nn = nb.value.shape[1];
        if (na.requires_grad) {
          ensure_grad(na);
          K().mm_nt_acc(g, nb.value.data.data(), na.grad.data.data(), m, nn, k);
        }
        if (nb.requires_grad) {
          ensure_grad(nb);
          K().mm_tn_acc(na.value.data.data(), g, nb.grad.data.data(), m, k, nn);
        }
        break;
      }
      case Op::kConcat: {
        std::size_t off = 0;
        for (NodeId src : n.extra) {
          const std::size_t sz = nodes_[src].value.numel();
          accumulate(src, g + off, sz);
          off += sz;
        }
        break;
      }
      case Op::kSlice: {
        Node& src = nodes_[n.in0];
        if (src.requires_grad) {
          ensure_grad(src);
          K().axpy(1.0, g, src.grad.data.data() + n.offset, cnt);
        }
        break;
      }
      case Op::kMean: {
        Node& src = nodes_[n.in0];
        if (src.requires_grad) {
          ensure_grad(src);
          const double gi = g[0] / static_cast<double>(src.value.numel());
          for (double& v : src.grad.data) v += gi;
        }
        break;
      }
      case Op::kTanh: {
        Node& src = nodes_[n.in0];
        if (src.requires_grad) {
          ensure_grad(src);
          for (std::size_t i = 0; i < cnt; ++i)
            src.grad.data[i] += g[i] * (1.0 - n.value.data[i] * n.value.data[i]);
        }
        break;
      }
      case Op::kSigmoid: {
        Node& src = nodes_[n.in0];
        if (src.requires_grad) {
          ensure_grad(src);
          for (std::size_t i = 0; i < cnt; ++i)
            src.grad.data[i] +=
                g[i] * n.value.data[i] * (1.0 - n.value.data[i]);
        }
        break;
      }
      case Op::kSoftmax: {
        Node& src = nodes_[n.in0];
        if (src.requires_grad) {
          ensure_grad(src);
          const std::size_t rows = n.value.rows(), cols = n.value.cols();
          for (std::size_t r = 0; r < rows; ++r) {
            const double* y = n.value.data.data() + r * cols;
            const double* gr = g + r * cols;
            double* dst = src.grad.data.data() + r * cols;
            const double dotgy = K().dot(gr, y, cols);
            for (std::size_t c = 0; c < cols; ++c)
              dst[c] += y[c] * (gr[c] - dotgy);
          }
        }
        break;
      }
      case Op::kBce: {
        Node& np = nodes_[n.in0];
        if (!np.requires_grad) break;
        ensure_grad(np);
        const Tensor& ty = nodes_[n.in1].value;
        const double* w =
            n.extra.empty() ? nullptr : nodes_[n.extra[0]].value.data.data();
        const std::size_t cntp = np.value.numel();
        double wsum = 0.0;
        if (w != nullptr) {
          for (std::size_t i = 0; i < cntp; ++i) wsum += w[i];
        } else {
          wsum = static_cast<double>(cntp);
        }
        const double g0 = g[0];
        for (std::size_t i = 0; i < cntp; ++i) {
          const double praw = np.value.data[i];
          // the clamp has zero subgradient outside [eps, 1-eps]
          if (praw < kProbEps || praw > 1.0 - kProbEps) continue;
          const double wi = w != nullptr ? w[i] : 1.0;
          np.grad.data[i] +=
              g0 * (wi / wsum) * (praw - ty.data[i]) / (praw * (1.0 - praw));
        }
        break;
      }
      case Op::kGrl: {
        Node& src = nodes_[n.in0];
        if (src.requires_grad && n.aux != 0.0) {
          ensure_grad(src);
          K().axpy(-n.aux, g, src.grad.data.data(), cnt);
        }
        break;
      }
    }
  }
}

}  // namespace cmaf::ad
