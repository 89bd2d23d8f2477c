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

#ifndef CMAF_TENSOR_HPP_
#define CMAF_TENSOR_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace cmaf::ad {

// Dense row-major tensor of doubles. Rank 1 or 2 in practice; matmul and
// softmax require rank 2, elementwise ops only require matching shapes.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s, double fill = 0.0);

  static Tensor scalar(double v);
  static Tensor vec(std::vector<double> v);                   // shape {n}
  static Tensor row(std::vector<double> v);                   // shape {1, n}
  static Tensor matrix(std::size_t r, std::size_t c, double fill = 0.0);

  std::size_t numel() const { return data.size(); }
  bool is_scalar() const { return data.size() == 1; }
  std::size_t rank() const { return shape.size(); }

  // 2-D accessors; rank-1 tensors are treated as a single row.
  std::size_t rows() const { return rank() == 2 ? shape[0] : 1; }
  std::size_t cols() const { return rank() == 2 ? shape[1] : (rank() == 1 ? shape[0] : 1); }
  double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  bool all_finite() const;
  std::string shape_str() const;  // e.g. "[3x4]"
};

}  // namespace cmaf::ad

#endif  // CMAF_TENSOR_HPP_
