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

#include "cmaf/tensor.hpp"

#include <cmath>
#include <sstream>

#include "cmaf/error.hpp"

namespace cmaf::ad {

Tensor::Tensor(std::vector<std::size_t> s, double fill) : shape(std::move(s)) {
  std::size_t n = 1;
  for (std::size_t d : shape) {
    check(d > 0, "tensor dimensions must be positive, got ", shape_str());
    n *= d;
  }
  data.assign(n, fill);
}

Tensor Tensor::scalar(double v) {
  Tensor t(std::vector<std::size_t>{1});
  t.data[0] = v;
  return t;
}

Tensor Tensor::vec(std::vector<double> v) {
  Tensor t;
  t.shape = {v.size()};
  t.data = std::move(v);
  return t;
}

Tensor Tensor::row(std::vector<double> v) {
  Tensor t;
  t.shape = {1, v.size()};
  t.data = std::move(v);
  return t;
}

Tensor Tensor::matrix(std::size_t r, std::size_t c, double fill) {
  return Tensor(std::vector<std::size_t>{r, c}, fill);
}

bool Tensor::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

}  // namespace cmaf::ad
