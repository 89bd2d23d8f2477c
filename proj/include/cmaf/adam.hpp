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

#ifndef CMAF_ADAM_HPP_
#define CMAF_ADAM_HPP_

#include <cstdint>
#include <vector>

#include "cmaf/tensor.hpp"

namespace cmaf::ad {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment buffers for one parameter tensor.
struct AdamState {
  Tensor first_moment;
  Tensor second_moment;
  std::int64_t step_count = 0;

  void init(const Tensor& param);
};

// One bias-corrected Adam update in place. Throws on NaN/Inf gradients with
// the offending index in the message.
void adam_step(Tensor& param, const Tensor& grad, AdamState& state, double lr,
               const AdamConfig& cfg = {});

// Convenience wrapper over a fixed parameter list.
class AdamOptimizer {
 public:
  AdamOptimizer(std::vector<Tensor*> params, double lr, AdamConfig cfg = {});

  // grads parallel to the constructor's parameter list.
  void step(const std::vector<Tensor>& grads);

  double learning_rate() const { return lr_; }
  std::int64_t steps_taken() const;

 private:
  std::vector<Tensor*> params_;
  std::vector<AdamState> states_;
  double lr_;
  AdamConfig cfg_;
};

}  // namespace cmaf::ad

#endif  // CMAF_ADAM_HPP_
