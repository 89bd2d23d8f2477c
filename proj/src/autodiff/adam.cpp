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

#include "cmaf/adam.hpp"

#include <cmath>

#include "cmaf/error.hpp"
#include "cmaf/kernels.hpp"

namespace cmaf::ad {

void AdamState::init(const Tensor& param) {
  first_moment.shape = param.shape;
  first_moment.data.assign(param.numel(), 0.0);
  second_moment = first_moment;
  step_count = 0;
}

void adam_step(Tensor& param, const Tensor& grad, AdamState& state, double lr,
               const AdamConfig& cfg) {
  check(param.same_shape(grad), "adam: parameter shape ", param.shape_str(),
        " does not match gradient shape ", grad.shape_str());
  if (state.step_count == 0 && state.first_moment.data.empty())
    state.init(param);
  check(state.first_moment.same_shape(param),
        "adam: moment shape ", state.first_moment.shape_str(),
        " does not match parameter shape ", param.shape_str());
  for (std::size_t i = 0; i < grad.numel(); ++i) {
    if (!std::isfinite(grad.data[i])) {
      fail("adam: non-finite gradient at index ", i, " (value ", grad.data[i],
           ", step ", state.step_count + 1, "); aborting training step");
    }
  }
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 / (1.0 - std::pow(cfg.beta1, t));
  const double c2 = 1.0 / (1.0 - std::pow(cfg.beta2, t));
  kernels::active().adam_update(param.data.data(), grad.data.data(),
                                state.first_moment.data.data(),
                                state.second_moment.data.data(), param.numel(),
                                lr, cfg.beta1, cfg.beta2, c1, c2, cfg.eps);
}

AdamOptimizer::AdamOptimizer(std::vector<Tensor*> params, double lr,
                             AdamConfig cfg)
    : params_(std::move(params)), lr_(lr), cfg_(cfg) {
  states_.resize(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) states_[i].init(*params_[i]);
}

void AdamOptimizer::step(const std::vector<Tensor>& grads) {
  check(grads.size() == params_.size(), "adam: expected ", params_.size(),
        " gradient tensors, got ", grads.size());
  for (std::size_t i = 0; i < params_.size(); ++i)
    adam_step(*params_[i], grads[i], states_[i], lr_, cfg_);
}

std::int64_t AdamOptimizer::steps_taken() const {
  return states_.empty() ? 0 : states_[0].step_count;
}

}  // namespace cmaf::ad
