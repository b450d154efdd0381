// Copyright 2026 liasr Authors.
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

#ifndef LIASR_OPTIM_HPP_
#define LIASR_OPTIM_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "liasr/linalg.hpp"

namespace liasr {

// Adam with decoupled weight decay, global-norm gradient clipping and
// gradient accumulation.  Weight decay is added to the update, not to the
// gradient, and never touches parameters flagged as biases.
struct AdamConfig {
  double lr = 3e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 5e-3;
  double clip_norm = 2.0;
  std::size_t accumulation_steps = 8;
  std::size_t batch_size = 4;

  void validate() const {
    if (lr <= 0.0) throw std::invalid_argument("AdamConfig: lr must be > 0");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
      throw std::invalid_argument("AdamConfig: betas must lie in [0, 1)");
    }
    if (eps <= 0.0) throw std::invalid_argument("AdamConfig: eps must be > 0");
    if (clip_norm <= 0.0) {
      throw std::invalid_argument("AdamConfig: clip_norm must be > 0");
    }
    if (accumulation_steps < 1) {
      throw std::invalid_argument("AdamConfig: accumulation_steps must be >= 1");
    }
    if (batch_size < 1) {
      throw std::invalid_argument("AdamConfig: batch_size must be >= 1");
    }
  }
};

// One trainable tensor, viewed as a flat array, plus its decay eligibility.
struct ParamSlot {
  std::vector<double>* value = nullptr;
  bool apply_decay = true;
};

// A gradient set mirrors the slot list shape-for-shape.
using GradSet = std::vector<Vector>;

struct AdamState {
  std::uint64_t t = 0;
  std::vector<Vector> m;
  std::vector<Vector> v;

  static AdamState zeros_like(const std::vector<ParamSlot>& slots) {
    AdamState st;
    st.m.reserve(slots.size());
    st.v.reserve(slots.size());
    for (const auto& s : slots) {
      st.m.emplace_back(s.value->size(), 0.0);
      st.v.emplace_back(s.value->size(), 0.0);
    }
    return st;
  }
};

inline double global_norm(const GradSet& grads) {
  double sq = 0.0;
  for (const auto& g : grads) {
    for (double x : g) sq += x * x;
  }
  return std::sqrt(sq);
}

// Scales the whole gradient set by max_norm / ||g|| when the global L2 norm
// exceeds max_norm; otherwise leaves it untouched (including the zero set).
inline void clip_global_norm(GradSet& grads, double max_norm) {
  if (max_norm <= 0.0) {
    throw std::invalid_argument("clip_global_norm: max_norm must be > 0");
  }
  const double norm = global_norm(grads);
  if (norm <= max_norm) return;
  const double scale = max_norm / norm;
  for (auto& g : grads) {
    for (double& x : g) x *= scale;
  }
}

// One Adam step.  Expects gradients already clipped and averaged over the
// virtual batch.
inline void adam_step(const std::vector<ParamSlot>& params,
                      const GradSet& grads, AdamState& state,
                      const AdamConfig& cfg) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw std::invalid_argument("adam_step: tensor count mismatch");
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t p = 0; p < params.size(); ++p) {
    std::vector<double>& theta = *params[p].value;
    const Vector& g = grads[p];
    if (theta.size() != g.size() || state.m[p].size() != g.size()) {
      throw std::invalid_argument("adam_step: tensor shape mismatch");
    }
    const bool decay = params[p].apply_decay && cfg.weight_decay != 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double& m = state.m[p][i];
      double& v = state.v[p][i];
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * g[i];
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = m / bc1;
      const double vhat = v / bc2;
      const double prev = theta[i];
      theta[i] = prev - cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
      if (decay) theta[i] -= cfg.lr * cfg.weight_decay * prev;
    }
  }
}

// Running sum of gradient sets; finalize divides by the number of
// accumulation steps so the result is the mean over the virtual batch.
class GradAccumulator {
 public:
  void add(const GradSet& grads) {
    if (sum_.empty()) {
      sum_ = grads;
      return;
    }
    if (grads.size() != sum_.size()) {
      throw std::invalid_argument("GradAccumulator: tensor count mismatch");
    }
    for (std::size_t p = 0; p < grads.size(); ++p) {
      if (grads[p].size() != sum_[p].size()) {
        throw std::invalid_argument("GradAccumulator: tensor shape mismatch");
      }
      for (std::size_t i = 0; i < grads[p].size(); ++i) {
        sum_[p][i] += grads[p][i];
      }
    }
  }

  GradSet finalize(std::size_t accumulation_steps) const {
    if (accumulation_steps == 0) {
      throw std::invalid_argument("GradAccumulator: accumulation_steps must be >= 1");
    }
    GradSet mean = sum_;
    const double inv = 1.0 / static_cast<double>(accumulation_steps);
    for (auto& g : mean) {
      for (double& x : g) x *= inv;
    }
    return mean;
  }

  bool empty() const { return sum_.empty(); }
  void reset() { sum_.clear(); }

 private:
  GradSet sum_;
};

}  // namespace liasr

#endif  // LIASR_OPTIM_HPP_
