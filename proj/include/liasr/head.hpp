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

#ifndef LIASR_HEAD_HPP_
#define LIASR_HEAD_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "liasr/alphabet.hpp"
#include "liasr/li_layer.hpp"
#include "liasr/linalg.hpp"
#include "liasr/optim.hpp"
#include "liasr/rng.hpp"

namespace liasr {

// Per-frame recognition head: embedding -> (optional lateral inhibition) ->
// dense projection -> log-probabilities over the alphabet.

struct DenseParams {
  Matrix P;  // d x V
  Vector c;  // length V
};

enum class HeadKind { kFF, kLI };

inline const char* head_kind_name(HeadKind kind) {
  return kind == HeadKind::kFF ? "ff" : "li";
}

struct AcousticHead {
  HeadKind kind = HeadKind::kFF;
  std::optional<LIParams> li;  // engaged iff kind == kLI
  DenseParams dense;

  std::size_t dim() const { return dense.P.rows; }
  std::size_t vocab() const { return dense.P.cols; }

  void validate() const {
    if (dense.c.size() != dense.P.cols) {
      throw std::invalid_argument("AcousticHead: dense bias length mismatch");
    }
    if ((kind == HeadKind::kLI) != li.has_value()) {
      throw std::invalid_argument(
          "AcousticHead: li params must be present exactly for the LI kind");
    }
    if (li && li->dim() != dense.P.rows) {
      throw std::invalid_argument(
          "AcousticHead: li dimension does not match dense input dimension");
    }
  }
};

// Dense entries uniform in (-1/sqrt(d), +1/sqrt(d)), zero bias.
inline DenseParams make_dense_params(std::size_t d, std::size_t v, Rng& rng) {
  DenseParams p;
  p.P = Matrix(d, v);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (double& w : p.P.data) w = rng.uniform(-scale, scale);
  p.c = Vector(v, 0.0);
  return p;
}

inline AcousticHead make_head(HeadKind kind, std::size_t d, std::size_t v,
                              double k, Rng& rng) {
  AcousticHead head;
  head.kind = kind;
  if (kind == HeadKind::kLI) head.li = make_li_params(d, k, rng);
  head.dense = make_dense_params(d, v, rng);
  head.validate();
  return head;
}

// Shift-by-max log-softmax; exp of the output sums to 1.
inline Vector log_softmax(const Vector& logits) {
  if (logits.empty()) throw std::invalid_argument("log_softmax: empty input");
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double a : logits) sum += std::exp(a - mx);
  const double lse = mx + std::log(sum);
  Vector out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

struct HeadCache {
  std::vector<LICache> li;  // one per frame; empty for the FF head
  Matrix h;                 // T x d dense-layer inputs (post-gate)
  Matrix log_probs;         // T x V
};

// Gradients for every trainable tensor of the head.  dW/db are empty for the
// FF kind.  The tensor order matches trainable_params().
struct HeadGrads {
  Matrix dW;
  Vector db;
  Matrix dP;
  Vector dc;
};

// Canonical trainable tensor order: [W, b,] P, c.  Biases (b, c) are exempt
// from weight decay.
inline std::vector<ParamSlot> trainable_params(AcousticHead& head) {
  std::vector<ParamSlot> slots;
  if (head.kind == HeadKind::kLI) {
    slots.push_back({&head.li->W.data, true});
    slots.push_back({&head.li->b, false});
  }
  slots.push_back({&head.dense.P.data, true});
  slots.push_back({&head.dense.c, false});
  return slots;
}

inline GradSet grads_as_set(HeadGrads&& g, HeadKind kind) {
  GradSet set;
  if (kind == HeadKind::kLI) {
    set.push_back(std::move(g.dW.data));
    set.push_back(std::move(g.db));
  }
  set.push_back(std::move(g.dP.data));
  set.push_back(std::move(g.dc));
  return set;
}

inline std::pair<Matrix, HeadCache> head_forward(
    const Matrix& frames, const AcousticHead& head,
    GatePath path = GatePath::kHard) {
  head.validate();
  if (frames.rows < 1) {
    throw std::invalid_argument("head_forward: need at least one frame");
  }
  if (frames.cols != head.dim()) {
    throw std::invalid_argument("head_forward: frame dimension mismatch");
  }
  const std::size_t T = frames.rows;
  const std::size_t d = head.dim();
  const std::size_t V = head.vocab();

  HeadCache cache;
  cache.h = Matrix(T, d);
  cache.log_probs = Matrix(T, V);
  if (head.kind == HeadKind::kLI) cache.li.reserve(T);

  Matrix log_probs(T, V);
  for (std::size_t t = 0; t < T; ++t) {
    Vector x = frames.row(t);
    Vector h;
    if (head.kind == HeadKind::kLI) {
      auto [y, li_cache] = li_forward(x, *head.li);
      if (path == GatePath::kRelaxed) {
        for (std::size_t i = 0; i < d; ++i) {
          y[i] = x[i] * surrogate_sigmoid(li_cache.z[i], head.li->k);
        }
      }
      cache.li.push_back(std::move(li_cache));
      h = std::move(y);
    } else {
      h = std::move(x);
    }
    Vector logits = matvec(head.dense.P, h);
    for (std::size_t v = 0; v < V; ++v) logits[v] += head.dense.c[v];
    Vector lp = log_softmax(logits);
    for (std::size_t i = 0; i < d; ++i) cache.h(t, i) = h[i];
    for (std::size_t v = 0; v < V; ++v) {
      cache.log_probs(t, v) = lp[v];
      log_probs(t, v) = lp[v];
    }
  }
  return {std::move(log_probs), std::move(cache)};
}

// Chain rule through log-softmax, the dense projection and (for the LI kind)
// the inhibition layer, accumulated over frames.
inline HeadGrads head_backward(const HeadCache& cache, const AcousticHead& head,
                               const Matrix& dlog_probs,
                               GatePath path = GatePath::kHard) {
  head.validate();
  const std::size_t T = cache.log_probs.rows;
  const std::size_t d = head.dim();
  const std::size_t V = head.vocab();
  if (dlog_probs.rows != T || dlog_probs.cols != V) {
    throw std::invalid_argument("head_backward: upstream gradient shape mismatch");
  }
  if (head.kind == HeadKind::kLI && cache.li.size() != T) {
    throw std::invalid_argument("head_backward: cache does not match forward");
  }

  HeadGrads grads;
  grads.dP = Matrix(d, V, 0.0);
  grads.dc = Vector(V, 0.0);
  if (head.kind == HeadKind::kLI) {
    grads.dW = Matrix(d, d, 0.0);
    grads.db = Vector(d, 0.0);
  }

  Vector da(V);
  for (std::size_t t = 0; t < T; ++t) {
    double usum = 0.0;
    for (std::size_t v = 0; v < V; ++v) usum += dlog_probs(t, v);
    for (std::size_t v = 0; v < V; ++v) {
      da[v] = dlog_probs(t, v) - std::exp(cache.log_probs(t, v)) * usum;
    }
    for (std::size_t v = 0; v < V; ++v) grads.dc[v] += da[v];
    Vector dh(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      const double hi = cache.h(t, i);
      double acc = 0.0;
      for (std::size_t v = 0; v < V; ++v) {
        grads.dP(i, v) += hi * da[v];
        acc += head.dense.P(i, v) * da[v];
      }
      dh[i] = acc;
    }
    if (head.kind == HeadKind::kLI) {
      LIGrads li = li_backward(cache.li[t], *head.li, dh, path);
      for (std::size_t i = 0; i < d * d; ++i) grads.dW.data[i] += li.dW.data[i];
      for (std::size_t i = 0; i < d; ++i) grads.db[i] += li.db[i];
    }
  }
  return grads;
}

}  // namespace liasr

#endif  // LIASR_HEAD_HPP_
