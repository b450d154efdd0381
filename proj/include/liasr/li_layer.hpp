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

#ifndef LIASR_LI_LAYER_HPP_
#define LIASR_LI_LAYER_HPP_

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include "liasr/linalg.hpp"
#include "liasr/rng.hpp"

namespace liasr {

// Lateral inhibition layer.
//
// Forward:   y = x (.) Theta(x * ZeroDiag(W) + b)
// where Theta is the Heaviside step, so each coordinate of the input either
// passes unchanged or is suppressed, based on a weighted vote of the *other*
// coordinates.  The hard gate is kept in the forward pass; the backward pass
// substitutes the derivative of a steepness-k sigmoid for Theta' (surrogate
// gradient learning).  The diagonal of W never contributes to any output.

struct LIParams {
  Matrix W;      // d x d inhibition weights; diagonal is inert
  Vector b;      // length-d bias
  double k = 10.0;  // surrogate steepness, > 0

  std::size_t dim() const { return b.size(); }
};

// Off-diagonal entries uniform in (-1/sqrt(d), +1/sqrt(d)), diagonal zeroed,
// zero bias: with b = 0 roughly half the gates are open at initialization.
inline LIParams make_li_params(std::size_t d, double k, Rng& rng) {
  if (k <= 0.0) throw std::invalid_argument("make_li_params: k must be > 0");
  LIParams p;
  p.W = Matrix(d, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      p.W(i, j) = (i == j) ? 0.0 : rng.uniform(-scale, scale);
    }
  }
  p.b = Vector(d, 0.0);
  p.k = k;
  return p;
}

struct LICache {
  Vector x;  // layer input
  Vector z;  // pre-activation x * ZeroDiag(W) + b
  Vector g;  // hard gate Theta(z), entries in {0, 1}
};

struct LIGrads {
  Matrix dW;  // diagonal forced to zero
  Vector db;
  Vector dx;
};

// Entry-wise Heaviside step: 1 for z > 0, 0 for z <= 0.
inline Vector heaviside(const Vector& z) {
  Vector g(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) g[i] = z[i] > 0.0 ? 1.0 : 0.0;
  return g;
}

// 1 / (1 + exp(-k z)), saturating cleanly for large |k z|.
inline double surrogate_sigmoid(double z, double k) {
  const double a = k * z;
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

// d/dz of the surrogate: k * sigma_k(z) * sigma_k(-z).
inline double surrogate_sigmoid_deriv(double z, double k) {
  return k * surrogate_sigmoid(z, k) * surrogate_sigmoid(-z, k);
}

namespace detail {

// z = x * ZeroDiag(W) + b computed without touching W's diagonal, so that
// arbitrary diagonal values are bitwise inert.
inline Vector li_preactivation(const Vector& x, const LIParams& p) {
  const std::size_t d = p.dim();
  if (p.W.rows != d || p.W.cols != d) {
    throw std::invalid_argument("li: W must be " + std::to_string(d) + "x" +
                                std::to_string(d));
  }
  if (x.size() != d) {
    throw std::invalid_argument("li: input length " + std::to_string(x.size()) +
                                " does not match layer dimension " +
                                std::to_string(d));
  }
  Vector z = p.b;
  for (std::size_t i = 0; i < d; ++i) {
    const double xi = x[i];
    for (std::size_t j = 0; j < d; ++j) {
      if (j == i) continue;
      z[j] += xi * p.W(i, j);
    }
  }
  return z;
}

}  // namespace detail

// Hard-gated forward pass.  Every output coordinate is exactly 0 or exactly
// the corresponding input coordinate.
inline std::pair<Vector, LICache> li_forward(const Vector& x,
                                             const LIParams& p) {
  LICache cache;
  cache.x = x;
  cache.z = detail::li_preactivation(x, p);
  cache.g = heaviside(cache.z);
  Vector y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = cache.g[i] > 0.5 ? x[i] : 0.0;
  }
  return {std::move(y), std::move(cache)};
}

// Fully differentiable variant with the gate relaxed to sigma_k: used to
// verify the chain-rule machinery against finite differences.
inline Vector li_relaxed_forward(const Vector& x, const LIParams& p) {
  const Vector z = detail::li_preactivation(x, p);
  Vector y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = x[i] * surrogate_sigmoid(z[i], p.k);
  }
  return y;
}

// Which gate value multiplies the direct path dy -> dx.
enum class GatePath {
  kHard,     // the Heaviside gate actually used in the forward pass
  kRelaxed,  // sigma_k(z); makes the backward the exact gradient of
             // li_relaxed_forward
};

inline LIGrads li_backward(const LICache& cache, const LIParams& p,
                           const Vector& dy,
                           GatePath path = GatePath::kHard) {
  const std::size_t d = p.dim();
  if (cache.x.size() != d || cache.z.size() != d || cache.g.size() != d ||
      dy.size() != d) {
    throw std::invalid_argument("li_backward: shape mismatch");
  }
  // s carries the surrogate derivative through the gate.
  Vector s(d);
  for (std::size_t j = 0; j < d; ++j) {
    s[j] = dy[j] * cache.x[j] * surrogate_sigmoid_deriv(cache.z[j], p.k);
  }

  LIGrads grads;
  grads.db = s;
  grads.dW = Matrix(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (j == i) continue;
      grads.dW(i, j) = cache.x[i] * s[j];
    }
  }
  grads.dx = Vector(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const double gate = path == GatePath::kHard
                            ? cache.g[i]
                            : surrogate_sigmoid(cache.z[i], p.k);
    double acc = dy[i] * gate;
    for (std::size_t j = 0; j < d; ++j) {
      if (j == i) continue;
      acc += s[j] * p.W(i, j);
    }
    grads.dx[i] = acc;
  }
  return grads;
}

}  // namespace liasr

#endif  // LIASR_LI_LAYER_HPP_
