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

#ifndef LIASR_CTC_HPP_
#define LIASR_CTC_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "liasr/alphabet.hpp"
#include "liasr/linalg.hpp"
#include "liasr/ngram_lm.hpp"

namespace liasr {

// Connectionist temporal classification: the loss marginalizes over every
// frame-to-label alignment via a forward-backward recursion over the
// blank-augmented label sequence, entirely in log space.

using LabelSeq = std::vector<std::size_t>;  // character ids, never blank

// Target cannot be aligned within the given number of frames.
struct InfeasibleTarget : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CtcResult {
  double loss = 0.0;
  Matrix grad;  // d loss / d log_probs, same shape as the input
};

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

inline double log_add(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

namespace detail {

inline void validate_ctc_inputs(const Matrix& log_probs,
                                const LabelSeq& target) {
  if (log_probs.rows < 1) {
    throw std::invalid_argument("ctc: need at least one frame");
  }
  if (log_probs.cols < 2) {
    throw std::invalid_argument("ctc: need blank plus at least one label");
  }
  for (std::size_t id : target) {
    if (id == 0 || id >= log_probs.cols) {
      throw std::invalid_argument("ctc: target id " + std::to_string(id) +
                                  " out of range");
    }
  }
  std::size_t repeats = 0;
  for (std::size_t i = 1; i < target.size(); ++i) {
    if (target[i] == target[i - 1]) ++repeats;
  }
  if (log_probs.rows < target.size() + repeats) {
    throw InfeasibleTarget("ctc: target of length " +
                           std::to_string(target.size()) + " with " +
                           std::to_string(repeats) +
                           " repeats cannot fit in " +
                           std::to_string(log_probs.rows) + " frames");
  }
}

}  // namespace detail

inline CtcResult ctc_loss(const Matrix& log_probs, const LabelSeq& target) {
  detail::validate_ctc_inputs(log_probs, target);
  const std::size_t T = log_probs.rows;
  const std::size_t L = target.size();
  const std::size_t S = 2 * L + 1;

  // Extended sequence: blank, l1, blank, l2, ..., lL, blank.
  std::vector<std::size_t> ext(S, Alphabet::kBlankId);
  for (std::size_t i = 0; i < L; ++i) ext[2 * i + 1] = target[i];

  // A jump s-2 -> s is allowed when ext[s] is a label differing from ext[s-2].
  std::vector<bool> can_skip(S, false);
  for (std::size_t s = 2; s < S; ++s) {
    can_skip[s] = ext[s] != Alphabet::kBlankId && ext[s] != ext[s - 2];
  }

  Matrix alpha(T, S, kLogZero);
  alpha(0, 0) = log_probs(0, ext[0]);
  if (S > 1) alpha(0, 1) = log_probs(0, ext[1]);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      double acc = alpha(t - 1, s);
      if (s >= 1) acc = log_add(acc, alpha(t - 1, s - 1));
      if (s >= 2 && can_skip[s]) acc = log_add(acc, alpha(t - 1, s - 2));
      alpha(t, s) = acc == kLogZero ? kLogZero : acc + log_probs(t, ext[s]);
    }
  }
  double log_p = alpha(T - 1, S - 1);
  if (S > 1) log_p = log_add(log_p, alpha(T - 1, S - 2));
  if (log_p == kLogZero) {
    throw InfeasibleTarget("ctc: no valid alignment");
  }

  Matrix beta(T, S, kLogZero);
  beta(T - 1, S - 1) = log_probs(T - 1, ext[S - 1]);
  if (S > 1) beta(T - 1, S - 2) = log_probs(T - 1, ext[S - 2]);
  for (std::size_t t = T - 1; t-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double acc = beta(t + 1, s);
      if (s + 1 < S) acc = log_add(acc, beta(t + 1, s + 1));
      if (s + 2 < S && can_skip[s + 2]) acc = log_add(acc, beta(t + 1, s + 2));
      beta(t, s) = acc == kLogZero ? kLogZero : acc + log_probs(t, ext[s]);
    }
  }

  // alpha and beta both include the emission at t, so the posterior mass of
  // symbol v at frame t is sum_{s: ext s = v} exp(alpha + beta - lp) / P.
  CtcResult result;
  result.loss = -log_p;
  result.grad = Matrix(T, log_probs.cols, 0.0);
  std::vector<double> acc(log_probs.cols);
  for (std::size_t t = 0; t < T; ++t) {
    std::fill(acc.begin(), acc.end(), kLogZero);
    for (std::size_t s = 0; s < S; ++s) {
      const double ab = alpha(t, s) == kLogZero || beta(t, s) == kLogZero
                            ? kLogZero
                            : alpha(t, s) + beta(t, s);
      acc[ext[s]] = log_add(acc[ext[s]], ab);
    }
    for (std::size_t v = 0; v < log_probs.cols; ++v) {
      if (acc[v] == kLogZero) continue;
      result.grad(t, v) = -std::exp(acc[v] - log_probs(t, v) - log_p);
    }
  }
  return result;
}

// Independent oracle: enumerate all V^T alignment paths, keep those that
// collapse to the target, and sum their probabilities.  Deliberately naive.
inline double ctc_brute_force(const Matrix& log_probs, const LabelSeq& target) {
  if (log_probs.rows > 8 || log_probs.cols > 5) {
    throw std::invalid_argument("ctc_brute_force: instance above T<=8, V<=5 guard");
  }
  for (std::size_t id : target) {
    if (id == 0 || id >= log_probs.cols) {
      throw std::invalid_argument("ctc_brute_force: target id out of range");
    }
  }
  const std::size_t T = log_probs.rows;
  const std::size_t V = log_probs.cols;
  std::vector<std::size_t> path(T, 0);
  double total = kLogZero;
  for (;;) {
    // Collapse: drop repeats, then blanks.
    LabelSeq collapsed;
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (std::size_t t = 0; t < T; ++t) {
      if (path[t] != prev && path[t] != Alphabet::kBlankId) {
        collapsed.push_back(path[t]);
      }
      prev = path[t];
    }
    if (collapsed == target) {
      double lp = 0.0;
      for (std::size_t t = 0; t < T; ++t) lp += log_probs(t, path[t]);
      total = log_add(total, lp);
    }
    // Next path in odometer order.
    std::size_t pos = 0;
    while (pos < T && ++path[pos] == V) {
      path[pos] = 0;
      ++pos;
    }
    if (pos == T) break;
  }
  if (total == kLogZero) {
    throw InfeasibleTarget("ctc_brute_force: no path collapses to target");
  }
  return -total;
}

// Best-path decoding: per-frame argmax (ties to the lowest index), collapse
// consecutive repeats, delete blanks.
inline std::string greedy_decode(const Matrix& log_probs,
                                 const Alphabet& alphabet) {
  if (log_probs.rows < 1) {
    throw std::invalid_argument("greedy_decode: need at least one frame");
  }
  std::string out;
  std::size_t prev = std::numeric_limits<std::size_t>::max();
  for (std::size_t t = 0; t < log_probs.rows; ++t) {
    std::size_t best = 0;
    for (std::size_t v = 1; v < log_probs.cols; ++v) {
      if (log_probs(t, v) > log_probs(t, best)) best = v;
    }
    if (best != prev && best != Alphabet::kBlankId) {
      out.push_back(alphabet.char_of(best));
    }
    prev = best;
  }
  return out;
}

// CTC prefix beam search with shallow fusion of a character LM.  Each prefix
// is ranked by  log p_ctc + alpha * log p_lm + beta * |prefix|;  with
// alpha = beta = 0 and a beam wide enough to never prune, the search returns
// the exact maximum-marginal labeling.
inline std::string beam_decode(const Matrix& log_probs,
                               const Alphabet& alphabet, const CharNGramLM& lm,
                               std::size_t beam_width, double alpha,
                               double beta) {
  if (beam_width < 1) {
    throw std::invalid_argument("beam_decode: beam_width must be >= 1");
  }
  if (alpha < 0.0 || beta < 0.0) {
    throw std::invalid_argument("beam_decode: alpha and beta must be >= 0");
  }
  if (log_probs.rows < 1) {
    throw std::invalid_argument("beam_decode: need at least one frame");
  }
  if (log_probs.cols != alphabet.size()) {
    throw std::invalid_argument("beam_decode: alphabet size mismatch");
  }
  const std::size_t T = log_probs.rows;
  const std::size_t V = log_probs.cols;

  struct Hyp {
    double p_b = kLogZero;   // log prob of paths ending in blank
    double p_nb = kLogZero;  // log prob of paths ending in the last char
    double lm = 0.0;         // accumulated LM log prob of the prefix
  };
  const auto total = [](const Hyp& h) { return log_add(h.p_b, h.p_nb); };
  const auto rank = [&](const Hyp& h, const std::string& prefix) {
    return total(h) + alpha * h.lm + beta * static_cast<double>(prefix.size());
  };

  std::map<std::string, Hyp> beams;
  beams[""] = Hyp{0.0, kLogZero, 0.0};

  for (std::size_t t = 0; t < T; ++t) {
    std::map<std::string, Hyp> next;
    for (const auto& [prefix, hyp] : beams) {
      // Blank keeps the prefix.
      {
        Hyp& nh = next[prefix];
        nh.lm = hyp.lm;
        nh.p_b = log_add(nh.p_b,
                         total(hyp) + log_probs(t, Alphabet::kBlankId));
      }
      for (std::size_t v = 1; v < V; ++v) {
        const char c = alphabet.char_of(v);
        const double lp = log_probs(t, v);
        if (!prefix.empty() && prefix.back() == c) {
          // Repeated symbol merges into the same prefix...
          {
            Hyp& nh = next[prefix];
            nh.lm = hyp.lm;
            nh.p_nb = log_add(nh.p_nb, hyp.p_nb + lp);
          }
          // ...unless a blank intervened, which starts a genuine repeat.
          if (hyp.p_b != kLogZero) {
            const std::string ext = prefix + c;
            Hyp& nh = next[ext];
            if (nh.p_b == kLogZero && nh.p_nb == kLogZero) {
              nh.lm = hyp.lm + (alpha != 0.0
                                    ? lm.continuation_log_prob(prefix, c)
                                    : 0.0);
            }
            nh.p_nb = log_add(nh.p_nb, hyp.p_b + lp);
          }
        } else {
          const std::string ext = prefix + c;
          Hyp& nh = next[ext];
          if (nh.p_b == kLogZero && nh.p_nb == kLogZero) {
            nh.lm = hyp.lm + (alpha != 0.0
                                  ? lm.continuation_log_prob(prefix, c)
                                  : 0.0);
          }
          nh.p_nb = log_add(nh.p_nb, total(hyp) + lp);
        }
      }
    }
    // Prune to the top beam_width prefixes by fused score.
    if (next.size() > beam_width) {
      std::vector<std::pair<double, const std::string*>> order;
      order.reserve(next.size());
      for (const auto& [prefix, hyp] : next) {
        order.emplace_back(rank(hyp, prefix), &prefix);
      }
      std::sort(order.begin(), order.end(),
                [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first > b.first;
                  return *a.second < *b.second;
                });
      std::map<std::string, Hyp> pruned;
      for (std::size_t i = 0; i < beam_width; ++i) {
        pruned.emplace(*order[i].second, next[*order[i].second]);
      }
      next = std::move(pruned);
    }
    beams = std::move(next);
  }

  const std::string* best = nullptr;
  double best_score = kLogZero;
  for (const auto& [prefix, hyp] : beams) {
    const double score = rank(hyp, prefix);
    if (best == nullptr || score > best_score ||
        (score == best_score && prefix < *best)) {
      best = &prefix;
      best_score = score;
    }
  }
  return best ? *best : std::string();
}

}  // namespace liasr

#endif  // LIASR_CTC_HPP_
