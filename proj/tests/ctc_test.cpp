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

#include "liasr/ctc.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "liasr/alphabet.hpp"
#include "liasr/rng.hpp"
#include "test_util.hpp"

namespace liasr {
namespace {

using testing::central_diff;
using testing::rel_err;

Matrix log_probs_from_rows(
    std::initializer_list<std::initializer_list<double>> prob_rows) {
  const std::size_t t = prob_rows.size();
  const std::size_t v = prob_rows.begin()->size();
  Matrix m(t, v);
  std::size_t i = 0;
  for (const auto& row : prob_rows) {
    std::size_t j = 0;
    for (double p : row) m(i, j++) = std::log(p);
    ++i;
  }
  return m;
}

Matrix random_log_probs(std::size_t t, std::size_t v, Rng& rng) {
  Matrix m(t, v);
  for (std::size_t i = 0; i < t; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < v; ++j) {
      m(i, j) = rng.uniform(0.05, 1.0);
      sum += m(i, j);
    }
    for (std::size_t j = 0; j < v; ++j) m(i, j) = std::log(m(i, j) / sum);
  }
  return m;
}

// Random target that satisfies the CTC feasibility precondition.
LabelSeq random_feasible_target(std::size_t t, std::size_t v, std::size_t max_len,
                                Rng& rng) {
  for (;;) {
    const std::size_t len = rng.below(max_len + 1);
    LabelSeq target(len);
    for (auto& id : target) id = 1 + rng.below(v - 1);
    std::size_t repeats = 0;
    for (std::size_t i = 1; i < len; ++i) {
      if (target[i] == target[i - 1]) ++repeats;
    }
    if (len + repeats <= t) return target;
  }
}

// Exact marginal probability of every collapsed labeling, by enumerating all
// V^T paths.
std::map<std::string, double> exact_prefix_marginals(const Matrix& log_probs,
                                                     const Alphabet& alphabet) {
  const std::size_t t_max = log_probs.rows;
  const std::size_t v_max = log_probs.cols;
  std::map<std::string, double> out;
  std::vector<std::size_t> path(t_max, 0);
  for (;;) {
    double lp = 0.0;
    for (std::size_t t = 0; t < t_max; ++t) lp += log_probs(t, path[t]);
    std::string collapsed;
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (std::size_t t = 0; t < t_max; ++t) {
      if (path[t] != prev && path[t] != Alphabet::kBlankId) {
        collapsed.push_back(alphabet.char_of(path[t]));
      }
      prev = path[t];
    }
    out[collapsed] += std::exp(lp);

    std::size_t pos = 0;
    while (pos < t_max && ++path[pos] == v_max) path[pos++] = 0;
    if (pos == t_max) break;
  }
  return out;
}

TEST(Ctc, SinglePathExample) {
  const Matrix lp = log_probs_from_rows({{0.6, 0.4}});
  const CtcResult res = ctc_loss(lp, {1});
  EXPECT_NEAR(res.loss, -std::log(0.4), 1e-12);
  EXPECT_NEAR(ctc_brute_force(lp, {1}), res.loss, 1e-12);
}

TEST(Ctc, TwoFrameUniformExample) {
  const Matrix lp = log_probs_from_rows({{0.5, 0.5}, {0.5, 0.5}});
  const CtcResult res = ctc_loss(lp, {1});
  EXPECT_NEAR(res.loss, -std::log(0.75), 1e-12);
  EXPECT_NEAR(ctc_brute_force(lp, {1}), res.loss, 1e-12);
}

TEST(Ctc, EmptyTargetIsAllBlankPath) {
  Rng rng(101);
  const Matrix lp = random_log_probs(4, 3, rng);
  const CtcResult res = ctc_loss(lp, {});
  double want = 0.0;
  for (std::size_t t = 0; t < 4; ++t) want -= lp(t, Alphabet::kBlankId);
  EXPECT_NEAR(res.loss, want, 1e-12);
}

TEST(Ctc, InfeasibleTargetRejected) {
  const Matrix lp = log_probs_from_rows({{0.5, 0.5}, {0.5, 0.5}});
  EXPECT_THROW(ctc_loss(lp, {1, 1, 1}), InfeasibleTarget);
  EXPECT_THROW(ctc_brute_force(lp, {1, 1, 1}), InfeasibleTarget);
  // Adjacent repeats need a separating blank: "aa" needs 3 frames.
  EXPECT_THROW(ctc_loss(lp, {1, 1}), InfeasibleTarget);
}

TEST(Ctc, RejectsBlankAndOutOfRangeIds) {
  const Matrix lp = log_probs_from_rows({{0.5, 0.5}});
  EXPECT_THROW(ctc_loss(lp, {0}), std::invalid_argument);
  EXPECT_THROW(ctc_loss(lp, {2}), std::invalid_argument);
}

TEST(Ctc, BruteForceGuardRejectsLargeInstances) {
  Rng rng(103);
  EXPECT_THROW(ctc_brute_force(random_log_probs(9, 3, rng), {1}),
               std::invalid_argument);
  EXPECT_THROW(ctc_brute_force(random_log_probs(4, 6, rng), {1}),
               std::invalid_argument);
}

// Oracle equivalence on 200 random feasible instances.
TEST(Ctc, LossMatchesBruteForceOracle) {
  Rng rng(107);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t t = 1 + rng.below(6);
    const std::size_t v = 2 + rng.below(3);
    const Matrix lp = random_log_probs(t, v, rng);
    const LabelSeq target = random_feasible_target(t, v, 3, rng);
    const CtcResult res = ctc_loss(lp, target);
    EXPECT_NEAR(res.loss, ctc_brute_force(lp, target), 1e-9);
  }
}

// The analytic gradient is taken with respect to the raw log-probability
// entries (no re-normalization under perturbation, by design).
TEST(Ctc, GradientMatchesFiniteDifferences) {
  Rng rng(109);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t t = 2 + rng.below(4);
    const std::size_t v = 2 + rng.below(3);
    Matrix lp = random_log_probs(t, v, rng);
    const LabelSeq target = random_feasible_target(t, v, 2, rng);
    const CtcResult res = ctc_loss(lp, target);
    for (std::size_t i = 0; i < lp.data.size(); ++i) {
      const double fd = central_diff(
          &lp.data[i], [&] { return ctc_loss(lp, target).loss; });
      EXPECT_LE(rel_err(res.grad.data[i], fd), 1e-6)
          << "entry " << i << ": analytic " << res.grad.data[i] << " vs fd "
          << fd;
    }
  }
}

TEST(Ctc, GreedyDecodeCollapses) {
  const Alphabet ab("ab");
  // Argmax sequence: blank, a, a, blank, b -> "ab".
  const Matrix lp1 = log_probs_from_rows({{0.8, 0.1, 0.1},
                                          {0.1, 0.8, 0.1},
                                          {0.1, 0.8, 0.1},
                                          {0.8, 0.1, 0.1},
                                          {0.1, 0.1, 0.8}});
  EXPECT_EQ(greedy_decode(lp1, ab), "ab");

  const Matrix lp2 = log_probs_from_rows({{0.9, 0.05, 0.05},
                                          {0.9, 0.05, 0.05}});
  EXPECT_EQ(greedy_decode(lp2, ab), "");

  // a, blank, a -> "aa" (the blank separates a genuine repeat).
  const Matrix lp3 = log_probs_from_rows({{0.1, 0.8, 0.1},
                                          {0.8, 0.1, 0.1},
                                          {0.1, 0.8, 0.1}});
  EXPECT_EQ(greedy_decode(lp3, ab), "aa");
}

TEST(Ctc, GreedyTieBreaksToLowestIndex) {
  const Alphabet ab("ab");
  const Matrix lp = log_probs_from_rows({{0.4, 0.4, 0.2}});
  EXPECT_EQ(greedy_decode(lp, ab), "");  // blank (index 0) wins the tie
}

CharNGramLM flat_lm(const Alphabet& alphabet) {
  CharNGramLM lm(2);
  lm.add_vocab(alphabet.symbols());
  return lm;
}

// With no LM, no length bonus and a beam too wide to prune, the beam search
// must return the labeling with the maximal exact marginal probability.
TEST(Beam, ExactMarginalizationOnSmallInstances) {
  const Alphabet ab("ab");
  const CharNGramLM lm = flat_lm(ab);
  Rng rng(113);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t t = 1 + rng.below(3);
    const Matrix lp = random_log_probs(t, 3, rng);
    const auto marginals = exact_prefix_marginals(lp, ab);
    std::string best;
    double best_p = -1.0;
    for (const auto& [prefix, p] : marginals) {
      if (p > best_p) {
        best_p = p;
        best = prefix;
      }
    }
    EXPECT_EQ(beam_decode(lp, ab, lm, 200, 0.0, 0.0), best);
  }
}

TEST(Beam, NeverWorseThanGreedyWithoutLm) {
  const Alphabet ab("ab");
  const CharNGramLM lm = flat_lm(ab);
  Rng rng(127);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t t = 1 + rng.below(3);
    const Matrix lp = random_log_probs(t, 3, rng);
    const auto marginals = exact_prefix_marginals(lp, ab);
    const std::string beam = beam_decode(lp, ab, lm, 200, 0.0, 0.0);
    const std::string greedy = greedy_decode(lp, ab);
    EXPECT_GE(marginals.at(beam), marginals.at(greedy) - 1e-12);
  }
}

TEST(Beam, WidthOneIsStructurallyValid) {
  const Alphabet ab("ab");
  const CharNGramLM lm = flat_lm(ab);
  Rng rng(131);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix lp = random_log_probs(4, 3, rng);
    const std::string out = beam_decode(lp, ab, lm, 1, 0.0, 0.0);
    for (char c : out) EXPECT_TRUE(ab.contains(c));
  }
}

// A hand-built near-tie: without the LM the acoustically favored "ac" wins;
// an LM trained only on "ab" flips the decision once alpha is large enough.
TEST(Beam, LmSteersNearTie) {
  const Alphabet abc("abc");
  CharNGramLM lm = CharNGramLM::train_corpus({"ab"}, 2);
  lm.add_vocab(abc.symbols());

  const Matrix lp = log_probs_from_rows({{0.05, 0.9, 0.025, 0.025},
                                         {0.05, 0.05, 0.44, 0.46}});
  EXPECT_EQ(beam_decode(lp, abc, lm, 32, 0.0, 0.0), "ac");
  EXPECT_EQ(beam_decode(lp, abc, lm, 32, 1.0, 0.0), "ab");
}

TEST(Beam, RejectsZeroWidth) {
  const Alphabet ab("ab");
  const CharNGramLM lm = flat_lm(ab);
  const Matrix lp = log_probs_from_rows({{0.5, 0.3, 0.2}});
  EXPECT_THROW(beam_decode(lp, ab, lm, 0, 0.0, 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace liasr
