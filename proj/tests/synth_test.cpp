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

#include "liasr/synth.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "liasr/alphabet.hpp"
#include "test_util.hpp"

namespace liasr {
namespace {

using testing::bitwise_equal;

CorpusConfig tiny_config() {
  CorpusConfig cfg;
  cfg.d = 4;
  cfg.lexicon_size = 8;
  cfg.word_len_min = 2;
  cfg.word_len_max = 4;
  cfg.subsets = {{"s", 5}, {"m", 12}};
  cfg.test_count = 6;
  return cfg;
}

bool frames_equal(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    if (!bitwise_equal(a.data[i], b.data[i])) return false;
  }
  return true;
}

TEST(Synth, PrototypesOnePerSymbolAndDeterministic) {
  const Alphabet ab("abc ");
  const Prototypes p1 = make_prototypes(ab, 3, 42);
  const Prototypes p2 = make_prototypes(ab, 3, 42);
  ASSERT_EQ(p1.vectors.size(), 4u);  // a, b, c, space
  EXPECT_EQ(p1.dim, 3u);
  for (std::size_t i = 0; i < p1.vectors.size(); ++i) {
    ASSERT_EQ(p1.vectors[i].size(), 3u);
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_TRUE(bitwise_equal(p1.vectors[i][j], p2.vectors[i][j]));
    }
  }
  EXPECT_EQ(&p1.of('b'), &p1.vectors[1]);
  EXPECT_THROW(p1.of('z'), std::invalid_argument);
  EXPECT_THROW(make_prototypes(ab, 1, 42), std::invalid_argument);
}

TEST(Synth, PrototypeSeedsChangeEmbeddings) {
  const Alphabet ab("ab ");
  const Prototypes p1 = make_prototypes(ab, 4, 1);
  const Prototypes p2 = make_prototypes(ab, 4, 2);
  EXPECT_FALSE(bitwise_equal(p1.vectors[0][0], p2.vectors[0][0]));
}

TEST(Synth, UtteranceIsDeterministicInSeed) {
  const Alphabet ab("ab ");
  const Prototypes protos = make_prototypes(ab, 4, 7);
  const Utterance u1 = synth_utterance({"ab", "ba"}, protos, 0.3, 99);
  const Utterance u2 = synth_utterance({"ab", "ba"}, protos, 0.3, 99);
  const Utterance u3 = synth_utterance({"ab", "ba"}, protos, 0.3, 100);
  EXPECT_EQ(u1.transcript, "ab ba");
  EXPECT_TRUE(frames_equal(u1.frames, u2.frames));
  EXPECT_FALSE(frames_equal(u1.frames, u3.frames));
}

TEST(Synth, FrameCountBoundsFollowRepeatRange) {
  const Alphabet ab("ab ");
  const Prototypes protos = make_prototypes(ab, 4, 7);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Utterance u = synth_utterance({"ab", "ba"}, protos, 0.1, seed);
    const std::size_t len = u.transcript.size();  // 5 with the space
    EXPECT_GE(u.frames.rows, kMinFramesPerChar * len);
    EXPECT_LE(u.frames.rows, kMaxFramesPerChar * len);
    EXPECT_EQ(u.frames.cols, 4u);
  }
}

// Two frames per character is enough for any CTC target: T >= 2L >= L + R.
TEST(Synth, EveryUtteranceIsCtcFeasible) {
  const Alphabet ab("ab ");
  const Prototypes protos = make_prototypes(ab, 4, 7);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Utterance u = synth_utterance({"abba", "aa"}, protos, 0.1, seed);
    std::size_t repeats = 0;
    for (std::size_t i = 1; i < u.transcript.size(); ++i) {
      if (u.transcript[i] == u.transcript[i - 1]) ++repeats;
    }
    EXPECT_GE(u.frames.rows, u.transcript.size() + repeats);
  }
}

TEST(Synth, ZeroNoiseEmitsExactPrototypes) {
  const Alphabet ab("ab ");
  const Prototypes protos = make_prototypes(ab, 4, 7);
  const Utterance u = synth_utterance({"ab"}, protos, 0.0, 5);
  std::size_t t = 0;
  for (char c : u.transcript) {
    const Vector& proto = protos.of(c);
    // All repeats of this character are the exact prototype vector.
    while (t < u.frames.rows &&
           bitwise_equal(u.frames(t, 0), proto[0])) {
      for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_TRUE(bitwise_equal(u.frames(t, j), proto[j]));
      }
      ++t;
    }
  }
  EXPECT_EQ(t, u.frames.rows);  // every frame was consumed by some character
}

TEST(Synth, UtteranceValidation) {
  const Alphabet ab("ab ");
  const Prototypes protos = make_prototypes(ab, 4, 7);
  EXPECT_THROW(synth_utterance({}, protos, 0.1, 1), std::invalid_argument);
  EXPECT_THROW(synth_utterance({"ab"}, protos, -0.1, 1), std::invalid_argument);
  EXPECT_THROW(synth_utterance({"xy"}, protos, 0.1, 1), std::invalid_argument);
}

TEST(Synth, LexiconIsDistinctSizedAndDeterministic) {
  const Alphabet ab("abcdef ");
  const CorpusConfig cfg = tiny_config();
  const auto lex1 = make_lexicon(cfg, ab, 11);
  const auto lex2 = make_lexicon(cfg, ab, 11);
  const auto lex3 = make_lexicon(cfg, ab, 12);
  EXPECT_EQ(lex1, lex2);
  EXPECT_NE(lex1, lex3);
  EXPECT_EQ(lex1.size(), cfg.lexicon_size);
  const std::set<std::string> uniq(lex1.begin(), lex1.end());
  EXPECT_EQ(uniq.size(), lex1.size());
  for (const auto& w : lex1) {
    EXPECT_GE(w.size(), cfg.word_len_min);
    EXPECT_LE(w.size(), cfg.word_len_max);
    EXPECT_EQ(w.find(' '), std::string::npos);
  }
}

TEST(Synth, DefaultSubsetLadder) {
  const auto subsets = default_subsets();
  ASSERT_EQ(subsets.size(), 5u);
  EXPECT_EQ(subsets[0].name, "s");
  EXPECT_EQ(subsets[0].count, 25u);
  EXPECT_EQ(subsets[1].count, 100u);
  EXPECT_EQ(subsets[2].count, 1000u);
  EXPECT_EQ(subsets[3].count, 5000u);
  EXPECT_EQ(subsets[4].name, "xxl");
  EXPECT_EQ(subsets[4].count, 15000u);
}

TEST(Synth, ConfigValidation) {
  CorpusConfig cfg = tiny_config();
  cfg.validate();
  cfg.subsets = {{"s", 10}, {"m", 10}};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = tiny_config();
  cfg.word_len_min = 5;
  cfg.word_len_max = 3;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = tiny_config();
  cfg.test_count = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Synth, CorpusSubsetsAreNestedAndDisjointFromTest) {
  const Alphabet ab("abcdef ");
  Corpus corpus(tiny_config(), ab, 77);
  EXPECT_EQ(corpus.pool_size(), 12u + 6u);

  const auto s = corpus.subset_ids("s");
  const auto m = corpus.subset_ids("m");
  ASSERT_EQ(s.size(), 5u);
  ASSERT_EQ(m.size(), 12u);
  // Nesting: s is a prefix of m.
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s[i], m[i]);

  const auto& test = corpus.test_ids();
  ASSERT_EQ(test.size(), 6u);
  const std::set<std::size_t> test_set(test.begin(), test.end());
  for (auto id : m) EXPECT_EQ(test_set.count(id), 0u);

  // All ids together cover the pool exactly once.
  std::set<std::size_t> all(test.begin(), test.end());
  all.insert(m.begin(), m.end());
  EXPECT_EQ(all.size(), corpus.pool_size());

  EXPECT_THROW(corpus.subset_ids("xl"), std::invalid_argument);
}

TEST(Synth, CorpusUtterancesAreDeterministicAndCached) {
  const Alphabet ab("abcdef ");
  Corpus c1(tiny_config(), ab, 77);
  Corpus c2(tiny_config(), ab, 77);
  Corpus c3(tiny_config(), ab, 78);

  const Utterance u1 = c1.make_utterance(3);
  const Utterance u2 = c2.make_utterance(3);
  EXPECT_EQ(u1.transcript, u2.transcript);
  EXPECT_TRUE(frames_equal(u1.frames, u2.frames));

  bool any_diff = false;
  for (std::size_t id = 0; id < 5; ++id) {
    const Utterance a = c1.make_utterance(id);
    const Utterance b = c3.make_utterance(id);
    if (a.transcript != b.transcript || !frames_equal(a.frames, b.frames)) {
      any_diff = true;
    }
  }
  EXPECT_TRUE(any_diff);

  // at() caches; the cached object is the same utterance.
  const Utterance& cached = c1.at(3);
  EXPECT_TRUE(frames_equal(cached.frames, u1.frames));
  c1.materialize(c1.subset_ids("s"));
  c1.drop_cache();
  EXPECT_TRUE(frames_equal(c1.at(3).frames, u1.frames));

  EXPECT_THROW(c1.make_utterance(c1.pool_size()), std::invalid_argument);
}

TEST(Synth, TranscriptsUseLexiconWordsJoinedBySpaces) {
  const Alphabet ab("abcdef ");
  Corpus corpus(tiny_config(), ab, 77);
  const auto& lex = corpus.lexicon();
  for (std::size_t id = 0; id < corpus.pool_size(); ++id) {
    const Utterance u = corpus.make_utterance(id);
    std::istringstream words(u.transcript);
    std::string w;
    std::size_t n = 0;
    while (words >> w) {
      ++n;
      EXPECT_NE(std::find(lex.begin(), lex.end(), w), lex.end())
          << "word not in lexicon: " << w;
    }
    EXPECT_GE(n, corpus.config().words_per_utt_min);
    EXPECT_LE(n, corpus.config().words_per_utt_max);
  }
}

TEST(Synth, CorpusRequiresSpaceInAlphabet) {
  EXPECT_THROW(Corpus(tiny_config(), Alphabet("abc"), 1), std::invalid_argument);
}

}  // namespace
}  // namespace liasr
