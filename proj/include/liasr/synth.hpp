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

#ifndef LIASR_SYNTH_HPP_
#define LIASR_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "liasr/alphabet.hpp"
#include "liasr/linalg.hpp"
#include "liasr/rng.hpp"

namespace liasr {

// Deterministic synthetic corpus: every character owns a fixed Gaussian
// prototype embedding; an utterance repeats each transcript character for
// 2..5 frames with additive Gaussian noise.  Everything derives from one
// master seed, per-utterance, so generation order (or parallelism) cannot
// change the result.

struct Prototypes {
  std::size_t dim = 0;
  std::string symbols;           // alphabet characters, in alphabet order
  std::vector<Vector> vectors;   // one per symbol
  std::uint64_t seed = 0;

  const Vector& of(char c) const {
    const auto pos = symbols.find(c);
    if (pos == std::string::npos) {
      throw std::invalid_argument(std::string("Prototypes: unknown character '") +
                                  c + "'");
    }
    return vectors[pos];
  }
};

inline Prototypes make_prototypes(const Alphabet& alphabet, std::size_t d,
                                  std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("make_prototypes: d must be >= 2");
  Prototypes protos;
  protos.dim = d;
  protos.symbols = alphabet.symbols();
  protos.seed = seed;
  Rng rng(seed);
  protos.vectors.reserve(protos.symbols.size());
  for (std::size_t i = 0; i < protos.symbols.size(); ++i) {
    Vector v(d);
    for (double& x : v) x = rng.gaussian();
    protos.vectors.push_back(std::move(v));
  }
  return protos;
}

struct Utterance {
  Matrix frames;           // T x d
  std::string transcript;  // words joined by single spaces
  std::uint64_t seed = 0;
};

constexpr std::size_t kMinFramesPerChar = 2;
constexpr std::size_t kMaxFramesPerChar = 5;

inline Utterance synth_utterance(const std::vector<std::string>& words,
                                 const Prototypes& protos, double noise_sigma,
                                 std::uint64_t seed) {
  if (words.empty()) {
    throw std::invalid_argument("synth_utterance: need at least one word");
  }
  if (noise_sigma < 0.0) {
    throw std::invalid_argument("synth_utterance: noise_sigma must be >= 0");
  }
  Utterance utt;
  utt.seed = seed;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) utt.transcript.push_back(' ');
    utt.transcript += words[i];
  }

  Rng rng(seed);
  const std::size_t d = protos.dim;
  std::vector<std::size_t> repeat(utt.transcript.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < utt.transcript.size(); ++i) {
    repeat[i] = kMinFramesPerChar +
                rng.below(kMaxFramesPerChar - kMinFramesPerChar + 1);
    total += repeat[i];
  }
  utt.frames = Matrix(total, d);
  std::size_t t = 0;
  for (std::size_t i = 0; i < utt.transcript.size(); ++i) {
    const Vector& proto = protos.of(utt.transcript[i]);
    for (std::size_t r = 0; r < repeat[i]; ++r, ++t) {
      for (std::size_t j = 0; j < d; ++j) {
        utt.frames(t, j) = proto[j] + noise_sigma * rng.gaussian();
      }
    }
  }
  return utt;
}

struct SubsetSpec {
  std::string name;
  std::size_t count = 0;
};

inline std::vector<SubsetSpec> default_subsets() {
  return {{"s", 25}, {"m", 100}, {"l", 1000}, {"xl", 5000}, {"xxl", 15000}};
}

struct CorpusConfig {
  std::size_t d = 16;
  std::size_t lexicon_size = 50;
  std::size_t word_len_min = 2;
  std::size_t word_len_max = 6;
  std::size_t words_per_utt_min = 1;
  std::size_t words_per_utt_max = 2;
  double noise_sigma = 0.3;
  std::vector<SubsetSpec> subsets = default_subsets();
  std::size_t test_count = 500;

  void validate() const {
    if (d < 2) throw std::invalid_argument("CorpusConfig: d must be >= 2");
    if (lexicon_size < 1) {
      throw std::invalid_argument("CorpusConfig: lexicon_size must be >= 1");
    }
    if (word_len_min < 1 || word_len_max < word_len_min) {
      throw std::invalid_argument("CorpusConfig: bad word length range");
    }
    if (words_per_utt_min < 1 || words_per_utt_max < words_per_utt_min) {
      throw std::invalid_argument("CorpusConfig: bad words-per-utterance range");
    }
    if (noise_sigma < 0.0) {
      throw std::invalid_argument("CorpusConfig: noise_sigma must be >= 0");
    }
    if (subsets.empty()) {
      throw std::invalid_argument("CorpusConfig: need at least one subset");
    }
    for (std::size_t i = 1; i < subsets.size(); ++i) {
      if (subsets[i].count <= subsets[i - 1].count) {
        throw std::invalid_argument(
            "CorpusConfig: subset counts must be strictly increasing");
      }
    }
    if (test_count < 1) {
      throw std::invalid_argument("CorpusConfig: test_count must be >= 1");
    }
  }
};

// Sub-stream ids off the master seed.
namespace synth_streams {
constexpr std::uint64_t kLexicon = 1;
constexpr std::uint64_t kPrototypes = 2;
constexpr std::uint64_t kWords = 3;
constexpr std::uint64_t kFrames = 4;
constexpr std::uint64_t kShuffle = 5;
}  // namespace synth_streams

// Distinct lexicon words over the alphabet's non-space characters.
inline std::vector<std::string> make_lexicon(const CorpusConfig& cfg,
                                             const Alphabet& alphabet,
                                             std::uint64_t master_seed) {
  std::string letters;
  for (char c : alphabet.symbols()) {
    if (c != ' ') letters.push_back(c);
  }
  if (letters.empty()) {
    throw std::invalid_argument("make_lexicon: alphabet has no letters");
  }
  Rng rng(derive_seed(master_seed, synth_streams::kLexicon));
  std::set<std::string> seen;
  std::vector<std::string> lexicon;
  while (lexicon.size() < cfg.lexicon_size) {
    const std::size_t len =
        cfg.word_len_min + rng.below(cfg.word_len_max - cfg.word_len_min + 1);
    std::string word;
    for (std::size_t i = 0; i < len; ++i) {
      word.push_back(letters[rng.below(letters.size())]);
    }
    if (seen.insert(word).second) lexicon.push_back(std::move(word));
  }
  return lexicon;
}

class Corpus {
 public:
  Corpus(CorpusConfig cfg, Alphabet alphabet, std::uint64_t master_seed)
      : cfg_(std::move(cfg)), alphabet_(std::move(alphabet)),
        master_seed_(master_seed) {
    cfg_.validate();
    if (!alphabet_.contains(' ')) {
      throw std::invalid_argument("Corpus: alphabet must contain the space");
    }
    lexicon_ = make_lexicon(cfg_, alphabet_, master_seed_);
    protos_ = make_prototypes(alphabet_, cfg_.d,
                              derive_seed(master_seed_, synth_streams::kPrototypes));

    const std::size_t pool = pool_size();
    std::vector<std::size_t> perm(pool);
    for (std::size_t i = 0; i < pool; ++i) perm[i] = i;
    Rng shuffle_rng(derive_seed(master_seed_, synth_streams::kShuffle));
    shuffle_rng.shuffle(perm);
    test_ids_.assign(perm.begin(),
                     perm.begin() + static_cast<std::ptrdiff_t>(cfg_.test_count));
    train_order_.assign(perm.begin() + static_cast<std::ptrdiff_t>(cfg_.test_count),
                        perm.end());
  }

  const CorpusConfig& config() const { return cfg_; }
  const Alphabet& alphabet() const { return alphabet_; }
  const Prototypes& prototypes() const { return protos_; }
  const std::vector<std::string>& lexicon() const { return lexicon_; }
  std::uint64_t master_seed() const { return master_seed_; }

  std::size_t pool_size() const {
    return cfg_.subsets.back().count + cfg_.test_count;
  }

  // Pool-id lists.  Subsets are drawn without replacement from the shuffled
  // train pool (prefixes, hence nested) and are disjoint from the test set.
  std::vector<std::size_t> subset_ids(const std::string& name) const {
    for (const auto& spec : cfg_.subsets) {
      if (spec.name == name) {
        if (spec.count > train_order_.size()) {
          throw std::invalid_argument("Corpus: pool too small for subset " + name);
        }
        return {train_order_.begin(),
                train_order_.begin() + static_cast<std::ptrdiff_t>(spec.count)};
      }
    }
    throw std::invalid_argument("Corpus: unknown subset " + name);
  }

  const std::vector<std::size_t>& test_ids() const { return test_ids_; }

  // Deterministic generation of pool utterance `id`, independent of any
  // other utterance.
  Utterance make_utterance(std::size_t id) const {
    if (id >= pool_size()) {
      throw std::invalid_argument("Corpus: utterance id out of range");
    }
    Rng word_rng(derive_seed(derive_seed(master_seed_, synth_streams::kWords), id));
    const std::size_t n_words =
        cfg_.words_per_utt_min +
        word_rng.below(cfg_.words_per_utt_max - cfg_.words_per_utt_min + 1);
    std::vector<std::string> words;
    words.reserve(n_words);
    for (std::size_t i = 0; i < n_words; ++i) {
      words.push_back(lexicon_[word_rng.below(lexicon_.size())]);
    }
    const std::uint64_t frame_seed =
        derive_seed(derive_seed(master_seed_, synth_streams::kFrames), id);
    return synth_utterance(words, protos_, cfg_.noise_sigma, frame_seed);
  }

  // Materializes (and caches) a set of pool utterances.
  const Utterance& at(std::size_t id) {
    auto it = cache_.find(id);
    if (it == cache_.end()) {
      it = cache_.emplace(id, make_utterance(id)).first;
    }
    return it->second;
  }

  void materialize(const std::vector<std::size_t>& ids) {
    for (auto id : ids) at(id);
  }

  void drop_cache() { cache_.clear(); }

 private:
  CorpusConfig cfg_;
  Alphabet alphabet_;
  std::uint64_t master_seed_;
  std::vector<std::string> lexicon_;
  Prototypes protos_;
  std::vector<std::size_t> test_ids_;
  std::vector<std::size_t> train_order_;
  std::unordered_map<std::size_t, Utterance> cache_;
};

}  // namespace liasr

#endif  // LIASR_SYNTH_HPP_
