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

#ifndef LIASR_NGRAM_LM_HPP_
#define LIASR_NGRAM_LM_HPP_

#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace liasr {

// Character n-gram language model with add-one smoothing and no backoff.
// Each training string is padded with n-1 begin sentinels and one end
// sentinel; a context is always the previous n-1 tokens.  Smoothing over the
// full vocabulary (characters plus both sentinels) keeps every conditional
// distribution exactly normalized.
//
// Tokens are rendered as "<s>", "</s>", "<sp>" (space) or the raw character
// in the dump format, so vocabulary characters may not include '<' or '>'.
class CharNGramLM {
 public:
  static constexpr std::string_view kBos = "<s>";
  static constexpr std::string_view kEos = "</s>";

  explicit CharNGramLM(std::size_t order) : order_(order) {
    if (order_ < 1) throw std::invalid_argument("CharNGramLM: order must be >= 1");
    vocab_.insert(std::string(kBos));
    vocab_.insert(std::string(kEos));
  }

  std::size_t order() const { return order_; }

  // Characters (not sentinels) currently in the vocabulary.
  std::string characters() const {
    std::string out;
    for (const auto& tok : vocab_) {
      if (tok.size() == 1) out.push_back(tok[0]);
      if (tok == "<sp>") out.push_back(' ');
    }
    return out;
  }

  // Widens the vocabulary without adding counts; unseen characters keep the
  // add-one floor probability.
  void add_vocab(std::string_view characters) {
    for (char c : characters) vocab_.insert(token_of(c));
  }

  // Accumulates n-gram counts; calling twice with the same corpus doubles
  // every count.
  void train(const std::vector<std::string>& corpus) {
    if (corpus.empty()) {
      throw std::invalid_argument("CharNGramLM::train: empty corpus");
    }
    for (const auto& s : corpus) {
      for (char c : s) vocab_.insert(token_of(c));
    }
    for (const auto& s : corpus) {
      std::vector<std::string> toks;
      toks.reserve(s.size() + order_);
      for (std::size_t i = 0; i + 1 < order_; ++i) toks.emplace_back(kBos);
      for (char c : s) toks.push_back(token_of(c));
      toks.emplace_back(kEos);
      for (std::size_t i = order_ - 1; i < toks.size(); ++i) {
        std::string ctx;
        for (std::size_t j = i - (order_ - 1); j < i; ++j) ctx += toks[j];
        auto& row = counts_[ctx];
        row.next[toks[i]] += 1;
        row.total += 1;
      }
    }
  }

  static CharNGramLM train_corpus(const std::vector<std::string>& corpus,
                                  std::size_t order) {
    CharNGramLM lm(order);
    lm.train(corpus);
    return lm;
  }

  // log P(next token = c | prefix), with begin-sentinel padding when the
  // prefix is shorter than n-1 characters.
  double continuation_log_prob(std::string_view prefix, char c) const {
    return token_log_prob(context_of(prefix), token_of(c));
  }

  // log P(end of string | prefix).
  double end_log_prob(std::string_view prefix) const {
    return token_log_prob(context_of(prefix), std::string(kEos));
  }

  // Chain-rule score of a whole string, including the end-of-string event.
  double score(std::string_view s) const {
    double lp = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      lp += continuation_log_prob(s.substr(0, i), s[i]);
    }
    lp += end_log_prob(s);
    return lp;
  }

  // P(token | context) with add-one smoothing over the whole vocabulary.
  double token_prob(const std::string& context, const std::string& token) const {
    if (vocab_.find(token) == vocab_.end()) {
      throw std::invalid_argument("CharNGramLM: token not in vocabulary: " + token);
    }
    std::uint64_t count = 0;
    std::uint64_t total = 0;
    auto it = counts_.find(context);
    if (it != counts_.end()) {
      total = it->second.total;
      auto jt = it->second.next.find(token);
      if (jt != it->second.next.end()) count = jt->second;
    }
    return (static_cast<double>(count) + 1.0) /
           (static_cast<double>(total) + static_cast<double>(vocab_.size()));
  }

  std::vector<std::string> vocabulary() const {
    return {vocab_.begin(), vocab_.end()};
  }

  // Rendered context key for a character prefix (exposed for tests).
  std::string context_of(std::string_view prefix) const {
    std::string ctx;
    const std::size_t need = order_ - 1;
    const std::size_t have = prefix.size() < need ? prefix.size() : need;
    for (std::size_t i = 0; i < need - have; ++i) ctx += kBos;
    for (std::size_t i = prefix.size() - have; i < prefix.size(); ++i) {
      validate_char(prefix[i]);
      ctx += token_of(prefix[i]);
    }
    return ctx;
  }

  // Textual dump: two metadata lines, then "context<TAB>token<TAB>count"
  // entries sorted by (context, token); round-trips bit-exactly.
  void dump(std::ostream& os) const {
    os << "ngram\t" << order_ << "\n";
    os << "vocab\t";
    for (const auto& tok : vocab_) os << tok;
    os << "\n";
    for (const auto& [ctx, row] : counts_) {
      for (const auto& [tok, count] : row.next) {
        os << ctx << "\t" << tok << "\t" << count << "\n";
      }
    }
  }

  static CharNGramLM load(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("ngram\t", 0) != 0) {
      throw std::runtime_error("CharNGramLM::load: missing order line");
    }
    const std::size_t order = std::stoul(line.substr(6));
    CharNGramLM lm(order);
    if (!std::getline(is, line) || line.rfind("vocab\t", 0) != 0) {
      throw std::runtime_error("CharNGramLM::load: missing vocab line");
    }
    for (const auto& tok : tokenize(line.substr(6))) lm.vocab_.insert(tok);
    std::size_t lineno = 2;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto tab1 = line.find('\t');
      const auto tab2 = line.find('\t', tab1 + 1);
      if (tab1 == std::string::npos || tab2 == std::string::npos) {
        throw std::runtime_error("CharNGramLM::load: malformed line " +
                                 std::to_string(lineno));
      }
      const std::string ctx = line.substr(0, tab1);
      const std::string tok = line.substr(tab1 + 1, tab2 - tab1 - 1);
      const std::uint64_t count = std::stoull(line.substr(tab2 + 1));
      auto& row = lm.counts_[ctx];
      row.next[tok] += count;
      row.total += count;
    }
    return lm;
  }

 private:
  struct ContextRow {
    std::map<std::string, std::uint64_t> next;
    std::uint64_t total = 0;
  };

  static void validate_char(char c) {
    if (c == '<' || c == '>') {
      throw std::invalid_argument(
          "CharNGramLM: characters '<' and '>' are reserved for sentinels");
    }
  }

  static std::string token_of(char c) {
    validate_char(c);
    if (c == ' ') return "<sp>";
    return std::string(1, c);
  }

  // Splits a rendered token sequence back into rendered tokens.
  static std::vector<std::string> tokenize(std::string_view rendered) {
    std::vector<std::string> toks;
    std::size_t i = 0;
    while (i < rendered.size()) {
      if (rendered[i] == '<') {
        const auto end = rendered.find('>', i);
        if (end == std::string_view::npos) {
          throw std::runtime_error("CharNGramLM: unterminated token");
        }
        toks.emplace_back(rendered.substr(i, end - i + 1));
        i = end + 1;
      } else {
        toks.emplace_back(1, rendered[i]);
        ++i;
      }
    }
    return toks;
  }

  double token_log_prob(const std::string& context,
                        const std::string& token) const {
    return std::log(token_prob(context, token));
  }

  std::size_t order_;
  std::set<std::string> vocab_;  // rendered tokens
  std::map<std::string, ContextRow> counts_;
};

}  // namespace liasr

#endif  // LIASR_NGRAM_LM_HPP_
