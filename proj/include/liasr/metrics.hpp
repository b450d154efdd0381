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

#ifndef LIASR_METRICS_HPP_
#define LIASR_METRICS_HPP_

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace liasr {

// Levenshtein distance with unit costs, O(|a| * |b|) two-row DP.
template <class Seq>
std::size_t edit_distance(const Seq& a, const Seq& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

// Splits on any run of whitespace; no punctuation normalization.
inline std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

// Word error rate as a ratio (not clamped to 1).
inline double wer(std::string_view reference, std::string_view hypothesis) {
  const auto ref = split_words(reference);
  if (ref.empty()) {
    throw std::invalid_argument("wer: reference has no words");
  }
  const auto hyp = split_words(hypothesis);
  return static_cast<double>(edit_distance(ref, hyp)) /
         static_cast<double>(ref.size());
}

// Character error rate as a ratio; spaces count as characters.
inline double cer(std::string_view reference, std::string_view hypothesis) {
  if (reference.empty()) {
    throw std::invalid_argument("cer: empty reference");
  }
  return static_cast<double>(edit_distance(reference, hypothesis)) /
         static_cast<double>(reference.size());
}

// Corpus-level rates: total edit distance over total reference length.
inline double corpus_wer(const std::vector<std::string>& references,
                         const std::vector<std::string>& hypotheses) {
  if (references.size() != hypotheses.size()) {
    throw std::invalid_argument("corpus_wer: size mismatch");
  }
  std::size_t errors = 0;
  std::size_t words = 0;
  for (std::size_t i = 0; i < references.size(); ++i) {
    const auto ref = split_words(references[i]);
    if (ref.empty()) {
      throw std::invalid_argument("corpus_wer: reference has no words");
    }
    errors += edit_distance(ref, split_words(hypotheses[i]));
    words += ref.size();
  }
  return static_cast<double>(errors) / static_cast<double>(words);
}

inline double corpus_cer(const std::vector<std::string>& references,
                         const std::vector<std::string>& hypotheses) {
  if (references.size() != hypotheses.size()) {
    throw std::invalid_argument("corpus_cer: size mismatch");
  }
  std::size_t errors = 0;
  std::size_t chars = 0;
  for (std::size_t i = 0; i < references.size(); ++i) {
    if (references[i].empty()) {
      throw std::invalid_argument("corpus_cer: empty reference");
    }
    errors += edit_distance(references[i], hypotheses[i]);
    chars += references[i].size();
  }
  return static_cast<double>(errors) / static_cast<double>(chars);
}

// 100 * (base - variant) / base.
inline double relative_improvement(double base, double variant) {
  if (base <= 0.0) {
    throw std::invalid_argument("relative_improvement: base must be > 0");
  }
  return 100.0 * (base - variant) / base;
}

// One evaluation row: error rates of one system on one (subset, corpus) cell.
struct EvalRecord {
  std::string system;  // "ff" or "li"
  std::string subset;  // s, m, l, xl, xxl
  std::string corpus;
  double wer = 0.0;  // percent
  double cer = 0.0;  // percent
};

struct CorpusImprovement {
  std::string corpus;
  double wer = 0.0;  // average relative WER improvement, percent
  double cer = 0.0;
};

struct ImprovementReport {
  std::vector<CorpusImprovement> per_corpus;
  double overall_wer = 0.0;
  double overall_cer = 0.0;
};

inline const std::vector<std::string>& subset_names() {
  static const std::vector<std::string> names = {"s", "m", "l", "xl", "xxl"};
  return names;
}

// Parses tab- or whitespace-separated records with a "system subset corpus
// wer cer" header line.
inline std::vector<EvalRecord> parse_eval_records(std::istream& is) {
  std::vector<EvalRecord> records;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (!header_seen) {
      std::string a, b, c, d, e;
      if (!(ls >> a >> b >> c >> d >> e) || a != "system" || b != "subset" ||
          c != "corpus" || d != "wer" || e != "cer") {
        throw std::runtime_error("eval records: bad header at line " +
                                 std::to_string(lineno));
      }
      header_seen = true;
      continue;
    }
    EvalRecord r;
    if (!(ls >> r.system >> r.subset >> r.corpus >> r.wer >> r.cer)) {
      throw std::runtime_error("eval records: malformed line " +
                               std::to_string(lineno));
    }
    records.push_back(std::move(r));
  }
  if (!header_seen) {
    throw std::runtime_error("eval records: missing header");
  }
  return records;
}

// Average relative improvement per corpus (mean over the five subset pairs)
// and overall (mean over the per-corpus averages), for WER and CER
// independently.  Requires exactly one (base, variant) pair per subset.
inline ImprovementReport aggregate_improvements(
    const std::vector<EvalRecord>& records, const std::string& base_system = "ff",
    const std::string& variant_system = "li") {
  std::vector<std::string> corpora;
  for (const auto& r : records) {
    if (std::find(corpora.begin(), corpora.end(), r.corpus) == corpora.end()) {
      corpora.push_back(r.corpus);
    }
  }
  if (corpora.empty()) {
    throw std::invalid_argument("aggregate_improvements: no records");
  }

  const auto find_one = [&](const std::string& system, const std::string& subset,
                            const std::string& corpus) -> const EvalRecord& {
    const EvalRecord* found = nullptr;
    for (const auto& r : records) {
      if (r.system == system && r.subset == subset && r.corpus == corpus) {
        if (found != nullptr) {
          throw std::invalid_argument("aggregate_improvements: duplicate (" +
                                      corpus + ", " + subset + ") for " + system);
        }
        found = &r;
      }
    }
    if (found == nullptr) {
      throw std::invalid_argument("aggregate_improvements: missing (" + corpus +
                                  ", " + subset + ") for " + system);
    }
    return *found;
  };

  ImprovementReport report;
  double wer_sum = 0.0;
  double cer_sum = 0.0;
  for (const auto& corpus : corpora) {
    CorpusImprovement ci;
    ci.corpus = corpus;
    for (const auto& subset : subset_names()) {
      const EvalRecord& base = find_one(base_system, subset, corpus);
      const EvalRecord& variant = find_one(variant_system, subset, corpus);
      ci.wer += relative_improvement(base.wer, variant.wer);
      ci.cer += relative_improvement(base.cer, variant.cer);
    }
    ci.wer /= static_cast<double>(subset_names().size());
    ci.cer /= static_cast<double>(subset_names().size());
    wer_sum += ci.wer;
    cer_sum += ci.cer;
    report.per_corpus.push_back(std::move(ci));
  }
  report.overall_wer = wer_sum / static_cast<double>(corpora.size());
  report.overall_cer = cer_sum / static_cast<double>(corpora.size());
  return report;
}

}  // namespace liasr

#endif  // LIASR_METRICS_HPP_
