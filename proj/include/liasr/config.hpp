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

#ifndef LIASR_CONFIG_HPP_
#define LIASR_CONFIG_HPP_

#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "liasr/alphabet.hpp"
#include "liasr/head.hpp"
#include "liasr/metrics.hpp"
#include "liasr/optim.hpp"
#include "liasr/synth.hpp"

namespace liasr {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DecodeMode { kGreedy, kBeam };

struct DecodeConfig {
  DecodeMode mode = DecodeMode::kGreedy;
  std::size_t beam_width = 8;
  double alpha = 0.5;  // LM weight under shallow fusion
  double beta = 0.0;   // length bonus
  std::size_t lm_order = 4;

  void validate() const {
    if (beam_width < 1) throw ConfigError("decode: beam_width must be >= 1");
    if (alpha < 0 || beta < 0) {
      throw ConfigError("decode: alpha and beta must be >= 0");
    }
    if (lm_order < 1) throw ConfigError("decode: lm_order must be >= 1");
  }
};

// Flat experiment description; together with `seed` it fully determines a
// run.  `master_seed` fixes the corpus, `seed` fixes initialization and
// batch order.
struct ExperimentConfig {
  CorpusConfig corpus;
  std::uint64_t master_seed = 1234;
  std::uint64_t seed = 1;

  std::string letters = "abcdefghijklmnopqrstuvwxyz";  // space appended
  std::vector<HeadKind> heads = {HeadKind::kFF, HeadKind::kLI};
  double k = 10.0;

  AdamConfig adam;

  double epochs = 24.0;
  std::size_t min_steps = 200;

  std::vector<std::string> subsets = {"s", "m", "l", "xl", "xxl"};
  DecodeConfig decode;
  std::string out_dir = "out";

  Alphabet alphabet() const { return Alphabet(letters + " "); }

  void validate() const {
    try {
      corpus.validate();
      adam.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    decode.validate();
    if (letters.empty()) throw ConfigError("config: letters must be non-empty");
    for (char c : letters) {
      if (c == ' ') throw ConfigError("config: letters must not contain space");
    }
    if (heads.empty()) throw ConfigError("config: need at least one head kind");
    if (k <= 0) throw ConfigError("config: k must be > 0");
    if (epochs <= 0) throw ConfigError("config: epochs must be > 0");
    if (subsets.empty()) throw ConfigError("config: need at least one subset");
    for (const auto& name : subsets) {
      bool known = false;
      for (const auto& spec : corpus.subsets) known |= spec.name == name;
      if (!known) throw ConfigError("config: unknown subset " + name);
    }
    if (out_dir.empty()) throw ConfigError("config: out_dir must be non-empty");
    try {
      Alphabet check(letters + " ");  // rejects duplicate symbols
      (void)check;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: bad letters: ") + e.what());
    }
  }
};

namespace config_detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream iss(s);
  while (std::getline(iss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream iss(value);
  T out{};
  iss >> out;
  if (iss.fail() || !(iss >> std::ws).eof()) {
    throw ConfigError("config: bad value for " + key + ": '" + value + "'");
  }
  return out;
}

inline HeadKind parse_head_kind(const std::string& s) {
  if (s == "ff") return HeadKind::kFF;
  if (s == "li") return HeadKind::kLI;
  throw ConfigError("config: unknown head kind '" + s + "' (want ff or li)");
}

}  // namespace config_detail

// Parses the flat `key = value` format.  Blank lines and lines starting
// with '#' are ignored; unknown keys are errors.
inline void apply_config_line(ExperimentConfig& cfg, const std::string& key,
                              const std::string& value) {
  namespace cd = config_detail;
  if (key == "d") cfg.corpus.d = cd::parse_number<std::size_t>(key, value);
  else if (key == "lexicon_size")
    cfg.corpus.lexicon_size = cd::parse_number<std::size_t>(key, value);
  else if (key == "word_len_min")
    cfg.corpus.word_len_min = cd::parse_number<std::size_t>(key, value);
  else if (key == "word_len_max")
    cfg.corpus.word_len_max = cd::parse_number<std::size_t>(key, value);
  else if (key == "words_per_utt_min")
    cfg.corpus.words_per_utt_min = cd::parse_number<std::size_t>(key, value);
  else if (key == "words_per_utt_max")
    cfg.corpus.words_per_utt_max = cd::parse_number<std::size_t>(key, value);
  else if (key == "noise_sigma")
    cfg.corpus.noise_sigma = cd::parse_number<double>(key, value);
  else if (key == "subset_counts") {
    const auto parts = cd::split_csv(value);
    const auto names = subset_names();
    if (parts.size() != names.size()) {
      throw ConfigError("config: subset_counts needs " +
                        std::to_string(names.size()) + " values");
    }
    cfg.corpus.subsets.clear();
    for (std::size_t i = 0; i < parts.size(); ++i) {
      cfg.corpus.subsets.push_back(
          {names[i], cd::parse_number<std::size_t>(key, parts[i])});
    }
  } else if (key == "test_count")
    cfg.corpus.test_count = cd::parse_number<std::size_t>(key, value);
  else if (key == "master_seed")
    cfg.master_seed = cd::parse_number<std::uint64_t>(key, value);
  else if (key == "seed")
    cfg.seed = cd::parse_number<std::uint64_t>(key, value);
  else if (key == "letters")
    cfg.letters = value;
  else if (key == "heads") {
    cfg.heads.clear();
    for (const auto& h : cd::split_csv(value)) {
      cfg.heads.push_back(cd::parse_head_kind(h));
    }
  } else if (key == "k")
    cfg.k = cd::parse_number<double>(key, value);
  else if (key == "lr")
    cfg.adam.lr = cd::parse_number<double>(key, value);
  else if (key == "beta1")
    cfg.adam.beta1 = cd::parse_number<double>(key, value);
  else if (key == "beta2")
    cfg.adam.beta2 = cd::parse_number<double>(key, value);
  else if (key == "eps")
    cfg.adam.eps = cd::parse_number<double>(key, value);
  else if (key == "weight_decay")
    cfg.adam.weight_decay = cd::parse_number<double>(key, value);
  else if (key == "clip_norm")
    cfg.adam.clip_norm = cd::parse_number<double>(key, value);
  else if (key == "accumulation_steps")
    cfg.adam.accumulation_steps = cd::parse_number<std::size_t>(key, value);
  else if (key == "batch_size")
    cfg.adam.batch_size = cd::parse_number<std::size_t>(key, value);
  else if (key == "epochs")
    cfg.epochs = cd::parse_number<double>(key, value);
  else if (key == "min_steps")
    cfg.min_steps = cd::parse_number<std::size_t>(key, value);
  else if (key == "subsets")
    cfg.subsets = cd::split_csv(value);
  else if (key == "decode") {
    if (value == "greedy") cfg.decode.mode = DecodeMode::kGreedy;
    else if (value == "beam") cfg.decode.mode = DecodeMode::kBeam;
    else throw ConfigError("config: decode must be greedy or beam, got '" +
                           value + "'");
  } else if (key == "beam_width")
    cfg.decode.beam_width = cd::parse_number<std::size_t>(key, value);
  else if (key == "alpha")
    cfg.decode.alpha = cd::parse_number<double>(key, value);
  else if (key == "beta")
    cfg.decode.beta = cd::parse_number<double>(key, value);
  else if (key == "lm_order")
    cfg.decode.lm_order = cd::parse_number<std::size_t>(key, value);
  else if (key == "out_dir")
    cfg.out_dir = value;
  else
    throw ConfigError("config: unknown key '" + key + "'");
}

inline ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = config_detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value, got '" + t + "'");
    }
    const std::string key = config_detail::trim(t.substr(0, eq));
    const std::string value = config_detail::trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key");
    }
    try {
      apply_config_line(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream iss(text);
  return parse_config(iss);
}

// Round-trippable rendering of a config (every key, current values).
inline std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "d = " << cfg.corpus.d << "\n";
  os << "lexicon_size = " << cfg.corpus.lexicon_size << "\n";
  os << "word_len_min = " << cfg.corpus.word_len_min << "\n";
  os << "word_len_max = " << cfg.corpus.word_len_max << "\n";
  os << "words_per_utt_min = " << cfg.corpus.words_per_utt_min << "\n";
  os << "words_per_utt_max = " << cfg.corpus.words_per_utt_max << "\n";
  os << "noise_sigma = " << cfg.corpus.noise_sigma << "\n";
  os << "subset_counts = ";
  for (std::size_t i = 0; i < cfg.corpus.subsets.size(); ++i) {
    if (i) os << ",";
    os << cfg.corpus.subsets[i].count;
  }
  os << "\n";
  os << "test_count = " << cfg.corpus.test_count << "\n";
  os << "master_seed = " << cfg.master_seed << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "letters = " << cfg.letters << "\n";
  os << "heads = ";
  for (std::size_t i = 0; i < cfg.heads.size(); ++i) {
    if (i) os << ",";
    os << head_kind_name(cfg.heads[i]);
  }
  os << "\n";
  os << "k = " << cfg.k << "\n";
  os << "lr = " << cfg.adam.lr << "\n";
  os << "beta1 = " << cfg.adam.beta1 << "\n";
  os << "beta2 = " << cfg.adam.beta2 << "\n";
  os << "eps = " << cfg.adam.eps << "\n";
  os << "weight_decay = " << cfg.adam.weight_decay << "\n";
  os << "clip_norm = " << cfg.adam.clip_norm << "\n";
  os << "accumulation_steps = " << cfg.adam.accumulation_steps << "\n";
  os << "batch_size = " << cfg.adam.batch_size << "\n";
  os << "epochs = " << cfg.epochs << "\n";
  os << "min_steps = " << cfg.min_steps << "\n";
  os << "subsets = ";
  for (std::size_t i = 0; i < cfg.subsets.size(); ++i) {
    if (i) os << ",";
    os << cfg.subsets[i];
  }
  os << "\n";
  os << "decode = "
     << (cfg.decode.mode == DecodeMode::kGreedy ? "greedy" : "beam") << "\n";
  os << "beam_width = " << cfg.decode.beam_width << "\n";
  os << "alpha = " << cfg.decode.alpha << "\n";
  os << "beta = " << cfg.decode.beta << "\n";
  os << "lm_order = " << cfg.decode.lm_order << "\n";
  os << "out_dir = " << cfg.out_dir << "\n";
  return os.str();
}

}  // namespace liasr

#endif  // LIASR_CONFIG_HPP_
