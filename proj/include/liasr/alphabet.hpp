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

#ifndef LIASR_ALPHABET_HPP_
#define LIASR_ALPHABET_HPP_

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace liasr {

// Output alphabet of the head: an ordered character set (which must include
// the space character for word boundaries) plus the CTC blank.  The blank is
// not a character; it owns output index 0, characters occupy 1..V-1.
class Alphabet {
 public:
  static constexpr std::size_t kBlankId = 0;

  explicit Alphabet(std::string_view symbols) : symbols_(symbols) {
    if (symbols_.empty()) {
      throw std::invalid_argument("Alphabet: empty symbol set");
    }
    id_of_.fill(-1);
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      const auto c = static_cast<unsigned char>(symbols_[i]);
      if (id_of_[c] != -1) {
        throw std::invalid_argument(std::string("Alphabet: duplicate symbol '") +
                                    symbols_[i] + "'");
      }
      id_of_[c] = static_cast<int>(i + 1);
    }
  }

  // Lowercase ASCII letters plus space: the default desk-scale alphabet
  // (V = 28 including the blank).
  static Alphabet lowercase_ascii() {
    return Alphabet("abcdefghijklmnopqrstuvwxyz ");
  }

  // Number of output classes including the blank.
  std::size_t size() const { return symbols_.size() + 1; }

  const std::string& symbols() const { return symbols_; }

  bool contains(char c) const {
    return id_of_[static_cast<unsigned char>(c)] != -1;
  }

  std::size_t id_of(char c) const {
    const int id = id_of_[static_cast<unsigned char>(c)];
    if (id == -1) {
      throw std::invalid_argument(std::string("Alphabet: unknown symbol '") +
                                  c + "'");
    }
    return static_cast<std::size_t>(id);
  }

  char char_of(std::size_t id) const {
    if (id == kBlankId || id > symbols_.size()) {
      throw std::invalid_argument("Alphabet: id " + std::to_string(id) +
                                  " is not a character");
    }
    return symbols_[id - 1];
  }

  // Character ids of a transcript (never contains the blank).
  std::vector<std::size_t> encode(std::string_view text) const {
    std::vector<std::size_t> ids;
    ids.reserve(text.size());
    for (char c : text) ids.push_back(id_of(c));
    return ids;
  }

  std::string decode(const std::vector<std::size_t>& ids) const {
    std::string out;
    out.reserve(ids.size());
    for (auto id : ids) out.push_back(char_of(id));
    return out;
  }

 private:
  std::string symbols_;
  std::array<int, 256> id_of_{};
};

}  // namespace liasr

#endif  // LIASR_ALPHABET_HPP_
