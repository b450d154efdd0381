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

#ifndef LIASR_CHECKPOINT_HPP_
#define LIASR_CHECKPOINT_HPP_

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "liasr/head.hpp"
#include "liasr/optim.hpp"

namespace liasr {

// Versioned binary checkpoint: header (kind, d, V, k), LI params when
// present, dense params, and optionally the Adam state, all double
// precision and explicitly little-endian so round-trips are bit-exact on
// any host.

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace ckpt_detail {

constexpr std::array<char, 8> kMagic = {'L', 'I', 'A', 'S', 'R', 'C', 'K', '1'};
constexpr std::uint32_t kVersion = 1;

inline void put_u64(std::ostream& os, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(buf, 8);
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(buf, 4);
}

inline void put_u8(std::ostream& os, std::uint8_t v) {
  const char c = static_cast<char>(v);
  os.write(&c, 1);
}

inline void put_f64(std::ostream& os, double x) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(x));
  std::memcpy(&bits, &x, sizeof(bits));
  put_u64(os, bits);
}

inline std::uint64_t get_u64(std::istream& is) {
  char buf[8];
  if (!is.read(buf, 8)) throw CheckpointError("checkpoint: truncated u64");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  }
  return v;
}

inline std::uint32_t get_u32(std::istream& is) {
  char buf[4];
  if (!is.read(buf, 4)) throw CheckpointError("checkpoint: truncated u32");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  }
  return v;
}

inline std::uint8_t get_u8(std::istream& is) {
  char c;
  if (!is.read(&c, 1)) throw CheckpointError("checkpoint: truncated u8");
  return static_cast<std::uint8_t>(c);
}

inline double get_f64(std::istream& is) {
  const std::uint64_t bits = get_u64(is);
  double x;
  std::memcpy(&x, &bits, sizeof(x));
  return x;
}

inline void put_vector(std::ostream& os, const Vector& v) {
  put_u64(os, v.size());
  for (double x : v) put_f64(os, x);
}

inline Vector get_vector(std::istream& is) {
  const std::uint64_t n = get_u64(is);
  Vector v(n);
  for (double& x : v) x = get_f64(is);
  return v;
}

inline void put_matrix(std::ostream& os, const Matrix& m) {
  put_u64(os, m.rows);
  put_u64(os, m.cols);
  for (double x : m.data) put_f64(os, x);
}

inline Matrix get_matrix(std::istream& is) {
  const std::uint64_t rows = get_u64(is);
  const std::uint64_t cols = get_u64(is);
  Matrix m(rows, cols);
  for (double& x : m.data) x = get_f64(is);
  return m;
}

}  // namespace ckpt_detail

struct Checkpoint {
  AcousticHead head;
  std::optional<AdamState> adam;
};

inline void save_checkpoint(std::ostream& os, const Checkpoint& ckpt) {
  namespace d = ckpt_detail;
  const AcousticHead& head = ckpt.head;
  head.validate();
  os.write(d::kMagic.data(), d::kMagic.size());
  d::put_u32(os, d::kVersion);
  d::put_u8(os, head.kind == HeadKind::kLI ? 1 : 0);
  d::put_u64(os, head.dim());
  d::put_u64(os, head.vocab());
  d::put_f64(os, head.kind == HeadKind::kLI ? head.li->k : 0.0);
  if (head.kind == HeadKind::kLI) {
    d::put_matrix(os, head.li->W);
    d::put_vector(os, head.li->b);
  }
  d::put_matrix(os, head.dense.P);
  d::put_vector(os, head.dense.c);
  d::put_u8(os, ckpt.adam.has_value() ? 1 : 0);
  if (ckpt.adam) {
    d::put_u64(os, ckpt.adam->t);
    d::put_u64(os, ckpt.adam->m.size());
    for (std::size_t i = 0; i < ckpt.adam->m.size(); ++i) {
      d::put_vector(os, ckpt.adam->m[i]);
      d::put_vector(os, ckpt.adam->v[i]);
    }
  }
  if (!os) throw CheckpointError("checkpoint: write failed");
}

inline Checkpoint load_checkpoint(std::istream& is) {
  namespace d = ckpt_detail;
  std::array<char, 8> magic;
  if (!is.read(magic.data(), magic.size()) || magic != d::kMagic) {
    throw CheckpointError("checkpoint: bad magic");
  }
  const std::uint32_t version = d::get_u32(is);
  if (version != d::kVersion) {
    throw CheckpointError("checkpoint: unsupported version " +
                          std::to_string(version));
  }
  const std::uint8_t kind_byte = d::get_u8(is);
  if (kind_byte > 1) throw CheckpointError("checkpoint: bad head kind");
  const std::uint64_t dim = d::get_u64(is);
  const std::uint64_t vocab = d::get_u64(is);
  const double k = d::get_f64(is);

  Checkpoint ckpt;
  ckpt.head.kind = kind_byte == 1 ? HeadKind::kLI : HeadKind::kFF;
  if (ckpt.head.kind == HeadKind::kLI) {
    LIParams li;
    li.k = k;
    li.W = d::get_matrix(is);
    li.b = d::get_vector(is);
    ckpt.head.li = std::move(li);
  }
  ckpt.head.dense.P = d::get_matrix(is);
  ckpt.head.dense.c = d::get_vector(is);
  if (ckpt.head.dim() != dim || ckpt.head.vocab() != vocab) {
    throw CheckpointError("checkpoint: header/payload shape mismatch");
  }
  ckpt.head.validate();

  if (d::get_u8(is) == 1) {
    AdamState state;
    state.t = d::get_u64(is);
    const std::uint64_t slots = d::get_u64(is);
    state.m.reserve(slots);
    state.v.reserve(slots);
    for (std::uint64_t i = 0; i < slots; ++i) {
      state.m.push_back(d::get_vector(is));
      state.v.push_back(d::get_vector(is));
    }
    ckpt.adam = std::move(state);
  }
  return ckpt;
}

inline void save_checkpoint_file(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw CheckpointError("checkpoint: cannot open for write: " + path);
  save_checkpoint(os, ckpt);
  os.flush();
  if (!os) throw CheckpointError("checkpoint: write failed: " + path);
}

inline Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("checkpoint: cannot open: " + path);
  return load_checkpoint(is);
}

}  // namespace liasr

#endif  // LIASR_CHECKPOINT_HPP_
