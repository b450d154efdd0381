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

#include "liasr/checkpoint.hpp"

#include <cstdio>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "liasr/head.hpp"
#include "liasr/rng.hpp"
#include "test_util.hpp"

namespace liasr {
namespace {

using testing::bitwise_equal;

bool vectors_bitwise_equal(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!bitwise_equal(a[i], b[i])) return false;
  }
  return true;
}

bool heads_bitwise_equal(const AcousticHead& a, const AcousticHead& b) {
  if (a.kind != b.kind || a.dim() != b.dim() || a.vocab() != b.vocab()) {
    return false;
  }
  if (a.kind == HeadKind::kLI) {
    if (a.li->k != b.li->k) return false;
    if (!vectors_bitwise_equal(a.li->W.data, b.li->W.data)) return false;
    if (!vectors_bitwise_equal(a.li->b, b.li->b)) return false;
  }
  return vectors_bitwise_equal(a.dense.P.data, b.dense.P.data) &&
         vectors_bitwise_equal(a.dense.c, b.dense.c);
}

Checkpoint make_li_checkpoint(bool with_adam) {
  Rng rng(31);
  Checkpoint ckpt;
  ckpt.head = make_head(HeadKind::kLI, 5, 4, 10.0, rng);
  if (with_adam) {
    auto slots = trainable_params(ckpt.head);
    AdamState state = AdamState::zeros_like(slots);
    state.t = 17;
    for (auto& m : state.m) {
      for (double& x : m) x = rng.gaussian();
    }
    for (auto& v : state.v) {
      for (double& x : v) x = rng.uniform();
    }
    ckpt.adam = std::move(state);
  }
  return ckpt;
}

TEST(Checkpoint, LiRoundTripIsBitwise) {
  const Checkpoint original = make_li_checkpoint(/*with_adam=*/false);
  std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
  save_checkpoint(buf, original);
  const Checkpoint loaded = load_checkpoint(buf);
  EXPECT_TRUE(heads_bitwise_equal(loaded.head, original.head));
  EXPECT_FALSE(loaded.adam.has_value());
}

TEST(Checkpoint, FfRoundTripIsBitwise) {
  Rng rng(37);
  Checkpoint original;
  original.head = make_head(HeadKind::kFF, 3, 6, 10.0, rng);
  std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
  save_checkpoint(buf, original);
  const Checkpoint loaded = load_checkpoint(buf);
  EXPECT_EQ(loaded.head.kind, HeadKind::kFF);
  EXPECT_TRUE(heads_bitwise_equal(loaded.head, original.head));
}

TEST(Checkpoint, AdamStateRoundTripsBitwise) {
  const Checkpoint original = make_li_checkpoint(/*with_adam=*/true);
  std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
  save_checkpoint(buf, original);
  const Checkpoint loaded = load_checkpoint(buf);
  ASSERT_TRUE(loaded.adam.has_value());
  EXPECT_EQ(loaded.adam->t, 17u);
  ASSERT_EQ(loaded.adam->m.size(), original.adam->m.size());
  for (std::size_t i = 0; i < loaded.adam->m.size(); ++i) {
    EXPECT_TRUE(vectors_bitwise_equal(loaded.adam->m[i], original.adam->m[i]));
    EXPECT_TRUE(vectors_bitwise_equal(loaded.adam->v[i], original.adam->v[i]));
  }
}

TEST(Checkpoint, SavedBytesAreDeterministic) {
  const Checkpoint ckpt = make_li_checkpoint(/*with_adam=*/true);
  std::ostringstream a(std::ios::binary);
  std::ostringstream b(std::ios::binary);
  save_checkpoint(a, ckpt);
  save_checkpoint(b, ckpt);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Checkpoint, FileRoundTrip) {
  const Checkpoint original = make_li_checkpoint(/*with_adam=*/true);
  const std::string path = ::testing::TempDir() + "/liasr_ckpt_test.bin";
  save_checkpoint_file(path, original);
  const Checkpoint loaded = load_checkpoint_file(path);
  EXPECT_TRUE(heads_bitwise_equal(loaded.head, original.head));
  ASSERT_TRUE(loaded.adam.has_value());
  EXPECT_EQ(loaded.adam->t, original.adam->t);
  std::remove(path.c_str());
  EXPECT_THROW(load_checkpoint_file(path), CheckpointError);
}

TEST(Checkpoint, RejectsBadMagic) {
  const Checkpoint ckpt = make_li_checkpoint(false);
  std::ostringstream out(std::ios::binary);
  save_checkpoint(out, ckpt);
  std::string bytes = out.str();
  bytes[0] = 'X';
  std::istringstream in(bytes, std::ios::binary);
  EXPECT_THROW(load_checkpoint(in), CheckpointError);
}

TEST(Checkpoint, RejectsUnsupportedVersion) {
  const Checkpoint ckpt = make_li_checkpoint(false);
  std::ostringstream out(std::ios::binary);
  save_checkpoint(out, ckpt);
  std::string bytes = out.str();
  bytes[8] = 99;  // little-endian version word follows the 8-byte magic
  std::istringstream in(bytes, std::ios::binary);
  EXPECT_THROW(load_checkpoint(in), CheckpointError);
}

TEST(Checkpoint, RejectsTruncation) {
  const Checkpoint ckpt = make_li_checkpoint(true);
  std::ostringstream out(std::ios::binary);
  save_checkpoint(out, ckpt);
  const std::string bytes = out.str();
  // Cutting anywhere must throw, never return garbage.
  for (std::size_t cut : {std::size_t{4}, std::size_t{13}, bytes.size() / 2,
                          bytes.size() - 1}) {
    std::istringstream in(bytes.substr(0, cut), std::ios::binary);
    EXPECT_THROW(load_checkpoint(in), CheckpointError) << "cut " << cut;
  }
}

TEST(Checkpoint, RejectsHeaderPayloadMismatch) {
  const Checkpoint ckpt = make_li_checkpoint(false);
  std::ostringstream out(std::ios::binary);
  save_checkpoint(out, ckpt);
  std::string bytes = out.str();
  // The d field lives right after magic (8), version (4) and kind (1).
  bytes[13] = 9;
  std::istringstream in(bytes, std::ios::binary);
  EXPECT_THROW(load_checkpoint(in), CheckpointError);
}

}  // namespace
}  // namespace liasr
