// Copyright 2026 The vsod Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "instances.hpp"
#include "oracles.hpp"
#include "vsod/decoder.hpp"
#include "vsod/errors.hpp"

namespace {

using vsod::Tensor;
using vsod::Var;

const std::string kDec(vsod::kTeacherDecoder);

vsod::ParamStore decoder_store(int in_channels, int width, std::uint64_t seed) {
  vsod::ParamLayout layout;
  vsod::append_partial_decoder_layout(
      layout, vsod::kTeacherDecoder, {in_channels, 2 * in_channels, 4 * in_channels},
      width);
  vsod::ParamStore params(layout, seed);
  std::mt19937_64 rng(seed);
  oracle::randomize(params, rng, 0.5);
  return params;
}

TEST(Decoder, RfBlockMatchesOracle) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 60; ++i) {
    ASSERT_LT(oracle::rf_block_instance(rng), 1e-12) << "instance " << i;
  }
}

TEST(Decoder, BroadcastMatchesOracle) {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 60; ++i) {
    ASSERT_LT(oracle::broadcast_instance(rng), 1e-12) << "instance " << i;
  }
}

TEST(Decoder, UnetMatchesOracle) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 60; ++i) {
    ASSERT_LT(oracle::unet_instance(rng), 1e-12) << "instance " << i;
  }
}

TEST(Decoder, PartialDecodeMatchesOracleAtStrideEight) {
  auto params = decoder_store(3, 5, 8);
  std::mt19937_64 rng(8);
  Tensor f3 = oracle::random_tensor({3, 8, 8}, rng, 0, 1);
  Tensor f4 = oracle::random_tensor({6, 4, 4}, rng, 0, 1);
  Tensor f5 = oracle::random_tensor({12, 2, 2}, rng, 0, 1);
  Tensor z = vsod::partial_decode(params, kDec, Var(f3), Var(f4), Var(f5))
                 .logits.value();
  EXPECT_EQ(z.dims(), (std::vector<int>{1, 8, 8}));
  EXPECT_LT(vsod::max_abs_diff(z, oracle::partial_decode(params, kDec, f3, f4, f5)),
            1e-12);
}

TEST(Decoder, TopLevelPassesThroughBroadcastUnchanged) {
  auto params = decoder_store(2, 4, 1);
  std::mt19937_64 rng(1);
  Var r5(oracle::random_tensor({4, 2, 2}, rng));
  Var r4(oracle::random_tensor({4, 4, 4}, rng));
  Var r3(oracle::random_tensor({4, 8, 8}, rng));
  auto p = vsod::feature_broadcast(params, kDec, {r3, r4, r5});
  EXPECT_EQ(p.p5.value(), r5.value());
}

TEST(Decoder, RfBlockOutputIsRectifiedAndKeepsResolution) {
  auto params = decoder_store(2, 4, 5);
  std::mt19937_64 rng(5);
  Var f(oracle::random_tensor({2, 9, 7}, rng));
  Tensor r = vsod::rf_block(params, kDec, 3, f).value();
  EXPECT_EQ(r.dims(), (std::vector<int>{4, 9, 7}));
  for (double v : r.data()) EXPECT_GE(v, 0.0);
}

TEST(Decoder, Errors) {
  auto params = decoder_store(2, 4, 5);
  Var f(Tensor({2, 8, 8}));
  EXPECT_THROW(vsod::rf_block(params, kDec, 2, f), vsod::ConfigError);
  EXPECT_THROW(vsod::rf_block(params, kDec, 6, f), vsod::ConfigError);
  EXPECT_THROW(vsod::rf_block(params, kDec, 4, f), vsod::ConfigError);
  Var r5(Tensor({4, 2, 2})), r4(Tensor({4, 4, 4})), r3(Tensor({4, 6, 6}));
  EXPECT_THROW(vsod::feature_broadcast(params, kDec, {r3, r4, r5}),
               vsod::ShapeError);
  Var c3(Tensor({3, 8, 8}));
  EXPECT_THROW(vsod::feature_broadcast(params, kDec, {c3, r4, r5}),
               vsod::ShapeError);
}

TEST(Decoder, DilationsAreThreeFiveSeven) {
  EXPECT_EQ(vsod::kRfDilations, (std::array<int, 3>{3, 5, 7}));
}

}  // namespace
