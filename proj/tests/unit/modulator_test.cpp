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
#include "vsod/errors.hpp"
#include "vsod/modulator.hpp"

namespace {

using vsod::ModelConfig;
using vsod::Tensor;
using vsod::Var;

vsod::ParamStore modulator_store(const ModelConfig& cfg, std::uint64_t seed) {
  vsod::ParamLayout layout;
  vsod::append_modulator_layout(layout, cfg);
  vsod::ParamStore params(layout, seed);
  std::mt19937_64 rng(seed);
  oracle::randomize(params, rng, 0.8);
  return params;
}

TEST(Modulator, FuseMatchesOracleOnRandomInstances) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 100; ++i) {
    ASSERT_LT(oracle::modulator_instance(rng), 1e-12) << "instance " << i;
  }
}

TEST(Modulator, ChannelGateIsPerChannelAndBounded) {
  ModelConfig cfg = ModelConfig::toy();
  auto params = modulator_store(cfg, 4);
  auto mp = vsod::modulator_params(params, cfg, 2);
  std::mt19937_64 rng(4);
  Var x(oracle::random_tensor({16, 8, 8}, rng));
  Tensor g = vsod::channel_gate(x, *mp.ca).value();
  EXPECT_EQ(g.dims(), (std::vector<int>{16, 1, 1}));
  for (double v : g.data()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  Tensor s = vsod::spatial_gate(x, *mp.sa).value();
  EXPECT_EQ(s.dims(), (std::vector<int>{1, 8, 8}));
}

TEST(Modulator, ZeroMotionFeaturesModulateToZero) {
  ModelConfig cfg = ModelConfig::toy();
  auto params = modulator_store(cfg, 7);
  for (int k = 1; k <= 5; ++k) {
    const int side = 64 >> k;
    Var zero(Tensor({cfg.widths[k - 1], side, side}, 0.0));
    Tensor out =
        vsod::temporal_modulate(zero, vsod::modulator_params(params, cfg, k))
            .value();
    for (double v : out.data()) ASSERT_EQ(v, 0.0);
  }
}

TEST(Modulator, AblatedAttentionIsIdentity) {
  ModelConfig cfg = ModelConfig::toy();
  cfg.ablation.ca = false;
  cfg.ablation.sa = false;
  vsod::ParamStore params;
  auto mp = vsod::modulator_params(params, cfg, 3);
  EXPECT_FALSE(mp.ca.has_value());
  EXPECT_FALSE(mp.sa.has_value());
  std::mt19937_64 rng(9);
  Tensor fa = oracle::random_tensor({32, 8, 8}, rng);
  Tensor fm = oracle::random_tensor({32, 8, 8}, rng);
  Tensor out = vsod::implicit_guidance_fuse(Var(fa), Var(fm), mp).value();
  EXPECT_EQ(out, oracle::add(fa, fm));
}

TEST(Modulator, LayoutFollowsFlags) {
  ModelConfig cfg = ModelConfig::toy();
  vsod::ParamLayout both, ca_only, sa_max;
  vsod::append_modulator_layout(both, cfg);
  EXPECT_EQ(both.size(), 30u);
  cfg.ablation.sa = false;
  vsod::append_modulator_layout(ca_only, cfg);
  EXPECT_EQ(ca_only.size(), 20u);
  cfg.ablation.sa = true;
  cfg.spatial_pool = vsod::SpatialPool::kMax;
  vsod::append_modulator_layout(sa_max, cfg);
  for (const auto& s : sa_max) {
    if (s.name.find("sa.conv.weight") != std::string::npos) {
      EXPECT_EQ(s.dims, (std::vector<int>{1, 1, 7, 7}));
    }
  }
  // Reduction ratio: fc1 maps C to C / r.
  EXPECT_EQ(both[0].name, "modulator.level1.ca.fc1.weight");
  EXPECT_EQ(both[0].dims, (std::vector<int>{8 / 4, 8, 1, 1}));
}

TEST(Modulator, FullProfileUsesReductionSixteen) {
  EXPECT_EQ(ModelConfig::full().ca_reduction, 16);
}

TEST(Modulator, ShapeMismatchIsConfigError) {
  ModelConfig cfg = ModelConfig::toy();
  auto params = modulator_store(cfg, 1);
  auto mp = vsod::modulator_params(params, cfg, 1);
  Var a(Tensor({8, 32, 32}));
  Var b(Tensor({8, 16, 16}));
  EXPECT_THROW(vsod::implicit_guidance_fuse(a, b, mp), vsod::ConfigError);
  Var wrong(Tensor({4, 32, 32}));
  EXPECT_THROW(vsod::implicit_guidance_fuse(wrong, wrong, mp),
               vsod::ConfigError);
}

}  // namespace
