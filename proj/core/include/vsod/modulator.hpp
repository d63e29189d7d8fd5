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

// Temporal modulator: channel attention followed by spatial attention on
// motion features, and the additive fusion of the modulated motion features
// into the appearance branch.

#ifndef VSOD_MODULATOR_HPP_
#define VSOD_MODULATOR_HPP_

#include <optional>

#include "vsod/autograd.hpp"
#include "vsod/config.hpp"
#include "vsod/params.hpp"

namespace vsod {

// Two fully-connected layers C -> C/r -> C, stored as 1x1 convolutions.
struct ChannelGateParams {
  Var fc1_weight, fc1_bias;
  Var fc2_weight, fc2_bias;
};

// One 7x7 convolution from the pooled descriptor to a single channel.
struct SpatialGateParams {
  Var weight, bias;
  SpatialPool pool = SpatialPool::kMaxMean;
};

// Absent members mean the corresponding attention is ablated (identity).
struct ModulatorParams {
  std::optional<ChannelGateParams> ca;
  std::optional<SpatialGateParams> sa;
};

void append_modulator_layout(ParamLayout& layout, const ModelConfig& cfg);
ModulatorParams modulator_params(const ParamStore& params,
                                 const ModelConfig& cfg, int level);

// sigmoid(fc2(relu(fc1(maxpool(x))))) as a (C,1,1) gate.
Var channel_gate(const Var& x, const ChannelGateParams& p);
// sigmoid(conv7x7(pool_ch(x))) as a (1,H,W) gate.
Var spatial_gate(const Var& x, const SpatialGateParams& p);

Var channel_attention(const Var& x, const ChannelGateParams& p);
Var spatial_attention(const Var& x, const SpatialGateParams& p);

// spatial_attention(channel_attention(f_m)); ablated stages are skipped.
Var temporal_modulate(const Var& f_m, const ModulatorParams& p);

// f_a + temporal_modulate(f_m). Throws ConfigError on shape mismatch.
Var implicit_guidance_fuse(const Var& f_a, const Var& f_m,
                           const ModulatorParams& p);

}  // namespace vsod

#endif  // VSOD_MODULATOR_HPP_
