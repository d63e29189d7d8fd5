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

#include "vsod/modulator.hpp"

#include <string>

#include "vsod/errors.hpp"

namespace vsod {
namespace {

std::string level_prefix(int level) {
  return "modulator.level" + std::to_string(level) + ".";
}

void require_channels(const Var& x, int expected, const char* what) {
  if (x.value().rank() != 3 || x.value().channels() != expected) {
    throw ConfigError(std::string(what) + " configured for " +
                      std::to_string(expected) + " channels, input is " +
                      shape_string(x.dims()));
  }
}

}  // namespace

void append_modulator_layout(ParamLayout& layout, const ModelConfig& cfg) {
  const AblationSpec& a = cfg.ablation;
  if (!a.uses_modulator()) return;
  const int pooled = cfg.spatial_pool == SpatialPool::kMaxMean ? 2 : 1;
  for (int k = 1; k <= 5; ++k) {
    const int c = cfg.widths[k - 1];
    const int hidden = c / cfg.ca_reduction;
    const std::string p = level_prefix(k);
    if (a.ca) {
      layout.push_back({p + "ca.fc1.weight", {hidden, c, 1, 1}, Init::kHeNormal});
      layout.push_back({p + "ca.fc1.bias", {hidden}, Init::kZeros});
      layout.push_back({p + "ca.fc2.weight", {c, hidden, 1, 1}, Init::kLecunNormal});
      layout.push_back({p + "ca.fc2.bias", {c}, Init::kZeros});
    }
    if (a.sa) {
      layout.push_back({p + "sa.conv.weight", {1, pooled, 7, 7}, Init::kLecunNormal});
      layout.push_back({p + "sa.conv.bias", {1}, Init::kZeros});
    }
  }
}

ModulatorParams modulator_params(const ParamStore& params,
                                 const ModelConfig& cfg, int level) {
  ModulatorParams m;
  if (!cfg.ablation.uses_modulator()) return m;
  const std::string p = level_prefix(level);
  if (cfg.ablation.ca) {
    m.ca = ChannelGateParams{params.get(p + "ca.fc1.weight"),
                             params.get(p + "ca.fc1.bias"),
                             params.get(p + "ca.fc2.weight"),
                             params.get(p + "ca.fc2.bias")};
  }
  if (cfg.ablation.sa) {
    m.sa = SpatialGateParams{params.get(p + "sa.conv.weight"),
                             params.get(p + "sa.conv.bias"), cfg.spatial_pool};
  }
  return m;
}

Var channel_gate(const Var& x, const ChannelGateParams& p) {
  require_channels(x, p.fc1_weight.value().dim(1), "channel attention");
  Var pooled = global_max_pool(x);
  Var hidden = relu(conv2d(pooled, p.fc1_weight, p.fc1_bias));
  return sigmoid(conv2d(hidden, p.fc2_weight, p.fc2_bias));
}

Var spatial_gate(const Var& x, const SpatialGateParams& p) {
  if (x.value().rank() != 3) {
    throw ConfigError("spatial attention expects (C,H,W), got " +
                      shape_string(x.dims()));
  }
  const int expected = p.pool == SpatialPool::kMaxMean ? 2 : 1;
  if (p.weight.value().dim(1) != expected || p.weight.value().dim(2) != 7) {
    throw ConfigError("spatial attention kernel must be (1," +
                      std::to_string(expected) + ",7,7), got " +
                      shape_string(p.weight.dims()));
  }
  Var descriptor = p.pool == SpatialPool::kMaxMean
                       ? concat_channels({channel_max(x), channel_mean(x)})
                       : channel_max(x);
  return sigmoid(conv2d(descriptor, p.weight, p.bias, {1, 3, 1}));
}

Var channel_attention(const Var& x, const ChannelGateParams& p) {
  return mul(x, channel_gate(x, p));
}

Var spatial_attention(const Var& x, const SpatialGateParams& p) {
  return mul(x, spatial_gate(x, p));
}

Var temporal_modulate(const Var& f_m, const ModulatorParams& p) {
  Var y = f_m;
  if (p.ca) y = channel_attention(y, *p.ca);
  if (p.sa) y = spatial_attention(y, *p.sa);
  return y;
}

Var implicit_guidance_fuse(const Var& f_a, const Var& f_m,
                           const ModulatorParams& p) {
  if (f_a.dims() != f_m.dims()) {
    throw ConfigError("fusion needs matching shapes, got " +
                      shape_string(f_a.dims()) + " and " +
                      shape_string(f_m.dims()));
  }
  return add(f_a, temporal_modulate(f_m, p));
}

}  // namespace vsod
