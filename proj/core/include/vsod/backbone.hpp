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

// Five-stage convolutional encoders for the appearance (student) and motion
// (teacher) branches. Stage k halves the resolution with a strided 3x3
// convolution, applies a second 3x3 convolution, and rectifies after each,
// giving features at strides 2, 4, 8, 16, 32.

#ifndef VSOD_BACKBONE_HPP_
#define VSOD_BACKBONE_HPP_

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "vsod/autograd.hpp"
#include "vsod/config.hpp"
#include "vsod/params.hpp"

namespace vsod {

enum class Branch { kAppearance, kMotion };

std::string branch_prefix(Branch b);  // "backbone.appearance." etc.

struct FeaturePyramid {
  Branch branch = Branch::kAppearance;
  std::array<Var, 5> levels;

  // 1-based, matching f_1..f_5.
  const Var& level(int k) const { return levels.at(static_cast<size_t>(k - 1)); }
};

// Per-level replacement of the tensor handed to the next stage. An undefined
// Var leaves that level untouched.
using StageOverrides = std::array<Var, 5>;

// Called after stage k (1-based) with f_k; the returned tensor is what
// stage k+1 consumes. Must preserve shape.
using StageHook = std::function<Var(int level, const Var& feature)>;

void append_backbone_layout(ParamLayout& layout, const ModelConfig& cfg,
                            Branch branch);

// (C, H, W) of f_1..f_5 for the configured input size.
std::vector<std::vector<int>> pyramid_shapes(const ModelConfig& cfg);

// Throws InputError unless `image` is (3, input_size, input_size).
void validate_image(const Tensor& image, const ModelConfig& cfg);

FeaturePyramid extract_pyramid(const ParamStore& params, const ModelConfig& cfg,
                               const Var& image, Branch branch,
                               const StageOverrides& overrides = {});

FeaturePyramid extract_pyramid_hooked(const ParamStore& params,
                                      const ModelConfig& cfg, const Var& image,
                                      Branch branch, const StageHook& hook);

}  // namespace vsod

#endif  // VSOD_BACKBONE_HPP_
