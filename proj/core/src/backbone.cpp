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

#include "vsod/backbone.hpp"

#include "vsod/errors.hpp"

namespace vsod {

std::string branch_prefix(Branch b) {
  return b == Branch::kMotion ? "backbone.motion." : "backbone.appearance.";
}

void append_backbone_layout(ParamLayout& layout, const ModelConfig& cfg,
                            Branch branch) {
  const std::string prefix = branch_prefix(branch);
  int in = 3;
  for (int k = 1; k <= 5; ++k) {
    const int w = cfg.widths[k - 1];
    const std::string stage = prefix + "stage" + std::to_string(k) + ".";
    layout.push_back({stage + "conv1.weight", {w, in, 3, 3}, Init::kHeNormal});
    layout.push_back({stage + "conv1.bias", {w}, Init::kZeros});
    layout.push_back({stage + "conv2.weight", {w, w, 3, 3}, Init::kHeNormal});
    layout.push_back({stage + "conv2.bias", {w}, Init::kZeros});
    in = w;
  }
}

std::vector<std::vector<int>> pyramid_shapes(const ModelConfig& cfg) {
  std::vector<std::vector<int>> shapes;
  for (int k = 0; k < 5; ++k) {
    int side = cfg.input_size / cfg.strides[k];
    shapes.push_back({cfg.widths[k], side, side});
  }
  return shapes;
}

void validate_image(const Tensor& image, const ModelConfig& cfg) {
  if (image.rank() != 3 || image.channels() != 3) {
    throw InputError("expected a 3-channel image, got " + image.shape_string());
  }
  if (image.height() != image.width()) {
    throw InputError("input must be square, got " + image.shape_string());
  }
  if (image.height() % 32 != 0) {
    throw InputError("input side " + std::to_string(image.height()) +
                     " is not divisible by 32");
  }
  if (image.height() != cfg.input_size) {
    throw InputError("input side " + std::to_string(image.height()) +
                     " does not match configured input_size " +
                     std::to_string(cfg.input_size));
  }
}

FeaturePyramid extract_pyramid_hooked(const ParamStore& params,
                                      const ModelConfig& cfg, const Var& image,
                                      Branch branch, const StageHook& hook) {
  validate_image(image.value(), cfg);
  const std::string prefix = branch_prefix(branch);
  FeaturePyramid pyramid;
  pyramid.branch = branch;
  Var x = image;
  for (int k = 1; k <= 5; ++k) {
    const std::string stage = prefix + "stage" + std::to_string(k) + ".";
    x = relu(conv2d(x, params.get(stage + "conv1.weight"),
                    params.get(stage + "conv1.bias"), {2, 1, 1}));
    x = relu(conv2d(x, params.get(stage + "conv2.weight"),
                    params.get(stage + "conv2.bias"), {1, 1, 1}));
    pyramid.levels[k - 1] = x;
    if (hook) {
      Var next = hook(k, x);
      if (!next.defined() || next.dims() != x.dims()) {
        throw ConfigError("stage input override at level " +
                          std::to_string(k) + " has shape " +
                          (next.defined() ? shape_string(next.dims())
                                          : std::string("(undefined)")) +
                          ", expected " + shape_string(x.dims()));
      }
      x = next;
    }
  }
  return pyramid;
}

FeaturePyramid extract_pyramid(const ParamStore& params, const ModelConfig& cfg,
                               const Var& image, Branch branch,
                               const StageOverrides& overrides) {
  auto shapes = pyramid_shapes(cfg);
  for (int k = 0; k < 5; ++k) {
    if (overrides[k].defined() && overrides[k].dims() != shapes[k]) {
      throw ConfigError("override for level " + std::to_string(k + 1) +
                        " has shape " + shape_string(overrides[k].dims()) +
                        ", expected " + shape_string(shapes[k]));
    }
  }
  return extract_pyramid_hooked(
      params, cfg, image, branch, [&overrides](int level, const Var& f) {
        const Var& o = overrides[level - 1];
        return o.defined() ? o : f;
      });
}

}  // namespace vsod
