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

#include "vsod/decoder.hpp"

#include "vsod/errors.hpp"

namespace vsod {
namespace {

std::string join(std::string_view decoder, const std::string& rest) {
  return std::string(decoder) + "." + rest;
}

void push_conv(ParamLayout& layout, const std::string& name, int out, int in,
               int k, Init init = Init::kHeNormal) {
  layout.push_back({name + ".weight", {out, in, k, k}, init});
  layout.push_back({name + ".bias", {out}, Init::kZeros});
}

Var conv(const ParamStore& params, const std::string& name, const Var& x,
         Conv2dSpec spec = {}) {
  return conv2d(x, params.get(name + ".weight"), params.get(name + ".bias"),
                spec);
}

void check_level(int level) {
  if (level < 3 || level > 5) {
    throw ConfigError("receptive-field blocks exist for levels 3..5, not " +
                      std::to_string(level));
  }
}

// g<upsample(src); W>: bilinear upsample to `like`, 3x3 conv, rectifier.
Var broadcast_term(const ParamStore& params, const std::string& name,
                   const Var& src, const Var& like) {
  Var up = resize_bilinear(src, like.value().height(), like.value().width());
  return relu(conv(params, name, up, {1, 1, 1}));
}

void check_pair(const Var& lo, const Var& hi) {
  const Tensor& a = lo.value();
  const Tensor& b = hi.value();
  if (a.rank() != 3 || b.rank() != 3 || a.channels() != b.channels() ||
      a.height() != 2 * b.height() || a.width() != 2 * b.width()) {
    throw ShapeError("decoder levels must share channels and step by 2x, got " +
                     a.shape_string() + " and " + b.shape_string());
  }
}

}  // namespace

void append_rf_block_layout(ParamLayout& layout, std::string_view decoder,
                            int level, int in_channels, int width) {
  check_level(level);
  const std::string p = join(decoder, "rf" + std::to_string(level));
  push_conv(layout, p + ".b0", width, in_channels, 1, Init::kLecunNormal);
  for (int b = 1; b <= 3; ++b) {
    const std::string br = p + ".b" + std::to_string(b);
    push_conv(layout, br + ".reduce", width, in_channels, 1, Init::kLecunNormal);
    push_conv(layout, br + ".dilated", width, width, 3, Init::kLecunNormal);
  }
  push_conv(layout, p + ".fuse", width, 4 * width, 1, Init::kLecunNormal);
  push_conv(layout, p + ".shortcut", width, in_channels, 1, Init::kLecunNormal);
}

void append_partial_decoder_layout(ParamLayout& layout,
                                   std::string_view decoder,
                                   const std::array<int, 3>& in_channels,
                                   int width) {
  for (int level = 3; level <= 5; ++level) {
    append_rf_block_layout(layout, decoder, level, in_channels[level - 3],
                           width);
  }
  push_conv(layout, join(decoder, "broadcast.w4_3"), width, width, 3);
  push_conv(layout, join(decoder, "broadcast.w5_3"), width, width, 3);
  push_conv(layout, join(decoder, "broadcast.w5_4"), width, width, 3);
  push_conv(layout, join(decoder, "unet.conv4"), width, width, 3);
  push_conv(layout, join(decoder, "unet.conv3"), width, width, 3);
  push_conv(layout, join(decoder, "unet.head"), 1, width, 1,
            Init::kLecunNormal);
}

Var rf_block(const ParamStore& params, std::string_view decoder, int level,
             const Var& f) {
  check_level(level);
  const std::string p = join(decoder, "rf" + std::to_string(level));
  const Var& w0 = params.get(p + ".b0.weight");
  if (f.value().rank() != 3 || f.value().channels() != w0.value().dim(1)) {
    throw ConfigError(p + " expects " + std::to_string(w0.value().dim(1)) +
                      " channels, got " + shape_string(f.dims()));
  }
  std::vector<Var> branches;
  branches.push_back(conv(params, p + ".b0", f));
  for (int b = 1; b <= 3; ++b) {
    const std::string br = p + ".b" + std::to_string(b);
    const int d = kRfDilations[b - 1];
    Var reduced = conv(params, br + ".reduce", f);
    branches.push_back(conv(params, br + ".dilated", reduced, {1, d, d}));
  }
  Var fused = conv(params, p + ".fuse", concat_channels(branches));
  return relu(add(fused, conv(params, p + ".shortcut", f)));
}

BroadcastTriple feature_broadcast(const ParamStore& params,
                                  std::string_view decoder,
                                  const RefinedTriple& r) {
  check_pair(r.r3, r.r4);
  check_pair(r.r4, r.r5);
  BroadcastTriple out;
  out.p5 = r.r5;
  out.p4 = mul(r.r4, broadcast_term(params, join(decoder, "broadcast.w5_4"),
                                    r.r5, r.r4));
  Var g43 = broadcast_term(params, join(decoder, "broadcast.w4_3"), r.r4, r.r3);
  Var g53 = broadcast_term(params, join(decoder, "broadcast.w5_3"), r.r5, r.r3);
  out.p3 = mul(mul(r.r3, g43), g53);
  return out;
}

DecodedMask unet_aggregate(const ParamStore& params, std::string_view decoder,
                           const BroadcastTriple& p) {
  check_pair(p.p3, p.p4);
  check_pair(p.p4, p.p5);
  const Tensor& t4 = p.p4.value();
  const Tensor& t3 = p.p3.value();
  Var u4 = add(resize_bilinear(p.p5, t4.height(), t4.width()), p.p4);
  u4 = relu(conv(params, join(decoder, "unet.conv4"), u4, {1, 1, 1}));
  Var u3 = add(resize_bilinear(u4, t3.height(), t3.width()), p.p3);
  u3 = relu(conv(params, join(decoder, "unet.conv3"), u3, {1, 1, 1}));
  return {conv(params, join(decoder, "unet.head"), u3)};
}

DecodedMask partial_decode(const ParamStore& params, std::string_view decoder,
                           const Var& f3, const Var& f4, const Var& f5) {
  RefinedTriple r{rf_block(params, decoder, 3, f3),
                  rf_block(params, decoder, 4, f4),
                  rf_block(params, decoder, 5, f5)};
  return unet_aggregate(params, decoder, feature_broadcast(params, decoder, r));
}

}  // namespace vsod
