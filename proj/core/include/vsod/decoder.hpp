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

// Partial decoder over the top three pyramid levels, shared in structure by
// the teacher and the student (never in parameters):
//
//   r_k = rf_block(f_k)                                   k = 3, 4, 5
//   p_k = r_k * prod_{i>k} relu(conv3x3(upsample(r_i)))   feature broadcast
//   Z   = head(conv(up(conv(up(p_5) + p_4)) + p_3))        truncated top-down
//
// The mask Z stays in the logit domain at stride 8.

#ifndef VSOD_DECODER_HPP_
#define VSOD_DECODER_HPP_

#include <array>
#include <string>
#include <string_view>

#include "vsod/autograd.hpp"
#include "vsod/params.hpp"

namespace vsod {

inline constexpr std::string_view kTeacherDecoder = "decoder.teacher";
inline constexpr std::string_view kStudentDecoder = "decoder.student";

struct RefinedTriple {
  Var r3, r4, r5;
};

struct BroadcastTriple {
  Var p3, p4, p5;
};

// Single-channel logits at stride 8.
struct DecodedMask {
  Var logits;
};

// Dilation of the three dilated branches of the receptive-field block.
inline constexpr std::array<int, 3> kRfDilations{3, 5, 7};

void append_rf_block_layout(ParamLayout& layout, std::string_view decoder,
                            int level, int in_channels, int width);
void append_partial_decoder_layout(ParamLayout& layout,
                                   std::string_view decoder,
                                   const std::array<int, 3>& in_channels,
                                   int width);

// Four parallel branches (1x1; 1x1 -> 3x3 at dilations 3, 5, 7),
// concatenated and fused by 1x1, plus a 1x1 shortcut, then rectified.
// Throws ConfigError for levels outside {3,4,5}.
Var rf_block(const ParamStore& params, std::string_view decoder, int level,
             const Var& f);

// Throws ShapeError unless the triple has equal channels and exact 2x steps.
BroadcastTriple feature_broadcast(const ParamStore& params,
                                  std::string_view decoder,
                                  const RefinedTriple& r);

DecodedMask unet_aggregate(const ParamStore& params, std::string_view decoder,
                           const BroadcastTriple& p);

DecodedMask partial_decode(const ParamStore& params, std::string_view decoder,
                           const Var& f3, const Var& f4, const Var& f5);

}  // namespace vsod

#endif  // VSOD_DECODER_HPP_
