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

#ifndef VSOD_CONFIG_HPP_
#define VSOD_CONFIG_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vsod {

enum class Profile { kToy, kFull };

// Which branches produce a prediction: motion only (+M), appearance only
// (+A), or the full dual-branch model (+M+A).
enum class Mode { kM, kA, kMA };

// Channel descriptor fed to the 7x7 spatial-attention convolution.
enum class SpatialPool {
  kMaxMean,  // stacked channel-wise max and mean (2 channels)
  kMax,      // channel-wise max only (1 channel)
};

// Switchboard for the ablation variants. Flags that a mode does not use are
// inert rather than errors: mode A ignores ca/sa/t_pd/teaching, mode M
// ignores ca/sa/s_pd/teaching.
struct AblationSpec {
  bool dual_branch = true;
  bool ca = true;
  bool sa = true;
  bool t_pd = true;
  bool s_pd = true;
  bool teaching = true;
  Mode mode = Mode::kMA;

  // Throws ConfigError on contradictory flags.
  void validate() const;

  bool uses_motion() const { return mode != Mode::kA; }
  bool uses_appearance() const { return mode != Mode::kM; }
  bool uses_modulator() const { return mode == Mode::kMA && (ca || sa); }
  bool uses_teaching() const { return mode == Mode::kMA && teaching; }

  // Variant ids: "1".."6" (ablation rows), "OUR"/"MA" (full model), "M", "A".
  static AblationSpec preset(std::string_view id);
  static const std::vector<std::string>& preset_ids();

  friend bool operator==(const AblationSpec&, const AblationSpec&) = default;
};

struct ModelConfig {
  Profile profile = Profile::kToy;
  int input_size = 64;
  std::array<int, 5> widths{8, 16, 32, 64, 128};
  std::array<int, 5> strides{2, 4, 8, 16, 32};
  int ca_reduction = 4;
  int decoder_width = 16;
  SpatialPool spatial_pool = SpatialPool::kMaxMean;
  AblationSpec ablation;
  std::uint64_t seed = 0;

  static ModelConfig toy();
  // ResNet50-width pyramid at 352x352.
  static ModelConfig full();
  static ModelConfig for_profile(Profile p);

  // Throws ConfigError when invalid.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

std::string to_string(Profile p);
std::string to_string(Mode m);
std::string to_string(SpatialPool p);
Profile parse_profile(std::string_view s);
Mode parse_mode(std::string_view s);

// Canonical JSON text (sorted keys, no whitespace variation).
std::string to_json(const ModelConfig& cfg, int indent = 2);
std::string to_json(const AblationSpec& spec, int indent = 2);

// Missing keys take the defaults of the document's "profile" (toy when
// absent); unknown keys raise ConfigError.
ModelConfig model_config_from_json(std::string_view text);
AblationSpec ablation_from_json(std::string_view text);

// FNV-1a over the canonical compact JSON.
std::uint64_t config_hash(const ModelConfig& cfg);
std::string hash_hex(std::uint64_t h);

// Library version, "major.minor.patch".
std::string library_version();

}  // namespace vsod

#endif  // VSOD_CONFIG_HPP_
