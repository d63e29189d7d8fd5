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

// Dual-branch model assembly.
//
//   motion pyramid  --> teacher partial decoder --> Z_M
//        |  (modulated, added into the next appearance stage)
//   appearance pyramid --> f_tm_3..5 --(teaching with sigmoid(Z_M))--> f_et
//                      --> student partial decoder --> Z_A
//
// Both masks are produced as stride-8 logits, bilinearly upsampled to the
// input resolution and activated with a sigmoid for consumers.

#ifndef VSOD_GTNET_HPP_
#define VSOD_GTNET_HPP_

#include <filesystem>
#include <optional>
#include <string>

#include "vsod/autograd.hpp"
#include "vsod/backbone.hpp"
#include "vsod/config.hpp"
#include "vsod/params.hpp"

namespace vsod {

struct SaliencyMap {
  enum class Domain { kProbability, kLogit };
  Tensor values;  // (1, H, W)
  Domain domain = Domain::kProbability;
};

struct ModelOutput {
  std::optional<SaliencyMap> z_a;  // probability, input resolution
  std::optional<SaliencyMap> z_m;
  Var z_a_logits;  // input resolution; undefined when the branch is absent
  Var z_m_logits;
  Var z_a_logits_s8;  // raw decoder output at stride 8
  Var z_m_logits_s8;

  // Final prediction: Z_A when present, otherwise Z_M (mode M).
  const SaliencyMap& prediction() const;
};

// Components active for a given configuration.
struct EffectiveGraph {
  bool motion_branch = false;
  bool appearance_branch = false;
  bool fusion = false;
  bool channel_attention = false;
  bool spatial_attention = false;
  bool teacher_partial_decoder = false;
  bool teacher_head_substitute = false;  // 1x1 conv on r_5 (variant #4)
  bool student_partial_decoder = false;
  bool naive_student = false;  // upsample-add-conv (variant #5)
  bool teaching = false;
};

// Resolves the ablation switchboard; validates flags first.
EffectiveGraph apply_ablation(const AblationSpec& ablation);

ParamLayout parameter_layout(const ModelConfig& cfg);
ParamStore init_parameters(const ModelConfig& cfg, std::uint64_t seed);

// f_tm + f_tm * resize(mask_prob) with the mask broadcast over channels.
// Throws ConfigError for levels outside {3,4,5}, DomainError for mask values
// outside [0,1].
Var explicit_teach(const Var& f_tm, const Var& mask_prob, int level);

struct ForwardOptions {
  // Runs a single-branch graph on a dual-branch model (staged training).
  std::optional<Mode> mode;
  // Replaces sigmoid(Z_M) by zeros before teaching (equivalence checks).
  bool zero_teaching_mask = false;
};

class GtNet {
 public:
  // Parameters drawn from cfg.seed.
  explicit GtNet(ModelConfig cfg);
  // Adopts `params`; throws ConfigError unless they match the layout.
  GtNet(ModelConfig cfg, ParamStore params);

  const ModelConfig& config() const { return cfg_; }
  const ParamStore& params() const { return params_; }
  ParamStore& params() { return params_; }

  // `flow` may be null in mode A. Builds a graph when gradients are enabled.
  ModelOutput forward(const Tensor& frame, const Tensor* flow,
                      const ForwardOptions& opts = {}) const;

 private:
  ModelConfig cfg_;
  ParamStore params_;
};

// Parameter-name prefixes owned by each training stage.
const std::vector<std::string>& teacher_prefixes();
const std::vector<std::string>& student_prefixes();

struct CheckpointInfo {
  std::string stage;
  int epoch = 0;
};

struct Checkpoint {
  ModelConfig config;
  CheckpointInfo info;
  ParamStore params;
};

// Writes model.bin and manifest.json
// {config, ablation, seed, stage, epoch, config_hash} into `dir`.
void save_checkpoint(const std::filesystem::path& dir, const GtNet& model,
                     const CheckpointInfo& info);

// Verifies the manifest's config hash and, when `expected` is given, that it
// matches; throws ConfigError on mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& dir,
                           const ModelConfig* expected = nullptr);

}  // namespace vsod

#endif  // VSOD_GTNET_HPP_
