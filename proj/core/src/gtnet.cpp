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

#include "vsod/gtnet.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vsod/decoder.hpp"
#include "vsod/errors.hpp"
#include "vsod/modulator.hpp"

namespace vsod {
namespace {

using nlohmann::json;

constexpr std::string_view kTeacherHead = "gtnet.teacher_head";
constexpr std::string_view kNaiveStudent = "gtnet.naive_student";

AblationSpec with_mode(AblationSpec a, Mode m) {
  a.mode = m;
  a.dual_branch = m == Mode::kMA;
  return a;
}

Var conv_named(const ParamStore& params, const std::string& name, const Var& x,
               Conv2dSpec spec = {}) {
  return conv2d(x, params.get(name + ".weight"), params.get(name + ".bias"),
                spec);
}

// Variant #4: 1x1 projection of r_5, upsampled to stride 8.
Var teacher_head_substitute(const ParamStore& params, const Var& f5,
                            int side8) {
  Var r5 = rf_block(params, kTeacherDecoder, 5, f5);
  Var z = conv_named(params, std::string(kTeacherHead), r5);
  return resize_bilinear(z, side8, side8);
}

// Variant #5: project each level, upsample-add top-down, one 3x3 conv, head.
Var naive_student(const ParamStore& params, const Var& f3, const Var& f4,
                  const Var& f5) {
  const std::string p(kNaiveStudent);
  Var s = conv_named(params, p + ".proj5", f5);
  Var s4 = conv_named(params, p + ".proj4", f4);
  s = add(resize_bilinear(s, s4.value().height(), s4.value().width()), s4);
  Var s3 = conv_named(params, p + ".proj3", f3);
  s = add(resize_bilinear(s, s3.value().height(), s3.value().width()), s3);
  s = relu(conv_named(params, p + ".conv", s, {1, 1, 1}));
  return conv_named(params, p + ".head", s);
}

void check_mask_domain(const Tensor& mask) {
  for (double v : mask.data()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DomainError("teaching mask value " + std::to_string(v) +
                        " outside [0,1]");
    }
  }
}

}  // namespace

const SaliencyMap& ModelOutput::prediction() const {
  if (z_a) return *z_a;
  if (z_m) return *z_m;
  throw ConfigError("model output holds no saliency map");
}

EffectiveGraph apply_ablation(const AblationSpec& a) {
  a.validate();
  EffectiveGraph g;
  g.motion_branch = a.uses_motion();
  g.appearance_branch = a.uses_appearance();
  if (a.mode == Mode::kM) {
    g.teacher_partial_decoder = true;
    return g;
  }
  g.student_partial_decoder = a.s_pd;
  g.naive_student = !a.s_pd;
  if (a.mode == Mode::kA) return g;
  g.fusion = true;
  g.channel_attention = a.ca;
  g.spatial_attention = a.sa;
  g.teacher_partial_decoder = a.t_pd;
  g.teacher_head_substitute = !a.t_pd;
  g.teaching = a.teaching;
  return g;
}

ParamLayout parameter_layout(const ModelConfig& cfg) {
  cfg.validate();
  const EffectiveGraph g = apply_ablation(cfg.ablation);
  const std::array<int, 3> top{cfg.widths[2], cfg.widths[3], cfg.widths[4]};
  const int w = cfg.decoder_width;
  ParamLayout layout;
  if (g.motion_branch) {
    append_backbone_layout(layout, cfg, Branch::kMotion);
    if (g.teacher_partial_decoder) {
      append_partial_decoder_layout(layout, kTeacherDecoder, top, w);
    } else {
      append_rf_block_layout(layout, kTeacherDecoder, 5, top[2], w);
      const std::string h(kTeacherHead);
      layout.push_back({h + ".weight", {1, w, 1, 1}, Init::kLecunNormal});
      layout.push_back({h + ".bias", {1}, Init::kZeros});
    }
  }
  if (g.appearance_branch) {
    append_backbone_layout(layout, cfg, Branch::kAppearance);
    if (g.student_partial_decoder) {
      append_partial_decoder_layout(layout, kStudentDecoder, top, w);
    } else {
      const std::string p(kNaiveStudent);
      for (int k = 3; k <= 5; ++k) {
        const std::string n = p + ".proj" + std::to_string(k);
        layout.push_back({n + ".weight", {w, top[k - 3], 1, 1}, Init::kLecunNormal});
        layout.push_back({n + ".bias", {w}, Init::kZeros});
      }
      layout.push_back({p + ".conv.weight", {w, w, 3, 3}, Init::kHeNormal});
      layout.push_back({p + ".conv.bias", {w}, Init::kZeros});
      layout.push_back({p + ".head.weight", {1, w, 1, 1}, Init::kLecunNormal});
      layout.push_back({p + ".head.bias", {1}, Init::kZeros});
    }
  }
  if (g.fusion) append_modulator_layout(layout, cfg);
  return layout;
}

ParamStore init_parameters(const ModelConfig& cfg, std::uint64_t seed) {
  return ParamStore(parameter_layout(cfg), seed);
}

Var explicit_teach(const Var& f_tm, const Var& mask_prob, int level) {
  if (level < 3 || level > 5) {
    throw ConfigError("teaching applies to levels 3..5, not " +
                      std::to_string(level));
  }
  const Tensor& f = f_tm.value();
  const Tensor& m = mask_prob.value();
  if (f.rank() != 3 || m.rank() != 3 || m.channels() != 1) {
    throw ShapeError("teaching needs a (C,H,W) feature and a (1,h,w) mask, got " +
                     f.shape_string() + " and " + m.shape_string());
  }
  check_mask_domain(m);
  Var resized = resize_bilinear(mask_prob, f.height(), f.width());
  return add(f_tm, mul(f_tm, resized));
}

GtNet::GtNet(ModelConfig cfg) : cfg_(std::move(cfg)) {
  params_ = init_parameters(cfg_, cfg_.seed);
}

GtNet::GtNet(ModelConfig cfg, ParamStore params)
    : cfg_(std::move(cfg)), params_(std::move(params)) {
  ParamLayout layout = parameter_layout(cfg_);
  if (layout.size() != params_.size()) {
    throw ConfigError("parameter set has " + std::to_string(params_.size()) +
                      " tensors, configuration declares " +
                      std::to_string(layout.size()));
  }
  for (const auto& spec : layout) {
    Var v = params_.find(spec.name);
    if (!v.defined()) throw ConfigError("missing parameter " + spec.name);
    if (v.dims() != spec.dims) {
      throw ConfigError("parameter " + spec.name + " has shape " +
                        shape_string(v.dims()) + ", expected " +
                        shape_string(spec.dims));
    }
  }
}

ModelOutput GtNet::forward(const Tensor& frame, const Tensor* flow,
                           const ForwardOptions& opts) const {
  AblationSpec ablation = cfg_.ablation;
  if (opts.mode) {
    ablation = with_mode(ablation, *opts.mode);
    if ((*opts.mode != Mode::kA && !cfg_.ablation.uses_motion()) ||
        (*opts.mode != Mode::kM && !cfg_.ablation.uses_appearance())) {
      throw ConfigError("model built for mode " + to_string(cfg_.ablation.mode) +
                        " cannot run mode " + to_string(*opts.mode));
    }
  }
  EffectiveGraph g = apply_ablation(ablation);
  if (opts.mode && g.motion_branch) {
    // The teacher decoder structure is fixed by the parameters present.
    const EffectiveGraph built = apply_ablation(cfg_.ablation);
    g.teacher_partial_decoder = built.teacher_partial_decoder;
    g.teacher_head_substitute = built.teacher_head_substitute;
  }
  const int side = cfg_.input_size;
  const int side8 = side / 8;

  ModelOutput out;
  FeaturePyramid motion;
  if (g.motion_branch) {
    if (flow == nullptr || flow->empty()) {
      throw InputError("mode " + to_string(ablation.mode) +
                       " requires a flow image");
    }
    motion = extract_pyramid(params_, cfg_, Var::constant(*flow),
                             Branch::kMotion);
    if (g.teacher_partial_decoder) {
      out.z_m_logits_s8 = partial_decode(params_, kTeacherDecoder,
                                         motion.level(3), motion.level(4),
                                         motion.level(5))
                              .logits;
    } else {
      out.z_m_logits_s8 = teacher_head_substitute(params_, motion.level(5),
                                                  side8);
    }
  }

  if (g.appearance_branch) {
    std::array<Var, 5> fused;
    ModelConfig mod_cfg = cfg_;
    mod_cfg.ablation = ablation;
    StageHook hook = [&](int k, const Var& f_a) {
      Var f = f_a;
      if (g.fusion) {
        f = implicit_guidance_fuse(f_a, motion.level(k),
                                   modulator_params(params_, mod_cfg, k));
      }
      fused[k - 1] = f;
      return f;
    };
    extract_pyramid_hooked(params_, cfg_, Var::constant(frame),
                           Branch::kAppearance, hook);

    std::array<Var, 3> taught{fused[2], fused[3], fused[4]};
    if (g.teaching) {
      Var mask = opts.zero_teaching_mask
                     ? Var::constant(Tensor({1, side8, side8}, 0.0))
                     : sigmoid(out.z_m_logits_s8);
      for (int k = 3; k <= 5; ++k) {
        taught[k - 3] = explicit_teach(fused[k - 1], mask, k);
      }
    }
    if (g.student_partial_decoder) {
      out.z_a_logits_s8 = partial_decode(params_, kStudentDecoder, taught[0],
                                         taught[1], taught[2])
                              .logits;
    } else {
      out.z_a_logits_s8 = naive_student(params_, taught[0], taught[1],
                                        taught[2]);
    }
  }

  if (out.z_m_logits_s8.defined()) {
    out.z_m_logits = resize_bilinear(out.z_m_logits_s8, side, side);
    out.z_m = SaliencyMap{sigmoid(out.z_m_logits.value()),
                          SaliencyMap::Domain::kProbability};
  }
  if (out.z_a_logits_s8.defined()) {
    out.z_a_logits = resize_bilinear(out.z_a_logits_s8, side, side);
    out.z_a = SaliencyMap{sigmoid(out.z_a_logits.value()),
                          SaliencyMap::Domain::kProbability};
  }
  return out;
}

const std::vector<std::string>& teacher_prefixes() {
  static const std::vector<std::string> p{"backbone.motion.",
                                          "decoder.teacher.",
                                          std::string(kTeacherHead) + "."};
  return p;
}

const std::vector<std::string>& student_prefixes() {
  static const std::vector<std::string> p{"backbone.appearance.",
                                          "decoder.student.",
                                          std::string(kNaiveStudent) + "."};
  return p;
}

void save_checkpoint(const std::filesystem::path& dir, const GtNet& model,
                     const CheckpointInfo& info) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream blob(dir / "model.bin", std::ios::binary);
    if (!blob) throw IoError("cannot write " + (dir / "model.bin").string());
    model.params().save(blob);
  }
  const ModelConfig& cfg = model.config();
  json manifest{{"format", "vsod-checkpoint-1"},
                {"config", json::parse(to_json(cfg))},
                {"ablation", json::parse(to_json(cfg.ablation))},
                {"seed", cfg.seed},
                {"stage", info.stage},
                {"epoch", info.epoch},
                {"config_hash", hash_hex(config_hash(cfg))},
                {"parameter_count", model.params().scalar_count()}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::filesystem::path& dir,
                           const ModelConfig* expected) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("no checkpoint manifest in " + dir.string());
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("corrupt checkpoint manifest: " + std::string(e.what()));
  }
  Checkpoint ckpt;
  ckpt.config = model_config_from_json(manifest.at("config").dump());
  const std::string recorded = manifest.at("config_hash").get<std::string>();
  if (hash_hex(config_hash(ckpt.config)) != recorded) {
    throw ConfigError("checkpoint config hash mismatch in " + dir.string() +
                      ": manifest records " + recorded);
  }
  if (expected && config_hash(*expected) != config_hash(ckpt.config)) {
    throw ConfigError("checkpoint config hash " + recorded +
                      " does not match the requested config " +
                      hash_hex(config_hash(*expected)));
  }
  ckpt.info.stage = manifest.value("stage", std::string());
  ckpt.info.epoch = manifest.value("epoch", 0);
  std::ifstream blob(dir / "model.bin", std::ios::binary);
  if (!blob) throw IoError("no model.bin in " + dir.string());
  ckpt.params = ParamStore::load(blob);
  // Validates names and shapes against the configuration.
  GtNet check(ckpt.config, ckpt.params);
  ckpt.params = std::move(check.params());
  return ckpt;
}

}  // namespace vsod
