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

#include "vsod/config.hpp"

#include <cstdio>
#include <set>

#include "json.hpp"
#include "vsod/errors.hpp"
#include "vsod/params.hpp"

namespace vsod {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const char* what) {
  if (!j.is_object()) {
    throw ConfigError(std::string(what) + " must be a JSON object");
  }
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(std::string("unknown key '") + key + "' in " + what);
    }
  }
}

json ablation_json(const AblationSpec& a) {
  return json{{"dual_branch", a.dual_branch}, {"ca", a.ca},
              {"sa", a.sa},                   {"t_pd", a.t_pd},
              {"s_pd", a.s_pd},               {"teaching", a.teaching},
              {"mode", to_string(a.mode)}};
}

AblationSpec ablation_from(const json& j) {
  reject_unknown(j,
                 {"dual_branch", "ca", "sa", "t_pd", "s_pd", "teaching",
                  "mode"},
                 "ablation");
  AblationSpec a;
  try {
    if (j.contains("mode")) a.mode = parse_mode(j.at("mode").get<std::string>());
    a.dual_branch = j.value("dual_branch", a.mode == Mode::kMA);
    a.ca = j.value("ca", a.ca);
    a.sa = j.value("sa", a.sa);
    a.t_pd = j.value("t_pd", a.t_pd);
    a.s_pd = j.value("s_pd", a.s_pd);
    a.teaching = j.value("teaching", a.teaching);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("ablation: ") + e.what());
  }
  return a;
}

json config_json(const ModelConfig& c) {
  return json{{"profile", to_string(c.profile)},
              {"input_size", c.input_size},
              {"widths", c.widths},
              {"strides", c.strides},
              {"ca_reduction", c.ca_reduction},
              {"decoder_width", c.decoder_width},
              {"spatial_pool", to_string(c.spatial_pool)},
              {"ablation", ablation_json(c.ablation)},
              {"seed", c.seed}};
}

}  // namespace

void AblationSpec::validate() const {
  if (dual_branch != (mode == Mode::kMA)) {
    throw ConfigError(
        dual_branch
            ? "dual_branch requires mode MA"
            : "mode MA needs the motion branch as the source of guidance and "
              "of the teaching mask; dual_branch must be set");
  }
}

AblationSpec AblationSpec::preset(std::string_view id) {
  AblationSpec a;
  if (id == "OUR" || id == "MA" || id == "our") return a;
  if (id == "1") {
    a.ca = a.sa = false;
  } else if (id == "2") {
    a.sa = false;
  } else if (id == "3") {
    a.ca = false;
  } else if (id == "4") {
    a.t_pd = false;
  } else if (id == "5") {
    a.s_pd = false;
  } else if (id == "6") {
    a.teaching = false;
  } else if (id == "M") {
    a.mode = Mode::kM;
    a.dual_branch = false;
  } else if (id == "A") {
    a.mode = Mode::kA;
    a.dual_branch = false;
  } else {
    throw ConfigError("unknown variant id '" + std::string(id) + "'");
  }
  return a;
}

const std::vector<std::string>& AblationSpec::preset_ids() {
  static const std::vector<std::string> ids{"1", "2", "3", "4", "5",
                                            "6", "OUR", "M", "A", "MA"};
  return ids;
}

ModelConfig ModelConfig::toy() { return ModelConfig{}; }

ModelConfig ModelConfig::full() {
  ModelConfig c;
  c.profile = Profile::kFull;
  c.input_size = 352;
  c.widths = {64, 256, 512, 1024, 2048};
  c.ca_reduction = 16;
  c.decoder_width = 32;
  return c;
}

ModelConfig ModelConfig::for_profile(Profile p) {
  return p == Profile::kFull ? full() : toy();
}

void ModelConfig::validate() const {
  if (strides != std::array<int, 5>{2, 4, 8, 16, 32}) {
    throw ConfigError("strides are fixed to (2,4,8,16,32)");
  }
  if (input_size <= 0 || input_size % 32 != 0) {
    throw ConfigError("input_size " + std::to_string(input_size) +
                      " must be a positive multiple of 32");
  }
  for (int i = 0; i < 5; ++i) {
    if (widths[i] <= 0) throw ConfigError("widths must be positive");
    if (ca_reduction <= 0 || widths[i] % ca_reduction != 0) {
      throw ConfigError("ca_reduction " + std::to_string(ca_reduction) +
                        " must divide width " + std::to_string(widths[i]));
    }
  }
  if (decoder_width <= 0) throw ConfigError("decoder_width must be positive");
  ablation.validate();
}

std::string to_string(Profile p) { return p == Profile::kFull ? "full" : "toy"; }

std::string to_string(Mode m) {
  switch (m) {
    case Mode::kM:
      return "M";
    case Mode::kA:
      return "A";
    case Mode::kMA:
      return "MA";
  }
  return "MA";
}

std::string to_string(SpatialPool p) {
  return p == SpatialPool::kMax ? "max" : "max_mean";
}

Profile parse_profile(std::string_view s) {
  if (s == "toy") return Profile::kToy;
  if (s == "full") return Profile::kFull;
  throw ConfigError("unknown profile '" + std::string(s) + "'");
}

Mode parse_mode(std::string_view s) {
  if (s == "M") return Mode::kM;
  if (s == "A") return Mode::kA;
  if (s == "MA") return Mode::kMA;
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

std::string to_json(const ModelConfig& cfg, int indent) {
  return config_json(cfg).dump(indent);
}

std::string to_json(const AblationSpec& spec, int indent) {
  return ablation_json(spec).dump(indent);
}

ModelConfig model_config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j,
                 {"profile", "input_size", "widths", "strides",
                  "ca_reduction", "decoder_width", "spatial_pool",
                  "ablation", "seed"},
                 "model config");
  try {
    Profile p = parse_profile(j.value("profile", std::string("toy")));
    ModelConfig c = ModelConfig::for_profile(p);
    c.input_size = j.value("input_size", c.input_size);
    if (j.contains("widths")) c.widths = j.at("widths").get<std::array<int, 5>>();
    if (j.contains("strides")) {
      c.strides = j.at("strides").get<std::array<int, 5>>();
    }
    c.ca_reduction = j.value("ca_reduction", c.ca_reduction);
    c.decoder_width = j.value("decoder_width", c.decoder_width);
    if (j.contains("spatial_pool")) {
      auto s = j.at("spatial_pool").get<std::string>();
      if (s == "max") {
        c.spatial_pool = SpatialPool::kMax;
      } else if (s == "max_mean") {
        c.spatial_pool = SpatialPool::kMaxMean;
      } else {
        throw ConfigError("unknown spatial_pool '" + s + "'");
      }
    }
    if (j.contains("ablation")) c.ablation = ablation_from(j.at("ablation"));
    c.seed = j.value("seed", c.seed);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
}

AblationSpec ablation_from_json(std::string_view text) {
  try {
    return ablation_from(json::parse(text));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("ablation is not valid JSON: ") + e.what());
  }
}

std::uint64_t config_hash(const ModelConfig& cfg) {
  return fnv1a64(config_json(cfg).dump());
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string library_version() {
#ifdef VSOD_VERSION
  return VSOD_VERSION;
#else
  return "0.0.0";
#endif
}

}  // namespace vsod
