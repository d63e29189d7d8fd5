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

#include <gtest/gtest.h>

#include <algorithm>

#include "vsod/config.hpp"
#include "vsod/errors.hpp"

namespace {

using vsod::AblationSpec;
using vsod::ModelConfig;

TEST(Config, ProfilesValidate) {
  EXPECT_NO_THROW(ModelConfig::toy().validate());
  EXPECT_NO_THROW(ModelConfig::full().validate());
  EXPECT_EQ(ModelConfig::full().widths, (std::array<int, 5>{64, 256, 512, 1024, 2048}));
  ModelConfig bad = ModelConfig::toy();
  bad.input_size = 50;
  EXPECT_THROW(bad.validate(), vsod::ConfigError);
  bad = ModelConfig::toy();
  bad.ca_reduction = 3;
  EXPECT_THROW(bad.validate(), vsod::ConfigError);
}

TEST(Config, JsonRoundTripAndHash) {
  ModelConfig c = ModelConfig::toy();
  c.seed = 17;
  c.ablation = AblationSpec::preset("3");
  c.spatial_pool = vsod::SpatialPool::kMax;
  const ModelConfig back = vsod::model_config_from_json(vsod::to_json(c));
  EXPECT_EQ(back, c);
  EXPECT_EQ(vsod::config_hash(back), vsod::config_hash(c));
  ModelConfig d = c;
  d.seed = 18;
  EXPECT_NE(vsod::config_hash(d), vsod::config_hash(c));
  EXPECT_EQ(vsod::hash_hex(0x1234).size(), 16u);
}

TEST(Config, MissingKeysTakeProfileDefaults) {
  const ModelConfig f = vsod::model_config_from_json(R"({"profile": "full"})");
  EXPECT_EQ(f, ModelConfig::full());
  const ModelConfig t = vsod::model_config_from_json("{}");
  EXPECT_EQ(t, ModelConfig::toy());
  EXPECT_THROW(vsod::model_config_from_json(R"({"width": 3})"), vsod::ConfigError);
  EXPECT_THROW(vsod::model_config_from_json("not json"), vsod::ConfigError);
}

TEST(Config, PresetsCoverAblationRows) {
  for (const auto& id : AblationSpec::preset_ids()) {
    EXPECT_NO_THROW(AblationSpec::preset(id).validate()) << id;
  }
  EXPECT_FALSE(AblationSpec::preset("1").ca);
  EXPECT_FALSE(AblationSpec::preset("1").sa);
  EXPECT_FALSE(AblationSpec::preset("2").sa);
  EXPECT_TRUE(AblationSpec::preset("2").ca);
  EXPECT_FALSE(AblationSpec::preset("3").ca);
  EXPECT_FALSE(AblationSpec::preset("4").t_pd);
  EXPECT_FALSE(AblationSpec::preset("5").s_pd);
  EXPECT_FALSE(AblationSpec::preset("6").teaching);
  EXPECT_EQ(AblationSpec::preset("MA"), AblationSpec::preset("OUR"));
  EXPECT_FALSE(AblationSpec::preset("A").uses_motion());
  EXPECT_FALSE(AblationSpec::preset("M").uses_appearance());
}

TEST(Config, ParseErrors) {
  EXPECT_THROW(vsod::parse_profile("medium"), vsod::ConfigError);
  EXPECT_THROW(vsod::parse_mode("MAM"), vsod::ConfigError);
  EXPECT_EQ(vsod::parse_mode("MA"), vsod::Mode::kMA);
}

TEST(Config, LibraryVersionIsSemantic) {
  const std::string v = vsod::library_version();
  EXPECT_EQ(std::count(v.begin(), v.end(), '.'), 2);
}

}  // namespace
