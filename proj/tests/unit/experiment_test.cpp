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

#include "test_support.hpp"
#include "vsod/errors.hpp"
#include "vsod/experiment.hpp"

namespace {

namespace fs = std::filesystem;
using testing_support::TempDir;
using testing_support::count_files;

const vsod::Dataset& small_set(int canvas) {
  static TempDir dir("vsod-exp");
  static std::map<int, vsod::Dataset> cache;
  auto it = cache.find(canvas);
  if (it != cache.end()) return it->second;
  vsod::SynthSpec spec = testing_support::small_spec(2, 5, 3);
  spec.canvas = canvas;
  const fs::path root = dir / ("c" + std::to_string(canvas));
  vsod::synth_generate(spec, root);
  return cache.emplace(canvas, vsod::load_dataset(root)).first->second;
}

TEST(Quantize, RoundsToEightBitGrid) {
  vsod::Tensor p({1, 1, 4}, std::vector<double>{0.0, 0.5, 1.2, 0.0019});
  vsod::Tensor q = vsod::quantize8(p);
  EXPECT_EQ(q[0], 0.0);
  EXPECT_EQ(q[1], 128.0 / 255.0);
  EXPECT_EQ(q[2], 1.0);
  EXPECT_EQ(q[3], 0.0);
}

TEST(Predict, OneMapPerSampleAndOptionalTeacherMaps) {
  TempDir out;
  vsod::GtNet model(vsod::ModelConfig::toy());
  const int n = vsod::predict_dataset(model, small_set(64), out / "p",
                                      {.emit_teacher = true});
  EXPECT_EQ(n, 8);
  for (const auto& seq : small_set(64).sequences) {
    EXPECT_EQ(count_files(out / "p" / seq), 4);
    EXPECT_EQ(count_files(out / "p" / seq / "teacher"), 4);
    EXPECT_FALSE(fs::exists(out / "p" / seq / "0001.png"));
  }
}

TEST(Predict, ByteDeterministic) {
  TempDir out;
  vsod::GtNet model(vsod::ModelConfig::toy());
  vsod::predict_dataset(model, small_set(64), out / "a");
  vsod::predict_dataset(model, small_set(64), out / "b");
  EXPECT_EQ(testing_support::tree_bytes(out / "a"),
            testing_support::tree_bytes(out / "b"));
}

TEST(Predict, SizeMismatchNeedsResize) {
  TempDir out;
  vsod::GtNet model(vsod::ModelConfig::toy());
  EXPECT_THROW(vsod::predict_dataset(model, small_set(48), out / "x"),
               vsod::InputError);
  EXPECT_EQ(vsod::predict_dataset(model, small_set(48), out / "y", {.resize = true}), 8);
  const auto img = vsod::read_png(out / "y" / small_set(48).sequences[0] / "0002.png");
  EXPECT_EQ(img.width, 48);
  EXPECT_EQ(img.height, 48);
}

TEST(Predict, AppearanceModelWritesNoTeacherMaps) {
  TempDir out;
  vsod::ModelConfig cfg = vsod::ModelConfig::toy();
  cfg.ablation = vsod::AblationSpec::preset("A");
  vsod::GtNet model(cfg);
  vsod::predict_dataset(model, small_set(64), out / "p", {.emit_teacher = true});
  EXPECT_FALSE(fs::exists(out / "p" / small_set(64).sequences[0] / "teacher"));
}

TEST(Experiment, DefaultsAndJsonRoundTrip) {
  vsod::ModelConfig m = vsod::ModelConfig::toy();
  m.seed = 12;
  const vsod::ExperimentConfig c = vsod::default_experiment(m);
  EXPECT_EQ(c.teacher.stage, vsod::Stage::kTeacher);
  EXPECT_EQ(c.joint.base_lr, 1e-4);
  EXPECT_EQ(c.joint.seed, 12u);
  const vsod::ExperimentConfig back = vsod::experiment_from_json(vsod::to_json(c));
  EXPECT_EQ(vsod::to_json(back), vsod::to_json(c));
  EXPECT_THROW(vsod::experiment_from_json(R"({"model": {}, "bogus": 1})"),
               vsod::ConfigError);
}

TEST(Ablation, TinyRunIsReproducibleWithTableSchema) {
  vsod::ExperimentConfig c = vsod::default_experiment(vsod::ModelConfig::toy());
  for (vsod::TrainConfig* t : {&c.teacher, &c.student, &c.joint}) {
    t->epochs = 1;
    t->max_steps = 2;
  }
  const std::vector<std::string> variants{"M", "A", "4", "OUR"};
  auto a = vsod::run_ablation(c, variants, small_set(64), {small_set(64)});
  auto b = vsod::run_ablation(c, variants, small_set(64), {small_set(64)});
  EXPECT_EQ(vsod::ablation_csv(a), vsod::ablation_csv(b));
  EXPECT_EQ(vsod::ablation_json(a), vsod::ablation_json(b));
  const std::string csv = vsod::ablation_csv(a);
  const std::string id = small_set(64).id;
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "variant," + id + "_M," + id + "_F," + id + "_S");
  ASSERT_EQ(a.rows.size(), 4u);
  EXPECT_EQ(a.rows[3].variant, "OUR");
  EXPECT_THROW(vsod::run_ablation(c, {"9"}, small_set(64), {small_set(64)}),
               vsod::ConfigError);
}

}  // namespace
