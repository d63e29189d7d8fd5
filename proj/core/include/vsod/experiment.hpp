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

#ifndef VSOD_EXPERIMENT_HPP_
#define VSOD_EXPERIMENT_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "vsod/data.hpp"
#include "vsod/gtnet.hpp"
#include "vsod/metrics.hpp"
#include "vsod/training.hpp"

namespace vsod {

// round(p * 255) / 255, i.e. what an 8-bit saliency PNG stores.
Tensor quantize8(const Tensor& probability);

struct PredictOptions {
  bool emit_teacher = false;
  // Bilinearly resample inputs to the model size and maps back to the data
  // size; otherwise a size mismatch raises InputError.
  bool resize = false;
};

// Writes out/<seq>/<name>.png for every sample, plus out/<seq>/teacher/ maps
// when `emit_teacher` is set and the model produces Z_M. Returns the number
// of prediction maps written (teacher maps excluded).
int predict_dataset(const GtNet& model, const Dataset& data,
                    const std::filesystem::path& out,
                    const PredictOptions& opts = {});

// Runs the model on every sample and scores the 8-bit quantised prediction.
MetricReport evaluate_model(const GtNet& model, const Dataset& data,
                            const MetricOptions& opts = {});

struct ExperimentConfig {
  ModelConfig model;  // ablation field is replaced per variant
  TrainConfig teacher;
  TrainConfig student;
  TrainConfig joint;
  MetricOptions metrics;
};

ExperimentConfig default_experiment(const ModelConfig& model);
std::string to_json(const ExperimentConfig& cfg, int indent = 2);
ExperimentConfig experiment_from_json(std::string_view text);

struct VariantScores {
  std::string variant;
  std::vector<SequenceScores> per_dataset;  // aggregate row per test set
};

struct AblationTable {
  std::vector<std::string> datasets;
  std::vector<VariantScores> rows;
};

// Trains every variant through the staged curriculum and evaluates it on each
// test set. Teacher and student stages are shared between variants with the
// same decoder structure; "M" and "A" rows are those stage results.
AblationTable run_ablation(const ExperimentConfig& cfg,
                           const std::vector<std::string>& variants,
                           const Dataset& train,
                           const std::vector<Dataset>& tests,
                           const LogSink& log = {});

// variant, then <dataset>_M, <dataset>_F, <dataset>_S per test set.
std::string ablation_csv(const AblationTable& table);
std::string ablation_json(const AblationTable& table);

}  // namespace vsod

#endif  // VSOD_EXPERIMENT_HPP_
