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

#ifndef VSOD_TRAINING_HPP_
#define VSOD_TRAINING_HPP_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "vsod/data.hpp"
#include "vsod/gtnet.hpp"

namespace vsod {

enum class Stage { kTeacher, kStudent, kJoint };

std::string to_string(Stage s);
Stage parse_stage(std::string_view s);

struct TrainConfig {
  Stage stage = Stage::kJoint;
  int epochs = 30;
  long max_steps = 0;  // 0: no cap beyond `epochs`
  int batch_size = 4;
  double base_lr = 1e-4;
  double decay = 0.1;
  int decay_period = 25;
  double lambda_teacher = 1.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

std::string to_json(const TrainConfig& cfg, int indent = 2);
TrainConfig train_config_from_json(std::string_view text);

// base_lr * decay^floor(epoch / period).
double lr_schedule(int epoch, double base_lr = 1e-4, double decay = 0.1,
                   int period = 25);
double lr_schedule(const TrainConfig& cfg, int epoch);

// Mean-pixel BCE on the maps the stage supervises: Z_M (teacher), Z_A
// (student) or Z_A + lambda * Z_M (joint), all at input resolution.
Var stage_loss(const ModelOutput& out, const Tensor& gt, Stage stage,
               double lambda_teacher = 1.0);

// Graph restriction used while training `stage` on `model`. Throws
// ConfigError when the model cannot run the stage.
ForwardOptions stage_forward_options(const ModelConfig& model, Stage stage);

// Adam over the parameters that received a gradient in the current step.
class Adam {
 public:
  Adam(double beta1, double beta2, double eps)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(ParamStore& params, double lr);
  long steps() const { return t_; }

 private:
  struct Moments {
    Tensor m, v;
    long t = 0;
  };
  double beta1_, beta2_, eps_;
  long t_ = 0;
  std::map<std::string, Moments, std::less<>> state_;
};

struct LossRecord {
  long step = 0;
  int epoch = 0;
  double lr = 0;
  double loss = 0;
};

struct TrainResult {
  std::vector<LossRecord> trace;    // one row per optimizer step
  std::vector<double> epoch_loss;   // mean step loss per epoch
  long steps = 0;
  int epochs_run = 0;
};

using LogSink = std::function<void(const std::string&)>;

// Runs one curriculum stage in place on `model`. Raises DivergenceError on a
// non-finite logit or loss, ConfigError when the dataset lacks the inputs the
// stage consumes.
TrainResult train_stage(GtNet& model, const Dataset& data,
                        const TrainConfig& cfg, const LogSink& log = {});

// Loads the teacher and student stage parameters into a joint model. A
// missing checkpoint leaves the random initialisation and is reported through
// `log`.
void init_joint_from(GtNet& model, const ParamStore* teacher,
                     const ParamStore* student, const LogSink& log = {});

std::string loss_trace_csv(const TrainResult& result);

// Mean training-set loss / MAE of the stage-relevant prediction.
double dataset_mae(const GtNet& model, const Dataset& data,
                   const ForwardOptions& opts = {});

}  // namespace vsod

#endif  // VSOD_TRAINING_HPP_
