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

#include "vsod/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "json.hpp"
#include "vsod/errors.hpp"

namespace vsod {
namespace {

using nlohmann::json;

bool all_finite(const Tensor& t) {
  return std::all_of(t.data().begin(), t.data().end(),
                     [](double v) { return std::isfinite(v); });
}

void check_logits(const Var& logits, long step, const char* which) {
  if (logits.defined() && !all_finite(logits.value())) {
    throw DivergenceError(std::string("non-finite ") + which +
                              " logits at step " + std::to_string(step),
                          step);
  }
}

}  // namespace

std::string to_string(Stage s) {
  switch (s) {
    case Stage::kTeacher: return "teacher";
    case Stage::kStudent: return "student";
    case Stage::kJoint: return "joint";
  }
  return "joint";
}

Stage parse_stage(std::string_view s) {
  if (s == "teacher") return Stage::kTeacher;
  if (s == "student") return Stage::kStudent;
  if (s == "joint") return Stage::kJoint;
  throw ConfigError("unknown stage '" + std::string(s) + "'");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (max_steps < 0) throw ConfigError("max_steps must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(base_lr > 0)) throw ConfigError("base_lr must be positive");
  if (!(decay > 0 && decay < 1)) throw ConfigError("decay must lie in (0,1)");
  if (decay_period < 1) throw ConfigError("decay_period must be >= 1");
  if (!(lambda_teacher >= 0)) {
    throw ConfigError("lambda_teacher must be >= 0");
  }
  if (!(adam_beta1 >= 0 && adam_beta1 < 1 && adam_beta2 >= 0 &&
        adam_beta2 < 1 && adam_eps > 0)) {
    throw ConfigError("invalid Adam coefficients");
  }
}

std::string to_json(const TrainConfig& c, int indent) {
  json j{{"stage", to_string(c.stage)},
         {"epochs", c.epochs},
         {"max_steps", c.max_steps},
         {"batch_size", c.batch_size},
         {"base_lr", c.base_lr},
         {"decay", c.decay},
         {"decay_period", c.decay_period},
         {"lambda_teacher", c.lambda_teacher},
         {"adam_beta1", c.adam_beta1},
         {"adam_beta2", c.adam_beta2},
         {"adam_eps", c.adam_eps},
         {"seed", c.seed}};
  return j.dump(indent);
}

TrainConfig train_config_from_json(std::string_view text) {
  TrainConfig c;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw ConfigError("train config must be an object");
    const json defaults = json::parse(to_json(c, -1));
    for (const auto& [key, value] : j.items()) {
      if (!defaults.contains(key)) {
        throw ConfigError("unknown train config key '" + key + "'");
      }
    }
    if (j.contains("stage")) c.stage = parse_stage(j.at("stage").get<std::string>());
    auto get = [&j](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("epochs", c.epochs);
    get("max_steps", c.max_steps);
    get("batch_size", c.batch_size);
    get("base_lr", c.base_lr);
    get("decay", c.decay);
    get("decay_period", c.decay_period);
    get("lambda_teacher", c.lambda_teacher);
    get("adam_beta1", c.adam_beta1);
    get("adam_beta2", c.adam_beta2);
    get("adam_eps", c.adam_eps);
    get("seed", c.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad train config: ") + e.what());
  }
  c.validate();
  return c;
}

double lr_schedule(int epoch, double base_lr, double decay, int period) {
  if (epoch < 0) throw ConfigError("epoch must be >= 0");
  return base_lr * std::pow(decay, epoch / period);
}

double lr_schedule(const TrainConfig& cfg, int epoch) {
  return lr_schedule(epoch, cfg.base_lr, cfg.decay, cfg.decay_period);
}

Var stage_loss(const ModelOutput& out, const Tensor& gt, Stage stage,
               double lambda_teacher) {
  auto need = [](const Var& v, const char* which) {
    if (!v.defined()) {
      throw ConfigError(std::string("stage loss needs ") + which +
                        " but the model did not produce it");
    }
  };
  switch (stage) {
    case Stage::kTeacher:
      need(out.z_m_logits, "Z_M");
      return bce_with_logits_mean(out.z_m_logits, gt);
    case Stage::kStudent:
      need(out.z_a_logits, "Z_A");
      return bce_with_logits_mean(out.z_a_logits, gt);
    case Stage::kJoint:
      need(out.z_m_logits, "Z_M");
      need(out.z_a_logits, "Z_A");
      return add(bce_with_logits_mean(out.z_a_logits, gt),
                 scale(bce_with_logits_mean(out.z_m_logits, gt),
                       lambda_teacher));
  }
  throw ConfigError("unknown stage");
}

ForwardOptions stage_forward_options(const ModelConfig& model, Stage stage) {
  const Mode mode = model.ablation.mode;
  ForwardOptions opts;
  switch (stage) {
    case Stage::kTeacher:
      if (mode == Mode::kA) {
        throw ConfigError("teacher stage needs a model with a motion branch");
      }
      if (mode == Mode::kMA) opts.mode = Mode::kM;
      break;
    case Stage::kStudent:
      if (mode == Mode::kM) {
        throw ConfigError(
            "student stage needs a model with an appearance branch");
      }
      if (mode == Mode::kMA) opts.mode = Mode::kA;
      break;
    case Stage::kJoint:
      if (mode != Mode::kMA) {
        throw ConfigError("joint stage needs a dual-branch (+M+A) model, got " +
                          to_string(mode));
      }
      break;
  }
  return opts;
}

void Adam::step(ParamStore& params, double lr) {
  ++t_;
  for (auto& [name, var] : params.items()) {
    if (!var.has_grad()) continue;
    Moments& s = state_[name];
    Tensor& w = var.mutable_value();
    const Tensor& g = var.grad();
    if (s.m.empty()) {
      s.m = Tensor(w.dims(), 0.0);
      s.v = Tensor(w.dims(), 0.0);
    }
    ++s.t;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(s.t));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(s.t));
    for (std::size_t i = 0; i < w.numel(); ++i) {
      s.m[i] = beta1_ * s.m[i] + (1.0 - beta1_) * g[i];
      s.v[i] = beta2_ * s.v[i] + (1.0 - beta2_) * g[i] * g[i];
      w[i] -= lr * (s.m[i] / c1) / (std::sqrt(s.v[i] / c2) + eps_);
    }
  }
}

TrainResult train_stage(GtNet& model, const Dataset& data,
                        const TrainConfig& cfg, const LogSink& log) {
  cfg.validate();
  const ForwardOptions opts = stage_forward_options(model.config(), cfg.stage);
  if (data.samples.empty()) throw ConfigError("training dataset is empty");
  if (cfg.stage != Stage::kStudent && !data.has_flow()) {
    throw ConfigError(to_string(cfg.stage) +
                      " stage consumes flow images but dataset '" + data.id +
                      "' has none");
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Adam adam(cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  ParamStore& params = model.params();
  const double inv_batch = 1.0 / cfg.batch_size;

  TrainResult result;
  long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.max_steps > 0 && step >= cfg.max_steps) break;
    const double lr = lr_schedule(cfg, epoch);
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_sum = 0;
    long epoch_steps = 0;
    for (std::size_t begin = 0; begin < order.size();
         begin += cfg.batch_size) {
      if (cfg.max_steps > 0 && step >= cfg.max_steps) break;
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      for (auto& [name, var] : params.items()) var.mutable_grad() = Tensor();
      double batch_loss = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const VideoSample& s = data.samples[order[i]];
        const ModelOutput out = model.forward(
            s.frame, s.has_flow() ? &s.flow : nullptr, opts);
        check_logits(out.z_m_logits_s8, step, "Z_M");
        check_logits(out.z_a_logits_s8, step, "Z_A");
        Var loss = stage_loss(out, s.gt, cfg.stage, cfg.lambda_teacher);
        const double value = loss.value()[0];
        if (!std::isfinite(value)) {
          throw DivergenceError("non-finite loss at step " +
                                    std::to_string(step),
                                step);
        }
        batch_loss += value;
        backward(scale(loss, inv_batch));
      }
      // The last batch of an epoch may be short; its gradient is still
      // scaled by 1/B, matching a zero-padded batch.
      adam.step(params, lr);
      const double mean_loss = batch_loss / static_cast<double>(end - begin);
      result.trace.push_back({step, epoch, lr, mean_loss});
      epoch_sum += mean_loss;
      ++epoch_steps;
      ++step;
    }
    if (epoch_steps > 0) {
      result.epoch_loss.push_back(epoch_sum / epoch_steps);
      result.epochs_run = epoch + 1;
      if (log) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s epoch %d: lr %.3g loss %.6f",
                      to_string(cfg.stage).c_str(), epoch, lr,
                      result.epoch_loss.back());
        log(buf);
      }
    }
  }
  for (auto& [name, var] : params.items()) var.mutable_grad() = Tensor();
  result.steps = step;
  return result;
}

void init_joint_from(GtNet& model, const ParamStore* teacher,
                     const ParamStore* student, const LogSink& log) {
  if (teacher) {
    model.params().copy_from(*teacher, teacher_prefixes());
  } else if (log) {
    log("warning: no teacher checkpoint; motion branch starts from random "
        "initialisation");
  }
  if (student) {
    model.params().copy_from(*student, student_prefixes());
  } else if (log) {
    log("warning: no student checkpoint; appearance branch starts from "
        "random initialisation");
  }
}

std::string loss_trace_csv(const TrainResult& result) {
  std::string out = "step,epoch,lr,loss\n";
  char buf[96];
  for (const LossRecord& r : result.trace) {
    std::snprintf(buf, sizeof buf, "%ld,%d,%.9g,%.17g\n", r.step, r.epoch,
                  r.lr, r.loss);
    out += buf;
  }
  return out;
}

double dataset_mae(const GtNet& model, const Dataset& data,
                   const ForwardOptions& opts) {
  NoGradGuard guard;
  double total = 0;
  for (const VideoSample& s : data.samples) {
    const ModelOutput out =
        model.forward(s.frame, s.has_flow() ? &s.flow : nullptr, opts);
    const Tensor& p = out.prediction().values;
    double sum = 0;
    for (std::size_t i = 0; i < p.numel(); ++i) sum += std::abs(p[i] - s.gt[i]);
    total += sum / static_cast<double>(p.numel());
  }
  return data.samples.empty() ? 0.0 : total / data.samples.size();
}

}  // namespace vsod
