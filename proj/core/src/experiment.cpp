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

#include "vsod/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "json.hpp"
#include "vsod/errors.hpp"
#include "vsod/image_io.hpp"

namespace vsod {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

ModelConfig with_ablation(ModelConfig cfg, const AblationSpec& a) {
  cfg.ablation = a;
  return cfg;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

Tensor quantize8(const Tensor& probability) {
  Tensor q = probability;
  for (std::size_t i = 0; i < q.numel(); ++i) {
    q[i] = std::lround(std::clamp(q[i], 0.0, 1.0) * 255.0) / 255.0;
  }
  return q;
}

int predict_dataset(const GtNet& model, const Dataset& data,
                    const fs::path& out, const PredictOptions& opts) {
  NoGradGuard no_grad;
  const int side = model.config().input_size;
  int written = 0;
  for (const VideoSample& s : data.samples) {
    const int h = s.frame.height(), w = s.frame.width();
    const bool mismatch = h != side || w != side;
    if (mismatch && !opts.resize) {
      throw InputError("sample " + s.sequence_id + "/" + s.name + " is " +
                       std::to_string(w) + "x" + std::to_string(h) +
                       " but the model expects " + std::to_string(side) + "x" +
                       std::to_string(side) + "; enable resizing");
    }
    Tensor frame = s.frame;
    Tensor flow = s.flow;
    if (mismatch) {
      frame = resize_bilinear(frame, side, side);
      if (s.has_flow()) flow = resize_bilinear(flow, side, side);
    }
    const ModelOutput o =
        model.forward(frame, s.has_flow() ? &flow : nullptr);
    auto restore = [&](const Tensor& p) {
      return mismatch ? resize_bilinear(p, h, w) : p;
    };
    const fs::path dir = out / s.sequence_id;
    write_png(dir / (s.name + ".png"), to_gray8(restore(o.prediction().values)));
    ++written;
    if (opts.emit_teacher && o.z_m) {
      write_png(dir / "teacher" / (s.name + ".png"),
                to_gray8(restore(o.z_m->values)));
    }
  }
  return written;
}

MetricReport evaluate_model(const GtNet& model, const Dataset& data,
                            const MetricOptions& opts) {
  NoGradGuard no_grad;
  std::vector<FramePair> frames;
  frames.reserve(data.size());
  for (const VideoSample& s : data.samples) {
    const ModelOutput o =
        model.forward(s.frame, s.has_flow() ? &s.flow : nullptr);
    frames.push_back({s.sequence_id, quantize8(o.prediction().values), s.gt});
  }
  return evaluate_frames(data.id, frames, opts);
}

ExperimentConfig default_experiment(const ModelConfig& model) {
  ExperimentConfig c;
  c.model = model;
  c.teacher.stage = Stage::kTeacher;
  c.student.stage = Stage::kStudent;
  c.joint.stage = Stage::kJoint;
  for (TrainConfig* t : {&c.teacher, &c.student, &c.joint}) {
    t->epochs = 8;
    t->batch_size = 4;
    t->seed = model.seed;
  }
  return c;
}

std::string to_json(const ExperimentConfig& c, int indent) {
  json j{{"model", json::parse(to_json(c.model, -1))},
         {"teacher", json::parse(to_json(c.teacher, -1))},
         {"student", json::parse(to_json(c.student, -1))},
         {"joint", json::parse(to_json(c.joint, -1))},
         {"metrics",
          {{"beta2", c.metrics.beta2},
           {"alpha", c.metrics.alpha},
           {"f_mode", to_string(c.metrics.f_mode)}}}};
  return j.dump(indent);
}

ExperimentConfig experiment_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad experiment config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("experiment config must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "model" && key != "teacher" && key != "student" &&
        key != "joint" && key != "metrics") {
      throw ConfigError("unknown experiment key '" + key + "'");
    }
  }
  const ModelConfig model = j.contains("model")
                                ? model_config_from_json(j.at("model").dump())
                                : ModelConfig::toy();
  ExperimentConfig c = default_experiment(model);
  auto stage = [&j](const char* key, TrainConfig& t, Stage s) {
    if (!j.contains(key)) return;
    json merged = json::parse(to_json(t, -1));
    merged.update(j.at(key));
    t = train_config_from_json(merged.dump());
    if (t.stage != s) {
      throw ConfigError(std::string(key) + " section must have stage " +
                        to_string(s));
    }
  };
  stage("teacher", c.teacher, Stage::kTeacher);
  stage("student", c.student, Stage::kStudent);
  stage("joint", c.joint, Stage::kJoint);
  if (j.contains("metrics")) {
    const json& m = j.at("metrics");
    try {
      for (const auto& [key, value] : m.items()) {
        if (key == "beta2") {
          c.metrics.beta2 = value.get<double>();
        } else if (key == "alpha") {
          c.metrics.alpha = value.get<double>();
        } else if (key == "f_mode") {
          c.metrics.f_mode = parse_f_mode(value.get<std::string>());
        } else {
          throw ConfigError("unknown metrics key '" + key + "'");
        }
      }
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad metrics section: ") + e.what());
    }
  }
  return c;
}

AblationTable run_ablation(const ExperimentConfig& cfg,
                           const std::vector<std::string>& variants,
                           const Dataset& train,
                           const std::vector<Dataset>& tests,
                           const LogSink& log) {
  if (variants.empty()) throw ConfigError("no variants requested");
  std::vector<AblationSpec> specs;
  for (const std::string& v : variants) specs.push_back(AblationSpec::preset(v));

  AblationTable table;
  for (const Dataset& d : tests) table.datasets.push_back(d.id);

  // Stage results keyed by the decoder structure they were trained with.
  std::map<bool, ParamStore> teachers, students;
  auto teacher_for = [&](bool t_pd) -> const ParamStore& {
    auto it = teachers.find(t_pd);
    if (it != teachers.end()) return it->second;
    AblationSpec a;
    a.t_pd = t_pd;
    GtNet model(with_ablation(cfg.model, a));
    if (log) log(std::string("teacher stage (") + (t_pd ? "partial decoder" : "1x1 head") + ")");
    train_stage(model, train, cfg.teacher, log);
    return teachers.emplace(t_pd, model.params()).first->second;
  };
  auto student_for = [&](bool s_pd) -> const ParamStore& {
    auto it = students.find(s_pd);
    if (it != students.end()) return it->second;
    AblationSpec a;
    a.s_pd = s_pd;
    GtNet model(with_ablation(cfg.model, a));
    if (log) log(std::string("student stage (") + (s_pd ? "partial decoder" : "naive decoder") + ")");
    train_stage(model, train, cfg.student, log);
    return students.emplace(s_pd, model.params()).first->second;
  };

  for (std::size_t i = 0; i < variants.size(); ++i) {
    const AblationSpec& a = specs[i];
    GtNet model(with_ablation(cfg.model, a));
    if (a.mode == Mode::kM) {
      model.params().copy_from(teacher_for(true), teacher_prefixes());
    } else if (a.mode == Mode::kA) {
      model.params().copy_from(student_for(true), student_prefixes());
    } else {
      init_joint_from(model, &teacher_for(a.t_pd), &student_for(a.s_pd), log);
      if (log) log("joint stage, variant " + variants[i]);
      train_stage(model, train, cfg.joint, log);
    }
    VariantScores row;
    row.variant = variants[i];
    for (const Dataset& d : tests) {
      row.per_dataset.push_back(evaluate_model(model, d, cfg.metrics).aggregate);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string ablation_csv(const AblationTable& table) {
  std::string out = "variant";
  for (const std::string& d : table.datasets) {
    out += "," + d + "_M," + d + "_F," + d + "_S";
  }
  out += "\n";
  for (const VariantScores& r : table.rows) {
    out += r.variant;
    for (const SequenceScores& s : r.per_dataset) {
      out += "," + fmt(s.mae) + "," + fmt(s.f_beta) + "," + fmt(s.s_measure);
    }
    out += "\n";
  }
  return out;
}

std::string ablation_json(const AblationTable& table) {
  json rows = json::array();
  for (const VariantScores& r : table.rows) {
    json cols = json::object();
    for (std::size_t d = 0; d < r.per_dataset.size(); ++d) {
      const SequenceScores& s = r.per_dataset[d];
      cols[table.datasets[d]] = {{"M", s.mae},
                                 {"F", s.f_beta},
                                 {"S", s.s_measure},
                                 {"frames", s.frames}};
    }
    rows.push_back({{"variant", r.variant}, {"scores", cols}});
  }
  json j{{"columns", {"M (lower is better)", "F (higher is better)",
                      "S (higher is better)"}},
         {"datasets", table.datasets},
         {"rows", rows}};
  return j.dump(2) + "\n";
}

}  // namespace vsod
