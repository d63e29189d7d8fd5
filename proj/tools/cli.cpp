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

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vsod/config.hpp"
#include "vsod/data.hpp"
#include "vsod/errors.hpp"
#include "vsod/experiment.hpp"
#include "vsod/gradcheck.hpp"
#include "vsod/gtnet.hpp"
#include "vsod/image_io.hpp"
#include "vsod/metrics.hpp"
#include "vsod/params.hpp"
#include "vsod/training.hpp"

namespace vsod::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> argv;
};

void log_line(const std::string& msg) { std::cerr << msg << "\n"; }

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
  if (!out) throw IoError("failed writing " + p.string());
}

fs::path require_out(const Globals& g) {
  if (g.out.empty()) throw ConfigError("--out is required for this command");
  return g.out;
}

// Replay record written beside every command's outputs.
void write_run_manifest(const fs::path& dir, const std::string& verb,
                        const Globals& g, const std::string& config_json,
                        std::uint64_t seed, json extra = json::object()) {
  json j{{"tool", "vsod"},
         {"version", library_version()},
         {"verb", verb},
         {"command_line", g.argv},
         {"config", json::parse(config_json)},
         {"config_hash", hash_hex(fnv1a64(json::parse(config_json).dump()))},
         {"seed", seed}};
  for (auto& [k, v] : extra.items()) j[k] = v;
  write_text(dir / "run_manifest.json", j.dump(2) + "\n");
}

ModelConfig model_section(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  if (j.is_object() && j.contains("model")) {
    return model_config_from_json(j.at("model").dump());
  }
  return model_config_from_json(text);
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::optional<int> sequences, frames, canvas, flow_blur;
  std::optional<double> flow_noise;
  bool no_distractor = false;
  bool no_clutter = false;
};

int cmd_synth(const Globals& g, const SynthArgs& a) {
  const fs::path out = require_out(g);
  SynthSpec spec =
      g.config.empty() ? SynthSpec{} : synth_spec_from_json(read_text(g.config));
  if (a.sequences) spec.num_sequences = *a.sequences;
  if (a.frames) spec.frames_per_sequence = *a.frames;
  if (a.canvas) spec.canvas = *a.canvas;
  if (a.flow_blur) spec.flow_blur = *a.flow_blur;
  if (a.flow_noise) spec.flow_noise = *a.flow_noise;
  if (a.no_distractor) spec.static_distractor = false;
  if (a.no_clutter) spec.background_clutter = false;
  if (g.seed) spec.seed = *g.seed;
  spec.validate();
  const SynthManifest m = synth_generate(spec, out);
  write_run_manifest(out, "synth", g, to_json(spec, -1), spec.seed);
  std::cout << "wrote " << m.sequences.size() << " sequences of "
            << spec.frames_per_sequence << " frames to " << out.string()
            << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string stage;
  std::string data;
  std::string variant = "OUR";
  std::string profile;
  std::optional<int> epochs, batch_size;
  std::optional<long> max_steps;
  std::optional<double> lr, lambda;
  std::string teacher, student;
};

int cmd_train(const Globals& g, const TrainArgs& a) {
  const fs::path out = require_out(g);
  const Stage stage = parse_stage(a.stage);
  ExperimentConfig exp =
      g.config.empty() ? default_experiment(ModelConfig::toy())
                       : experiment_from_json(read_text(g.config));
  ModelConfig mcfg = exp.model;
  if (!a.profile.empty()) {
    const Profile p = parse_profile(a.profile);
    if (p != mcfg.profile) {
      const std::uint64_t seed = mcfg.seed;
      mcfg = ModelConfig::for_profile(p);
      mcfg.seed = seed;
    }
  }
  mcfg.ablation = AblationSpec::preset(a.variant);
  TrainConfig tcfg = stage == Stage::kTeacher   ? exp.teacher
                     : stage == Stage::kStudent ? exp.student
                                                : exp.joint;
  if (g.seed) {
    mcfg.seed = *g.seed;
    tcfg.seed = *g.seed;
  }
  if (a.epochs) tcfg.epochs = *a.epochs;
  if (a.batch_size) tcfg.batch_size = *a.batch_size;
  if (a.max_steps) tcfg.max_steps = *a.max_steps;
  if (a.lr) tcfg.base_lr = *a.lr;
  if (a.lambda) tcfg.lambda_teacher = *a.lambda;
  mcfg.validate();
  tcfg.validate();
  // Fail on an incompatible stage before touching the data.
  stage_forward_options(mcfg, stage);

  const Dataset data = load_dataset(a.data, {.require_flow = false});
  GtNet model(mcfg);
  if (stage == Stage::kJoint) {
    std::optional<Checkpoint> teacher, student;
    if (!a.teacher.empty()) teacher = load_checkpoint(a.teacher);
    if (!a.student.empty()) student = load_checkpoint(a.student);
    init_joint_from(model, teacher ? &teacher->params : nullptr,
                    student ? &student->params : nullptr, log_line);
  } else if (!a.teacher.empty() || !a.student.empty()) {
    throw ConfigError("--teacher/--student initialise the joint stage only");
  }
  const TrainResult r = train_stage(model, data, tcfg, log_line);
  save_checkpoint(out, model, {to_string(stage), r.epochs_run});
  write_text(out / "loss_trace.csv", loss_trace_csv(r));
  std::string epochs = "epoch,loss\n";
  for (std::size_t e = 0; e < r.epoch_loss.size(); ++e) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", e, r.epoch_loss[e]);
    epochs += buf;
  }
  write_text(out / "epoch_loss.csv", epochs);
  json cfg{{"model", json::parse(to_json(mcfg, -1))},
           {"train", json::parse(to_json(tcfg, -1))}};
  write_run_manifest(out, "train", g, cfg.dump(), tcfg.seed,
                     {{"model_config_hash", hash_hex(config_hash(mcfg))}});
  std::printf("%s stage: %ld steps, final epoch loss %.6f\n",
              to_string(stage).c_str(), r.steps,
              r.epoch_loss.empty() ? 0.0 : r.epoch_loss.back());
  return kOk;
}

// ---------------------------------------------------------------------------

struct PredictArgs {
  std::string checkpoint;
  std::string data;
  bool emit_teacher = false;
  bool resize = false;
};

int cmd_predict(const Globals& g, const PredictArgs& a) {
  const fs::path out = require_out(g);
  std::optional<ModelConfig> expected;
  if (!g.config.empty()) expected = model_section(read_text(g.config));
  Checkpoint ckpt = load_checkpoint(a.checkpoint, expected ? &*expected : nullptr);
  const GtNet model(ckpt.config, std::move(ckpt.params));
  const Dataset data = load_dataset(
      a.data, {.require_flow = model.config().ablation.uses_motion()});
  const int n = predict_dataset(model, data, out,
                                {.emit_teacher = a.emit_teacher,
                                 .resize = a.resize});
  write_run_manifest(out, "predict", g, to_json(model.config(), -1),
                     model.config().seed,
                     {{"model_config_hash", hash_hex(config_hash(model.config()))},
                      {"checkpoint", a.checkpoint}});
  std::cout << "wrote " << n << " saliency maps to " << out.string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::string f_mode = "max";
};

int cmd_eval(const Globals& g, const EvalArgs& a) {
  const fs::path out = require_out(g);
  MetricOptions opts;
  opts.f_mode = parse_f_mode(a.f_mode);
  const MetricReport r = evaluate_dataset(a.pred, a.gt, opts);
  fs::create_directories(out);
  write_text(out / "report.csv", report_csv(r));
  write_text(out / "report.json", report_json(r));
  json cfg{{"beta2", opts.beta2}, {"alpha", opts.alpha},
           {"f_mode", to_string(opts.f_mode)}};
  write_run_manifest(out, "eval", g, cfg.dump(), g.seed.value_or(0));
  std::printf("%s: %d frames  M %.4f  F %.4f  S %.4f\n", r.dataset.c_str(),
              r.aggregate.frames, r.aggregate.mae, r.aggregate.f_beta,
              r.aggregate.s_measure);
  return kOk;
}

// ---------------------------------------------------------------------------

struct AblateArgs {
  std::string variants = "1,2,3,4,5,6,OUR";
  std::string train;
  std::vector<std::string> tests;
  std::optional<int> epochs;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_ablate(const Globals& g, const AblateArgs& a) {
  const fs::path out = require_out(g);
  const std::vector<std::string> variants = split_list(a.variants);
  if (variants.empty()) throw ConfigError("--variants is empty");
  for (const std::string& v : variants) AblationSpec::preset(v);
  ExperimentConfig exp =
      g.config.empty() ? default_experiment(ModelConfig::toy())
                       : experiment_from_json(read_text(g.config));
  if (g.seed) {
    exp.model.seed = *g.seed;
    for (TrainConfig* t : {&exp.teacher, &exp.student, &exp.joint}) {
      t->seed = *g.seed;
    }
  }
  if (a.epochs) {
    for (TrainConfig* t : {&exp.teacher, &exp.student, &exp.joint}) {
      t->epochs = *a.epochs;
    }
  }
  const Dataset train = load_dataset(a.train);
  std::vector<Dataset> tests;
  for (const std::string& t : a.tests) tests.push_back(load_dataset(t));
  const AblationTable table = run_ablation(exp, variants, train, tests, log_line);
  fs::create_directories(out);
  write_text(out / "ablation.csv", ablation_csv(table));
  write_text(out / "ablation.json", ablation_json(table));
  write_run_manifest(out, "ablate", g, to_json(exp, -1), exp.model.seed,
                     {{"variants", variants}});
  std::cout << ablation_csv(table);
  return kOk;
}

// ---------------------------------------------------------------------------

struct GradcheckArgs {
  std::string variant = "OUR";
  std::optional<int> samples;
  std::optional<double> step;
  std::string corrupt;
};

int cmd_gradcheck(const Globals& g, const GradcheckArgs& a) {
  ModelConfig cfg = g.config.empty() ? ModelConfig::toy()
                                     : model_section(read_text(g.config));
  if (g.config.empty() || a.variant != "OUR") {
    cfg.ablation = AblationSpec::preset(a.variant);
  }
  GradcheckOptions opts;
  if (g.seed) opts.seed = *g.seed;
  if (a.samples) opts.samples_per_module = *a.samples;
  if (a.step) opts.step = *a.step;
  opts.corrupt_group = a.corrupt;
  const GradcheckReport r = run_gradcheck(cfg, opts);
  std::cout << gradcheck_text(r);
  if (!g.out.empty()) {
    const fs::path out = g.out;
    fs::create_directories(out);
    write_text(out / "gradcheck.txt", gradcheck_text(r));
    write_text(out / "gradcheck.json", gradcheck_json(r));
    write_run_manifest(out, "gradcheck", g, to_json(cfg, -1), opts.seed);
  }
  return r.pass ? kOk : kRuntimeFailure;
}

// ---------------------------------------------------------------------------

struct VizArgs {
  std::vector<std::string> preds;
  std::string data;
  int gap = 2;
};

Image8 panel_rgb(const Image8& img) {
  if (img.channels == 3) return img;
  Image8 rgb(img.width, img.height, 3);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = img.at(x, y, 0);
    }
  }
  return rgb;
}

int cmd_viz(const Globals& g, const VizArgs& a) {
  const fs::path out = require_out(g);
  const fs::path root = a.data;
  if (!fs::is_directory(root)) {
    throw InputError("data directory not found: " + root.string());
  }
  std::vector<fs::path> seqs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory() && fs::is_directory(e.path() / "frames")) {
      seqs.push_back(e.path());
    }
  }
  std::sort(seqs.begin(), seqs.end());
  int strips = 0;
  for (const fs::path& seq : seqs) {
    std::vector<std::pair<int, std::string>> frames;
    for (const auto& e : fs::directory_iterator(seq / "frames")) {
      const std::string stem = e.path().stem().string();
      if (e.path().extension() != ".png" || stem.empty() ||
          !std::all_of(stem.begin(), stem.end(), ::isdigit)) {
        continue;
      }
      if (std::stoi(stem) >= 2) frames.emplace_back(std::stoi(stem), stem);
    }
    std::sort(frames.begin(), frames.end());
    const std::string id = seq.filename().string();
    for (const auto& [t, stem] : frames) {
      const std::string file = stem + ".png";
      const Image8 frame = panel_rgb(read_png(seq / "frames" / file));
      auto load = [&](const fs::path& p, const std::string& what) {
        if (!fs::exists(p)) {
          throw InputError("missing " + what + " for frame " + id + "/" + file +
                           ": " + p.string());
        }
        Image8 img = panel_rgb(read_png(p));
        if (img.width != frame.width || img.height != frame.height) {
          throw InputError(what + " " + p.string() + " is misaligned with frame " +
                           id + "/" + file);
        }
        return img;
      };
      std::vector<Image8> panels{frame};
      if (fs::exists(seq / "flow" / file)) {
        panels.push_back(load(seq / "flow" / file, "flow"));
      } else {
        panels.emplace_back(frame.width, frame.height, 3, 128);
      }
      panels.push_back(load(seq / "gt" / file, "ground truth"));
      for (const std::string& p : a.preds) {
        panels.push_back(load(fs::path(p) / id / file, "prediction"));
      }
      const int n = static_cast<int>(panels.size());
      Image8 strip(n * frame.width + (n - 1) * a.gap, frame.height, 3, 255);
      for (int i = 0; i < n; ++i) {
        const int x0 = i * (frame.width + a.gap);
        for (int y = 0; y < frame.height; ++y) {
          for (int x = 0; x < frame.width; ++x) {
            for (int c = 0; c < 3; ++c) {
              strip.at(x0 + x, y, c) = panels[i].at(x, y, c);
            }
          }
        }
      }
      write_png(out / id / file, strip);
      ++strips;
    }
  }
  json cfg{{"sources", a.preds}, {"data", a.data}, {"gap", a.gap}};
  write_run_manifest(out, "viz", g, cfg.dump(), g.seed.value_or(0));
  std::cout << "wrote " << strips << " comparison strips to " << out.string()
            << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string checkpoint;
  std::string profile = "toy";
  std::optional<int> size;
  int iterations = 10;
  int warmup = 2;
};

int cmd_bench(const Globals& g, const BenchArgs& a) {
  if (a.iterations < 1 || a.warmup < 0) {
    throw ConfigError("--iterations must be >= 1 and --warmup >= 0");
  }
  std::optional<GtNet> model;
  if (!a.checkpoint.empty()) {
    Checkpoint ckpt = load_checkpoint(a.checkpoint);
    if (a.size && *a.size != ckpt.config.input_size) {
      throw ConfigError("--size differs from the checkpoint input size");
    }
    model.emplace(ckpt.config, std::move(ckpt.params));
  } else {
    ModelConfig cfg = ModelConfig::for_profile(parse_profile(a.profile));
    if (a.size) cfg.input_size = *a.size;
    if (g.seed) cfg.seed = *g.seed;
    cfg.validate();
    model.emplace(cfg);
  }
  const ModelConfig& cfg = model->config();
  std::mt19937_64 rng(g.seed.value_or(0));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor frame = Tensor::chw(3, cfg.input_size, cfg.input_size);
  Tensor flow = Tensor::chw(3, cfg.input_size, cfg.input_size);
  for (std::size_t i = 0; i < frame.numel(); ++i) {
    frame[i] = u(rng);
    flow[i] = u(rng);
  }
  // Flow images are inputs here; estimating them is not timed.
  NoGradGuard no_grad;
  for (int i = 0; i < a.warmup; ++i) model->forward(frame, &flow);
  std::vector<double> ms;
  for (int i = 0; i < a.iterations; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    model->forward(frame, &flow);
    const auto t1 = std::chrono::steady_clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  double mean = 0;
  for (double v : ms) mean += v;
  mean /= ms.size();
  double var = 0;
  for (double v : ms) var += (v - mean) * (v - mean);
  const double stddev = ms.size() > 1 ? std::sqrt(var / (ms.size() - 1)) : 0.0;
  json report{{"profile", to_string(cfg.profile)},
              {"input_size", cfg.input_size},
              {"mode", to_string(cfg.ablation.mode)},
              {"parameters", model->params().scalar_count()},
              {"warmup", a.warmup},
              {"iterations", a.iterations},
              {"samples_ms", ms},
              {"mean_ms", mean},
              {"stddev_ms", stddev},
              {"fps", 1000.0 / mean}};
  std::printf("%s %dx%d: mean %.3f ms, stddev %.3f ms, %.2f fps over %d runs\n",
              to_string(cfg.profile).c_str(), cfg.input_size, cfg.input_size,
              mean, stddev, 1000.0 / mean, a.iterations);
  if (!g.out.empty()) {
    const fs::path out = g.out;
    fs::create_directories(out);
    write_text(out / "bench.json", report.dump(2) + "\n");
    write_run_manifest(out, "bench", g, to_json(cfg, -1), cfg.seed);
  }
  return kOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"vsod: dual-branch video salient object detection toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  for (int i = 0; i < argc; ++i) g.argv.emplace_back(argv[i]);
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--seed", g.seed, "Seed for every random generator of the run");
  app.add_option("--out", g.out, "Output directory");
  app.set_version_flag("--version", library_version());

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic video dataset");
  s->add_option("--sequences", synth.sequences, "Number of sequences");
  s->add_option("--frames", synth.frames, "Frames per sequence");
  s->add_option("--canvas", synth.canvas, "Frame side length in pixels");
  s->add_option("--flow-noise", synth.flow_noise, "Flow noise std (pixels)");
  s->add_option("--flow-blur", synth.flow_blur, "Flow box-blur radius");
  s->add_flag("--no-distractor", synth.no_distractor,
              "Omit the static look-alike object");
  s->add_flag("--no-clutter", synth.no_clutter, "Omit moving background blobs");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Run one training stage");
  t->add_option("--stage", train.stage, "teacher | student | joint")
      ->required()
      ->check(CLI::IsMember({"teacher", "student", "joint"}));
  t->add_option("--data", train.data, "Training dataset root")->required();
  t->add_option("--variant", train.variant, "Model variant (1..6, OUR, M, A)");
  t->add_option("--profile", train.profile, "toy | full");
  t->add_option("--epochs", train.epochs, "Epochs");
  t->add_option("--max-steps", train.max_steps, "Optimizer step cap");
  t->add_option("--batch-size", train.batch_size, "Samples per step");
  t->add_option("--lr", train.lr, "Base learning rate");
  t->add_option("--lambda-teacher", train.lambda, "Weight of the Z_M loss");
  t->add_option("--teacher", train.teacher, "Teacher checkpoint (joint stage)");
  t->add_option("--student", train.student, "Student checkpoint (joint stage)");

  PredictArgs predict;
  auto* p = app.add_subcommand("predict", "Write saliency maps for a dataset");
  p->add_option("--checkpoint", predict.checkpoint, "Checkpoint directory")
      ->required();
  p->add_option("--data", predict.data, "Dataset root")->required();
  p->add_flag("--emit-teacher", predict.emit_teacher,
              "Also write the teacher maps to <seq>/teacher/");
  p->add_flag("--resize", predict.resize,
              "Resample data whose size differs from the model input");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Score saliency maps against ground truth");
  e->add_option("--pred", eval.pred, "Prediction root")->required();
  e->add_option("--gt", eval.gt, "Dataset root holding <seq>/gt/")->required();
  e->add_option("--f-mode", eval.f_mode, "max | mean | adaptive")
      ->check(CLI::IsMember({"max", "mean", "adaptive"}));

  AblateArgs ablate;
  auto* ab = app.add_subcommand("ablate", "Train and score model variants");
  ab->add_option("--variants", ablate.variants,
                 "Comma-separated variant ids (1..6, OUR, M, A, MA)");
  ab->add_option("--train", ablate.train, "Training dataset root")->required();
  ab->add_option("--test", ablate.tests, "Test dataset root (repeatable)")
      ->required();
  ab->add_option("--epochs", ablate.epochs, "Epochs for every stage");

  GradcheckArgs grad;
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  gc->add_option("--variant", grad.variant, "Model variant");
  gc->add_option("--samples", grad.samples, "Coordinates per module");
  gc->add_option("--step", grad.step, "Finite-difference step");
  gc->add_option("--corrupt", grad.corrupt,
                 "Scale the analytic gradient of a parameter group (testing)")
      ->group("");

  VizArgs viz;
  auto* v = app.add_subcommand("viz", "Export frame|flow|gt|predictions strips");
  v->add_option("--pred", viz.preds, "Prediction root (repeatable)")->required();
  v->add_option("--data", viz.data, "Dataset root")->required();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Measure inference latency");
  b->add_option("--checkpoint", bench.checkpoint, "Checkpoint directory");
  b->add_option("--profile", bench.profile, "toy | full")
      ->check(CLI::IsMember({"toy", "full"}));
  b->add_option("--size", bench.size, "Input side length");
  b->add_option("--iterations", bench.iterations, "Timed iterations");
  b->add_option("--warmup", bench.warmup, "Untimed warmup iterations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*s) return cmd_synth(g, synth);
    if (*t) return cmd_train(g, train);
    if (*p) return cmd_predict(g, predict);
    if (*e) return cmd_eval(g, eval);
    if (*ab) return cmd_ablate(g, ablate);
    if (*gc) return cmd_gradcheck(g, grad);
    if (*v) return cmd_viz(g, viz);
    if (*b) return cmd_bench(g, bench);
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsageError;
  } catch (const InputError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsageError;
  } catch (const ShapeError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsageError;
  } catch (const IngestionError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsageError;
  } catch (const DomainError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsageError;
  } catch (const DivergenceError& err) {
    std::cerr << "training diverged: " << err.what() << "\n";
    return kRuntimeFailure;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kRuntimeFailure;
  }
  return kUsageError;
}

}  // namespace vsod::cli
