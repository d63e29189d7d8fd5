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

#include <benchmark/benchmark.h>

#include <random>

#include "vsod/autograd.hpp"
#include "vsod/gtnet.hpp"
#include "vsod/metrics.hpp"
#include "vsod/training.hpp"

namespace {

using namespace vsod;

Tensor random_image(int side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor t = Tensor::chw(3, side, side);
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = u(rng);
  return t;
}

void BM_ToyForward(benchmark::State& state, const char* variant) {
  ModelConfig cfg = ModelConfig::toy();
  cfg.ablation = AblationSpec::preset(variant);
  const GtNet model(cfg);
  const Tensor frame = random_image(cfg.input_size, 1);
  const Tensor flow = random_image(cfg.input_size, 2);
  NoGradGuard no_grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.forward(frame, &flow));
  }
}
BENCHMARK_CAPTURE(BM_ToyForward, M, "M")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ToyForward, A, "A")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ToyForward, MA, "OUR")->Unit(benchmark::kMillisecond);

void BM_ToyTrainStep(benchmark::State& state) {
  const GtNet model(ModelConfig::toy());
  const Tensor frame = random_image(64, 1);
  const Tensor flow = random_image(64, 2);
  Tensor gt({1, 64, 64}, 0.0);
  for (int y = 16; y < 40; ++y) {
    for (int x = 20; x < 44; ++x) gt.at(0, y, x) = 1.0;
  }
  for (auto _ : state) {
    const ModelOutput out = model.forward(frame, &flow);
    backward(stage_loss(out, gt, Stage::kJoint));
  }
}
BENCHMARK(BM_ToyTrainStep)->Unit(benchmark::kMillisecond);

// Full-width pyramid at a reduced side so the benchmark stays in memory and
// time budgets; `vsod bench --profile full` measures 352x352.
void BM_FullWidthForward(benchmark::State& state) {
  ModelConfig cfg = ModelConfig::full();
  cfg.input_size = static_cast<int>(state.range(0));
  const GtNet model(cfg);
  const Tensor frame = random_image(cfg.input_size, 1);
  const Tensor flow = random_image(cfg.input_size, 2);
  NoGradGuard no_grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.forward(frame, &flow));
  }
}
BENCHMARK(BM_FullWidthForward)->Arg(64)->Unit(benchmark::kMillisecond)
    ->Iterations(2);

void BM_Metrics(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor pred({1, side, side}), gt({1, side, side});
  for (std::size_t i = 0; i < pred.numel(); ++i) {
    pred[i] = u(rng);
    gt[i] = u(rng) < 0.3 ? 1.0 : 0.0;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_frame(pred, gt));
  }
}
BENCHMARK(BM_Metrics)->Arg(64)->Arg(352)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
