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

#ifndef VSOD_GRADCHECK_HPP_
#define VSOD_GRADCHECK_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vsod/autograd.hpp"
#include "vsod/config.hpp"

namespace vsod {

struct GradcheckOptions {
  // Central-difference step; retried at step/10 and step/100 across a kink.
  double step = 1e-3;
  double tolerance = 1e-4;
  // Denominator floor of the relative error |a - n| / max(|a|, |n|, floor).
  double floor = 1e-6;
  // Coordinates per module; every parameter group is visited at least twice.
  int samples_per_module = 32;
  std::uint64_t seed = 0;
  // Fault injection: analytic gradients of names starting with this prefix
  // are multiplied by `corrupt_factor` before comparison.
  std::string corrupt_group;
  double corrupt_factor = 1.5;
};

struct GroupResult {
  std::string module;
  std::string group;
  int checked = 0;
  int rejected = 0;  // coordinates whose steps all crossed a kink
  double max_rel_error = 0;
  bool pass = true;
};

struct ModuleResult {
  std::string module;
  int checked = 0;
  int rejected = 0;
  double max_rel_error = 0;
  std::string worst_group;
  bool pass = true;
  std::vector<GroupResult> groups;
};

struct GradcheckReport {
  std::vector<ModuleResult> modules;  // backbone, modulator, decoder, gtnet
  double tolerance = 0;
  bool pass = true;
};

// One leaf tensor perturbed by the checker.
struct GradProbe {
  std::string group;
  Var var;
};

// Central-difference check of d(objective)/d(probes). `objective` must build
// a fresh graph on every call and return a single-element Var.
ModuleResult check_gradients(const std::string& module,
                             const std::function<Var()>& objective,
                             const std::vector<GradProbe>& probes,
                             const GradcheckOptions& opts);

// Runs the four module checks on a freshly initialised model. Only the toy
// profile is accepted (ConfigError otherwise).
GradcheckReport run_gradcheck(const ModelConfig& cfg,
                              const GradcheckOptions& opts = {});

// Group used in reports: "backbone.motion.stage2", "modulator.level3.ca",
// "decoder.student.rf4", ...
std::string param_group(const std::string& name);

std::string gradcheck_text(const GradcheckReport& report);
std::string gradcheck_json(const GradcheckReport& report);

}  // namespace vsod

#endif  // VSOD_GRADCHECK_HPP_
