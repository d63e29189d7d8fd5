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

// Random-instance comparisons between the library and the oracles. Each
// function draws one instance from `rng` and returns the largest absolute
// difference between the two implementations.

#ifndef VSOD_TESTS_INSTANCES_HPP_
#define VSOD_TESTS_INSTANCES_HPP_

#include <random>

namespace oracle {

double modulator_instance(std::mt19937_64& rng);
double rf_block_instance(std::mt19937_64& rng);
double broadcast_instance(std::mt19937_64& rng);
double unet_instance(std::mt19937_64& rng);
double teaching_instance(std::mt19937_64& rng);
double bce_instance(std::mt19937_64& rng);

// Metric instances use maps of at most 8x8, a mix of graded and quantised
// predictions, and occasionally degenerate ground truth.
double mae_instance(std::mt19937_64& rng);
double f_beta_instance(std::mt19937_64& rng);
double s_measure_instance(std::mt19937_64& rng);

}  // namespace oracle

#endif  // VSOD_TESTS_INSTANCES_HPP_
