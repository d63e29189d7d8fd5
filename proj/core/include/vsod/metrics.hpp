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

#ifndef VSOD_METRICS_HPP_
#define VSOD_METRICS_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "vsod/tensor.hpp"

namespace vsod {

// All measures take a probability map in [0,1] and a binary ground truth of
// identical shape. Shape mismatches raise ShapeError; values outside the
// domain raise DomainError.

double mae(const Tensor& pred, const Tensor& gt);

enum class FMode {
  kMax,       // max over the 255 thresholds i/255, i = 1..255
  kMean,      // mean over the same thresholds
  kAdaptive,  // single threshold min(2 * mean(pred), 1)
};

std::string to_string(FMode m);
FMode parse_f_mode(std::string_view s);

inline constexpr double kBeta2 = 0.3;
inline constexpr double kSAlpha = 0.5;

// A pixel is positive at threshold t when pred >= t.
double f_beta(const Tensor& pred, const Tensor& gt, double beta2 = kBeta2,
              FMode mode = FMode::kMax);

// Per-threshold F values for i = 1..255 (index i - 1).
std::vector<double> f_beta_curve(const Tensor& pred, const Tensor& gt,
                                 double beta2 = kBeta2);

double s_measure(const Tensor& pred, const Tensor& gt, double alpha = kSAlpha);
double s_object(const Tensor& pred, const Tensor& gt);
double s_region(const Tensor& pred, const Tensor& gt);

struct MetricOptions {
  double beta2 = kBeta2;
  double alpha = kSAlpha;
  FMode f_mode = FMode::kMax;
};

struct FrameScores {
  double mae = 0;
  double f_beta = 0;
  double s_measure = 0;
};

FrameScores score_frame(const Tensor& pred, const Tensor& gt,
                        const MetricOptions& opts = {});

struct SequenceScores {
  std::string sequence;
  int frames = 0;
  double mae = 0;
  double f_beta = 0;
  double s_measure = 0;
};

struct MetricReport {
  std::string dataset;
  MetricOptions options;
  std::vector<SequenceScores> sequences;
  SequenceScores aggregate;  // frame-weighted, sequence = "ALL"
};

struct FramePair {
  std::string sequence;
  Tensor pred;
  Tensor gt;
};

// Frames are grouped by sequence in order of first appearance.
MetricReport evaluate_frames(const std::string& dataset,
                             const std::vector<FramePair>& frames,
                             const MetricOptions& opts = {});

// Compares pred_dir/<seq>/<name>.png with gt_dir/<seq>/gt/<name>.png for every
// ground-truth frame numbered 2 and up. Unmatched files on either side raise
// InputError listing them.
MetricReport evaluate_dataset(const std::filesystem::path& pred_dir,
                              const std::filesystem::path& gt_dir,
                              const MetricOptions& opts = {});

// Columns: dataset, sequence, frames, mae, f_beta, s_measure.
std::string report_csv(const MetricReport& report);
std::string report_json(const MetricReport& report);

}  // namespace vsod

#endif  // VSOD_METRICS_HPP_
