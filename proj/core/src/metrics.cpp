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

#include "vsod/metrics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "json.hpp"
#include "vsod/errors.hpp"
#include "vsod/image_io.hpp"

namespace vsod {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_inputs(const Tensor& pred, const Tensor& gt) {
  if (pred.dims() != gt.dims()) {
    throw ShapeError("prediction " + pred.shape_string() +
                     " and ground truth " + gt.shape_string() + " differ");
  }
  if (pred.empty()) throw ShapeError("empty maps");
  for (double v : pred.data()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DomainError("prediction values must lie in [0,1]");
    }
  }
  for (double v : gt.data()) {
    if (v != 0.0 && v != 1.0) throw DomainError("ground truth must be binary");
  }
}

// Row-major (H, W) view of a rank-2 or (1, H, W) tensor.
struct Plane {
  const double* p;
  int h, w;
  double operator()(int y, int x) const { return p[y * w + x]; }
};

Plane plane(const Tensor& t) {
  if (t.rank() == 3 && t.dim(0) == 1) return {t.raw(), t.dim(1), t.dim(2)};
  if (t.rank() == 2) return {t.raw(), t.dim(0), t.dim(1)};
  throw ShapeError("expected a single-channel map, got " + t.shape_string());
}

double f_from_counts(double tp, double positives, double gt_count,
                     double beta2) {
  const double precision = positives > 0 ? tp / positives : 0.0;
  const double recall = tp / gt_count;
  if (precision + recall == 0.0) return 0.0;
  return (1.0 + beta2) * precision * recall / (beta2 * precision + recall);
}

// Largest i in [0, 255] with pred >= i / 255 (0 when below every threshold).
int threshold_bin(double v) {
  int k = static_cast<int>(std::floor(v * 255.0));
  k = std::clamp(k, 0, 255);
  while (k < 255 && v >= (k + 1) / 255.0) ++k;
  while (k > 0 && v < k / 255.0) --k;
  return k;
}

double object_score(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  if (values.empty()) return 0.0;
  double mean = 0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0;
  if (values.size() > 1) {
    for (double v : values) var += (v - mean) * (v - mean);
    var /= n - 1;
  }
  return 2.0 * mean / (mean * mean + 1.0 + std::sqrt(var) + kEps);
}

// Structural similarity of one quadrant, rows [y0, y1) and columns [x0, x1).
double quadrant_ssim(const Plane& p, const Plane& g, int y0, int y1, int x0,
                     int x1) {
  const double n = static_cast<double>(y1 - y0) * (x1 - x0);
  double mx = 0, my = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      mx += p(y, x);
      my += g(y, x);
    }
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const double dx = p(y, x) - mx;
      const double dy = g(y, x) - my;
      sxx += dx * dx;
      syy += dy * dy;
      sxy += dx * dy;
    }
  }
  sxx /= n - 1 + kEps;
  syy /= n - 1 + kEps;
  sxy /= n - 1 + kEps;
  const double a = 4.0 * mx * my * sxy;
  const double b = (mx * mx + my * my) * (sxx + syy);
  if (a != 0.0) return a / (b + kEps);
  return b == 0.0 ? 1.0 : 0.0;
}

double mean_of(const Tensor& t) {
  double s = 0;
  for (double v : t.data()) s += v;
  return s / static_cast<double>(t.numel());
}

Tensor read_map(const fs::path& p, bool binary) {
  const Image8 img = read_png(p);
  if (binary) return to_binary_mask(img);
  Tensor t = Tensor::chw(1, img.height, img.width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) t.at(0, y, x) = img.at(x, y, 0) / 255.0;
  }
  return t;
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string to_string(FMode m) {
  switch (m) {
    case FMode::kMax: return "max";
    case FMode::kMean: return "mean";
    case FMode::kAdaptive: return "adaptive";
  }
  return "max";
}

FMode parse_f_mode(std::string_view s) {
  if (s == "max") return FMode::kMax;
  if (s == "mean") return FMode::kMean;
  if (s == "adaptive") return FMode::kAdaptive;
  throw ConfigError("unknown F-measure mode '" + std::string(s) + "'");
}

double mae(const Tensor& pred, const Tensor& gt) {
  check_inputs(pred, gt);
  double s = 0;
  for (std::size_t i = 0; i < pred.numel(); ++i) {
    s += std::abs(pred[i] - gt[i]);
  }
  return s / static_cast<double>(pred.numel());
}

std::vector<double> f_beta_curve(const Tensor& pred, const Tensor& gt,
                                 double beta2) {
  check_inputs(pred, gt);
  std::array<double, 256> all{}, hit{};
  double gt_count = 0;
  for (std::size_t i = 0; i < pred.numel(); ++i) {
    const int k = threshold_bin(pred[i]);
    all[k] += 1;
    if (gt[i] == 1.0) {
      hit[k] += 1;
      gt_count += 1;
    }
  }
  std::vector<double> curve(255, 0.0);
  if (gt_count == 0) return curve;
  double positives = 0, tp = 0;
  for (int i = 255; i >= 1; --i) {
    positives += all[i];
    tp += hit[i];
    curve[i - 1] = f_from_counts(tp, positives, gt_count, beta2);
  }
  return curve;
}

double f_beta(const Tensor& pred, const Tensor& gt, double beta2, FMode mode) {
  if (mode == FMode::kAdaptive) {
    check_inputs(pred, gt);
    const double thr = std::min(2.0 * mean_of(pred), 1.0);
    double positives = 0, tp = 0, gt_count = 0;
    for (std::size_t i = 0; i < pred.numel(); ++i) {
      const bool on = pred[i] >= thr;
      positives += on;
      if (gt[i] == 1.0) {
        gt_count += 1;
        tp += on;
      }
    }
    if (gt_count == 0) return 0.0;
    return f_from_counts(tp, positives, gt_count, beta2);
  }
  const std::vector<double> curve = f_beta_curve(pred, gt, beta2);
  if (mode == FMode::kMax) return *std::max_element(curve.begin(), curve.end());
  double s = 0;
  for (double f : curve) s += f;
  return s / static_cast<double>(curve.size());
}

double s_object(const Tensor& pred, const Tensor& gt) {
  check_inputs(pred, gt);
  std::vector<double> fg, bg;
  for (std::size_t i = 0; i < pred.numel(); ++i) {
    if (gt[i] == 1.0) {
      fg.push_back(pred[i]);
    } else {
      bg.push_back(1.0 - pred[i]);
    }
  }
  const double u = static_cast<double>(fg.size()) / pred.numel();
  return u * object_score(fg) + (1.0 - u) * object_score(bg);
}

double s_region(const Tensor& pred, const Tensor& gt) {
  check_inputs(pred, gt);
  const Plane p = plane(pred);
  const Plane g = plane(gt);
  const int h = g.h, w = g.w;
  double total = 0, sx = 0, sy = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      total += g(y, x);
      sx += g(y, x) * (x + 1);
      sy += g(y, x) * (y + 1);
    }
  }
  // Split point in 1-based coordinates: columns [1, cx] go left.
  int cx, cy;
  if (total == 0) {
    cx = static_cast<int>(std::round(w / 2.0));
    cy = static_cast<int>(std::round(h / 2.0));
  } else {
    cx = static_cast<int>(std::round(sx / total));
    cy = static_cast<int>(std::round(sy / total));
  }
  const double area = static_cast<double>(w) * h;
  const int ys[3] = {0, cy, h};
  const int xs[3] = {0, cx, w};
  double q = 0;
  for (int qy = 0; qy < 2; ++qy) {
    for (int qx = 0; qx < 2; ++qx) {
      const int y0 = ys[qy], y1 = ys[qy + 1];
      const int x0 = xs[qx], x1 = xs[qx + 1];
      if (y1 <= y0 || x1 <= x0) continue;
      const double weight = static_cast<double>(y1 - y0) * (x1 - x0) / area;
      q += weight * quadrant_ssim(p, g, y0, y1, x0, x1);
    }
  }
  return q;
}

double s_measure(const Tensor& pred, const Tensor& gt, double alpha) {
  check_inputs(pred, gt);
  const double y = mean_of(gt);
  double q;
  if (y == 0.0) {
    q = 1.0 - mean_of(pred);
  } else if (y == 1.0) {
    q = mean_of(pred);
  } else {
    q = alpha * s_object(pred, gt) + (1.0 - alpha) * s_region(pred, gt);
  }
  return std::clamp(q, 0.0, 1.0);
}

FrameScores score_frame(const Tensor& pred, const Tensor& gt,
                        const MetricOptions& opts) {
  return {mae(pred, gt), f_beta(pred, gt, opts.beta2, opts.f_mode),
          s_measure(pred, gt, opts.alpha)};
}

MetricReport evaluate_frames(const std::string& dataset,
                             const std::vector<FramePair>& frames,
                             const MetricOptions& opts) {
  MetricReport report;
  report.dataset = dataset;
  report.options = opts;
  std::map<std::string, std::size_t> slot;
  SequenceScores& all = report.aggregate;
  all.sequence = "ALL";
  for (const FramePair& f : frames) {
    const FrameScores s = score_frame(f.pred, f.gt, opts);
    auto [it, fresh] = slot.emplace(f.sequence, report.sequences.size());
    if (fresh) report.sequences.push_back({f.sequence});
    SequenceScores& seq = report.sequences[it->second];
    for (SequenceScores* acc : {&seq, &all}) {
      acc->frames += 1;
      acc->mae += s.mae;
      acc->f_beta += s.f_beta;
      acc->s_measure += s.s_measure;
    }
  }
  auto finish = [](SequenceScores& s) {
    if (s.frames == 0) return;
    s.mae /= s.frames;
    s.f_beta /= s.frames;
    s.s_measure /= s.frames;
  };
  for (SequenceScores& s : report.sequences) finish(s);
  finish(all);
  return report;
}

MetricReport evaluate_dataset(const fs::path& pred_dir, const fs::path& gt_dir,
                              const MetricOptions& opts) {
  if (!fs::is_directory(pred_dir)) {
    throw InputError("prediction directory not found: " + pred_dir.string());
  }
  if (!fs::is_directory(gt_dir)) {
    throw InputError("ground-truth directory not found: " + gt_dir.string());
  }
  // (sequence, stem) -> path
  std::map<std::pair<std::string, std::string>, fs::path> gts, preds;
  for (const auto& seq : fs::directory_iterator(gt_dir)) {
    const fs::path gdir = seq.path() / "gt";
    if (!seq.is_directory() || !fs::is_directory(gdir)) continue;
    for (const auto& f : fs::directory_iterator(gdir)) {
      if (f.path().extension() != ".png") continue;
      const std::string stem = f.path().stem().string();
      if (stem.empty() ||
          !std::all_of(stem.begin(), stem.end(),
                       [](unsigned char c) { return std::isdigit(c); }) ||
          std::stoi(stem) < 2) {
        continue;
      }
      gts[{seq.path().filename().string(), stem}] = f.path();
    }
  }
  for (const auto& seq : fs::directory_iterator(pred_dir)) {
    if (!seq.is_directory()) continue;
    for (const auto& f : fs::directory_iterator(seq.path())) {
      if (!f.is_regular_file() || f.path().extension() != ".png") continue;
      preds[{seq.path().filename().string(), f.path().stem().string()}] =
          f.path();
    }
  }
  std::vector<std::string> unmatched;
  for (const auto& [key, path] : gts) {
    if (!preds.count(key)) unmatched.push_back("missing prediction " +
                                               key.first + "/" + key.second);
  }
  for (const auto& [key, path] : preds) {
    if (!gts.count(key)) unmatched.push_back("no ground truth for " +
                                             key.first + "/" + key.second);
  }
  if (gts.empty()) {
    throw InputError("no ground-truth frames under " + gt_dir.string());
  }
  if (!unmatched.empty()) {
    std::string msg = std::to_string(unmatched.size()) + " unmatched file(s):";
    for (std::size_t i = 0; i < unmatched.size() && i < 20; ++i) {
      msg += "\n  " + unmatched[i];
    }
    if (unmatched.size() > 20) msg += "\n  ...";
    throw InputError(msg);
  }
  std::vector<FramePair> frames;
  for (const auto& [key, gpath] : gts) {
    Tensor pred = read_map(preds.at(key), false);
    Tensor gt = read_map(gpath, true);
    if (pred.dims() != gt.dims()) {
      throw ShapeError(preds.at(key).string() + " is " + pred.shape_string() +
                       " but its ground truth is " + gt.shape_string());
    }
    frames.push_back({key.first, std::move(pred), std::move(gt)});
  }
  std::string id = fs::absolute(gt_dir).lexically_normal().filename().string();
  if (id.empty()) {
    id = fs::absolute(gt_dir).lexically_normal().parent_path().filename();
  }
  return evaluate_frames(id, frames, opts);
}

std::string report_csv(const MetricReport& r) {
  std::string out = "dataset,sequence,frames,mae,f_beta,s_measure\n";
  auto row = [&](const SequenceScores& s) {
    out += r.dataset + "," + s.sequence + "," + std::to_string(s.frames) + "," +
           fmt6(s.mae) + "," + fmt6(s.f_beta) + "," + fmt6(s.s_measure) + "\n";
  };
  for (const SequenceScores& s : r.sequences) row(s);
  row(r.aggregate);
  return out;
}

std::string report_json(const MetricReport& r) {
  auto scores = [](const SequenceScores& s) {
    return json{{"sequence", s.sequence},
                {"frames", s.frames},
                {"mae", s.mae},
                {"f_beta", s.f_beta},
                {"s_measure", s.s_measure}};
  };
  json seqs = json::array();
  for (const SequenceScores& s : r.sequences) seqs.push_back(scores(s));
  json j{{"dataset", r.dataset},
         {"conventions",
          {{"mae", "mean |pred - gt| over pixels"},
           {"f_beta",
            {{"beta2", r.options.beta2},
             {"mode", to_string(r.options.f_mode)},
             {"thresholds", "i/255 for i=1..255, positive when pred >= t"},
             {"empty_gt", 0}}},
           {"s_measure",
            {{"alpha", r.options.alpha},
             {"empty_gt", "1 - mean(pred)"},
             {"full_gt", "mean(pred)"}}},
           {"aggregate", "frame-weighted mean"}}},
         {"sequences", seqs},
         {"aggregate", scores(r.aggregate)}};
  return j.dump(2) + "\n";
}

}  // namespace vsod
