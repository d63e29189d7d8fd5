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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "instances.hpp"
#include "oracles.hpp"
#include "test_support.hpp"
#include "vsod/errors.hpp"
#include "vsod/image_io.hpp"
#include "vsod/metrics.hpp"

namespace {

using vsod::Tensor;

Tensor map2x2(double a, double b, double c, double d) {
  return Tensor({1, 2, 2}, std::vector<double>{a, b, c, d});
}

Tensor square_gt(int n, int x0, int y0, int x1, int y1) {
  Tensor g({1, n, n});
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) g.at(0, y, x) = 1.0;
  }
  return g;
}

TEST(Mae, WorkedExample) {
  EXPECT_DOUBLE_EQ(vsod::mae(map2x2(0.5, 0, 1, 1), map2x2(1, 0, 1, 0)), 0.375);
}

TEST(Mae, PerfectAndInverted) {
  Tensor g = square_gt(8, 2, 2, 5, 6);
  Tensor inv = g;
  for (double& v : inv.data()) v = 1 - v;
  EXPECT_EQ(vsod::mae(g, g), 0.0);
  EXPECT_EQ(vsod::mae(inv, g), 1.0);
}

TEST(Mae, ComplementSymmetry) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    Tensor p = oracle::random_tensor({1, 5, 7}, rng, 0, 1);
    Tensor g = oracle::random_binary(5, 7, rng);
    Tensor pc = p, gc = g;
    for (double& v : pc.data()) v = 1 - v;
    for (double& v : gc.data()) v = 1 - v;
    EXPECT_NEAR(vsod::mae(p, g), vsod::mae(pc, gc), 1e-15);
  }
}

TEST(FBeta, PerfectBinaryIsOne) {
  Tensor g = square_gt(8, 1, 1, 4, 6);
  EXPECT_DOUBLE_EQ(vsod::f_beta(g, g), 1.0);
}

TEST(FBeta, ZeroPredictionAndEmptyGtGiveZero) {
  Tensor g = square_gt(8, 1, 1, 4, 6);
  EXPECT_EQ(vsod::f_beta(Tensor({1, 8, 8}, 0.0), g), 0.0);
  EXPECT_EQ(vsod::f_beta(g, Tensor({1, 8, 8}, 0.0)), 0.0);
}

TEST(FBeta, GradedThreeByThreeMatchesBruteForce) {
  Tensor p({1, 3, 3}, std::vector<double>{0.9, 0.8, 0.1, 0.7, 0.45, 0.2, 0.3,
                                          0.05, 0.6});
  Tensor g({1, 3, 3}, std::vector<double>{1, 1, 0, 1, 0, 0, 0, 0, 1});
  EXPECT_NEAR(vsod::f_beta(p, g), oracle::f_beta_max(p, g), 1e-12);
  // Hand check: thresholding at 0.6 gives P = R = 1.
  EXPECT_DOUBLE_EQ(vsod::f_beta(p, g), 1.0);
}

TEST(FBeta, ModesAndCurve) {
  std::mt19937_64 rng(4);
  Tensor p = oracle::random_tensor({1, 8, 8}, rng, 0, 1);
  Tensor g = oracle::random_binary(8, 8, rng);
  auto curve = vsod::f_beta_curve(p, g);
  ASSERT_EQ(curve.size(), 255u);
  double mx = 0, mean = 0;
  for (double f : curve) {
    mx = std::max(mx, f);
    mean += f / 255.0;
  }
  EXPECT_DOUBLE_EQ(vsod::f_beta(p, g, 0.3, vsod::FMode::kMax), mx);
  EXPECT_NEAR(vsod::f_beta(p, g, 0.3, vsod::FMode::kMean), mean, 1e-12);
  const double ada = vsod::f_beta(p, g, 0.3, vsod::FMode::kAdaptive);
  EXPECT_GE(ada, 0.0);
  EXPECT_LE(ada, 1.0);
  EXPECT_EQ(vsod::parse_f_mode("adaptive"), vsod::FMode::kAdaptive);
  EXPECT_THROW(vsod::parse_f_mode("median"), vsod::ConfigError);
}

TEST(FBeta, InvariantUnderMonotoneRescalingOfTheGrid) {
  // The sweep only sees which of the 255 threshold bins a value falls in, so
  // any strictly increasing remap that keeps values on the 8-bit grid and
  // keeps their order within the sweep's resolution yields the same maximum.
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor g = oracle::random_binary(8, 8, rng);
    Tensor p({1, 8, 8});
    std::vector<int> levels(p.numel());
    for (std::size_t i = 0; i < p.numel(); ++i) {
      levels[i] = std::uniform_int_distribution<int>(0, 100)(rng);
      p[i] = levels[i] / 255.0;
    }
    Tensor q = p;
    for (std::size_t i = 0; i < q.numel(); ++i) {
      // Strictly increasing on 0..100 and stays within 0..255.
      const int l = levels[i];
      q[i] = (l * 2 + (l * l) / 200) / 255.0;
    }
    EXPECT_NEAR(vsod::f_beta(p, g), vsod::f_beta(q, g), 1e-12);
  }
}

TEST(SMeasure, PerfectAndDegenerateCases) {
  Tensor g = square_gt(8, 2, 1, 6, 5);
  EXPECT_NEAR(vsod::s_measure(g, g), 1.0, 1e-12);
  Tensor zero({1, 8, 8}, 0.0);
  EXPECT_EQ(vsod::s_measure(zero, zero), 1.0);
  Tensor half({1, 8, 8}, 0.25);
  EXPECT_DOUBLE_EQ(vsod::s_measure(half, zero), 0.75);
  Tensor full({1, 8, 8}, 1.0);
  EXPECT_DOUBLE_EQ(vsod::s_measure(half, full), 0.25);
}

TEST(SMeasure, EightByEightMatchesIndependentReference) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    Tensor p = oracle::random_tensor({1, 8, 8}, rng, 0, 1);
    Tensor g = oracle::random_binary(8, 8, rng);
    EXPECT_NEAR(vsod::s_measure(p, g), oracle::s_measure(p, g), 1e-9);
  }
}

TEST(Metrics, RandomInstancesMatchOracles) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 200; ++i) {
    ASSERT_LT(oracle::mae_instance(rng), 1e-9);
    ASSERT_LT(oracle::f_beta_instance(rng), 1e-9);
    ASSERT_LT(oracle::s_measure_instance(rng), 1e-9);
  }
}

TEST(Metrics, RangesHoldOnRandomInputs) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const int h = 1 + i % 8, w = 1 + (i / 8) % 8;
    Tensor p = oracle::random_tensor({1, h, w}, rng, 0, 1);
    Tensor g = oracle::random_binary(h, w, rng, (i % 5) / 4.0);
    for (double v : {vsod::mae(p, g), vsod::f_beta(p, g), vsod::s_measure(p, g)}) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
}

TEST(Metrics, InputValidation) {
  Tensor g = square_gt(4, 0, 0, 2, 2);
  EXPECT_THROW(vsod::mae(Tensor({1, 4, 5}), g), vsod::ShapeError);
  EXPECT_THROW(vsod::mae(Tensor({1, 4, 4}, 1.5), g), vsod::DomainError);
  EXPECT_THROW(vsod::f_beta(g, Tensor({1, 4, 4}, 0.5)), vsod::DomainError);
}

TEST(Evaluate, FrameWeightedAggregate) {
  // Two frames with MAE 0.2 and 0.4.
  Tensor g({1, 1, 5}, std::vector<double>{1, 0, 0, 0, 0});
  Tensor p1({1, 1, 5}, std::vector<double>{1, 1, 0, 0, 0});
  Tensor p2({1, 1, 5}, std::vector<double>{1, 1, 1, 0, 0});
  auto r = vsod::evaluate_frames("d", {{"a", p1, g}, {"b", p2, g}});
  ASSERT_EQ(r.sequences.size(), 2u);
  EXPECT_NEAR(r.aggregate.mae, 0.3, 1e-15);
  EXPECT_EQ(r.aggregate.frames, 2);
  EXPECT_EQ(r.aggregate.sequence, "ALL");
}

TEST(Evaluate, PerfectFrameReport) {
  Tensor g = square_gt(8, 2, 2, 6, 6);
  auto r = vsod::evaluate_frames("d", {{"s", g, g}});
  EXPECT_EQ(r.aggregate.mae, 0.0);
  EXPECT_DOUBLE_EQ(r.aggregate.f_beta, 1.0);
  EXPECT_NEAR(r.aggregate.s_measure, 1.0, 1e-12);
}

TEST(Evaluate, DatasetMatchesPerFrameRecomputation) {
  testing_support::TempDir dir;
  std::mt19937_64 rng(14);
  std::vector<double> maes, fs, ss;
  int frame_count = 0;
  for (int s = 0; s < 2; ++s) {
    const std::string seq = "s" + std::to_string(s);
    for (int t = 1; t <= 6; ++t) {
      const std::string name = vsod::frame_name(t) + ".png";
      vsod::Image8 gt(12, 12, 1), pred(12, 12, 1);
      for (int y = 0; y < 12; ++y) {
        for (int x = 0; x < 12; ++x) {
          gt.at(x, y, 0) = (x > 3 + t % 3 && y > 2 && y < 9) ? 255 : 0;
          pred.at(x, y, 0) = static_cast<std::uint8_t>(rng() % 256);
        }
      }
      vsod::write_png(dir / "gt" / seq / "gt" / name, gt);
      if (t >= 2) {
        vsod::write_png(dir / "pred" / seq / name, pred);
        Tensor p = vsod::to_tensor(pred);
        Tensor g = vsod::to_binary_mask(gt);
        maes.push_back(oracle::mae(p, g));
        fs.push_back(oracle::f_beta_max(p, g));
        ss.push_back(oracle::s_measure(p, g));
        ++frame_count;
      }
    }
  }
  auto r = vsod::evaluate_dataset(dir / "pred", dir / "gt");
  EXPECT_EQ(frame_count, 10);
  EXPECT_EQ(r.aggregate.frames, 10);
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / v.size();
  };
  EXPECT_NEAR(r.aggregate.mae, mean(maes), 1e-12);
  EXPECT_NEAR(r.aggregate.f_beta, mean(fs), 1e-12);
  EXPECT_NEAR(r.aggregate.s_measure, mean(ss), 1e-12);
  const std::string csv = vsod::report_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "dataset,sequence,frames,mae,f_beta,s_measure");

  std::filesystem::remove(dir / "pred" / "s1" / "0004.png");
  try {
    vsod::evaluate_dataset(dir / "pred", dir / "gt");
    FAIL() << "expected InputError";
  } catch (const vsod::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("0004"), std::string::npos) << e.what();
  }
}

}  // namespace
