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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {
namespace {

constexpr double kMatlabEps = 2.220446049250313e-16;

const Tensor& p(const vsod::ParamStore& params, const std::string& name) {
  return params.get(name).value();
}

Tensor conv_named(const vsod::ParamStore& params, const std::string& name,
                  const Tensor& x, int stride = 1, int pad = 0,
                  int dilation = 1) {
  return conv2d(x, p(params, name + ".weight"), p(params, name + ".bias"),
                stride, pad, dilation);
}

double tri(double d) { return std::max(0.0, 1.0 - std::abs(d)); }

Tensor broadcast_binary(const Tensor& a, const Tensor& b, bool product) {
  std::vector<int> dims(3);
  for (int i = 0; i < 3; ++i) {
    const int da = a.dim(i), db = b.dim(i);
    if (da != db && da != 1 && db != 1) throw std::runtime_error("broadcast");
    dims[i] = std::max(da, db);
  }
  Tensor out(dims);
  for (int c = 0; c < dims[0]; ++c) {
    for (int y = 0; y < dims[1]; ++y) {
      for (int x = 0; x < dims[2]; ++x) {
        const double va = a.at(a.dim(0) == 1 ? 0 : c, a.dim(1) == 1 ? 0 : y,
                               a.dim(2) == 1 ? 0 : x);
        const double vb = b.at(b.dim(0) == 1 ? 0 : c, b.dim(1) == 1 ? 0 : y,
                               b.dim(2) == 1 ? 0 : x);
        out.at(c, y, x) = product ? va * vb : va + vb;
      }
    }
  }
  return out;
}

std::vector<std::vector<double>> grid(const Tensor& t) {
  std::vector<std::vector<double>> g(t.dim(1), std::vector<double>(t.dim(2)));
  for (int y = 0; y < t.dim(1); ++y) {
    for (int x = 0; x < t.dim(2); ++x) g[y][x] = t.at(0, y, x);
  }
  return g;
}

double object_similarity(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  long double mean = 0;
  for (double a : v) mean += a;
  mean /= v.size();
  long double ss = 0;
  for (double a : v) ss += (a - mean) * (a - mean);
  const long double sd = v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0L;
  return static_cast<double>(2 * mean / (mean * mean + 1 + sd + kMatlabEps));
}

double block_ssim(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double vx = 0, vy = 0, cxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
    cxy += (x[i] - mx) * (y[i] - my);
  }
  vx /= n - 1 + kMatlabEps;
  vy /= n - 1 + kMatlabEps;
  cxy /= n - 1 + kMatlabEps;
  const double alpha = 4 * mx * my * cxy;
  const double beta = (mx * mx + my * my) * (vx + vy);
  if (alpha != 0) return alpha / (beta + kMatlabEps);
  if (beta == 0) return 1.0;
  return 0.0;
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b, int stride,
              int pad, int dilation) {
  const int cin = x.dim(0), h = x.dim(1), wd = x.dim(2);
  const int cout = w.dim(0), k = w.dim(2);
  const int span = dilation * (k - 1) + 1;
  const int oh = (h + 2 * pad - span) / stride + 1;
  const int ow = (wd + 2 * pad - span) / stride + 1;
  Tensor out({cout, oh, ow});
  for (int o = 0; o < cout; ++o) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        long double acc = b.empty() ? 0.0 : b[o];
        for (int c = 0; c < cin; ++c) {
          for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
              const int iy = oy * stride - pad + ky * dilation;
              const int ix = ox * stride - pad + kx * dilation;
              if (iy < 0 || iy >= h || ix < 0 || ix >= wd) continue;
              const std::size_t wi =
                  ((static_cast<std::size_t>(o) * cin + c) * k + ky) * k + kx;
              acc += static_cast<long double>(w[wi]) * x.at(c, iy, ix);
            }
          }
        }
        out.at(o, oy, ox) = static_cast<double>(acc);
      }
    }
  }
  return out;
}

Tensor relu(const Tensor& x) {
  Tensor out = x;
  for (double& v : out.data()) v = v > 0 ? v : 0.0;
  return out;
}

Tensor sigmoid(const Tensor& x) {
  Tensor out = x;
  for (double& v : out.data()) v = 1.0 / (1.0 + std::exp(-v));
  return out;
}

Tensor bilinear(const Tensor& x, int out_h, int out_w) {
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  Tensor out({c, out_h, out_w});
  for (int ch = 0; ch < c; ++ch) {
    for (int oy = 0; oy < out_h; ++oy) {
      const double sy = std::clamp((oy + 0.5) * h / out_h - 0.5, 0.0,
                                   static_cast<double>(h - 1));
      for (int ox = 0; ox < out_w; ++ox) {
        const double sx = std::clamp((ox + 0.5) * w / out_w - 0.5, 0.0,
                                     static_cast<double>(w - 1));
        long double acc = 0;
        for (int iy = 0; iy < h; ++iy) {
          const double wy = tri(sy - iy);
          if (wy == 0) continue;
          for (int ix = 0; ix < w; ++ix) {
            acc += wy * tri(sx - ix) * x.at(ch, iy, ix);
          }
        }
        out.at(ch, oy, ox) = static_cast<double>(acc);
      }
    }
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  return broadcast_binary(a, b, false);
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return broadcast_binary(a, b, true);
}

Tensor channel_attention(const Tensor& x, const Tensor& w1, const Tensor& b1,
                         const Tensor& w2, const Tensor& b2) {
  const int c = x.dim(0), hidden = w1.dim(0);
  std::vector<double> pooled(c);
  for (int ch = 0; ch < c; ++ch) {
    double m = x.at(ch, 0, 0);
    for (int y = 0; y < x.dim(1); ++y) {
      for (int xx = 0; xx < x.dim(2); ++xx) m = std::max(m, x.at(ch, y, xx));
    }
    pooled[ch] = m;
  }
  std::vector<double> mid(hidden);
  for (int j = 0; j < hidden; ++j) {
    double s = b1[j];
    for (int ch = 0; ch < c; ++ch) s += w1[j * c + ch] * pooled[ch];
    mid[j] = std::max(s, 0.0);
  }
  Tensor out = x;
  for (int ch = 0; ch < c; ++ch) {
    double s = b2[ch];
    for (int j = 0; j < hidden; ++j) s += w2[ch * hidden + j] * mid[j];
    const double gate = 1.0 / (1.0 + std::exp(-s));
    for (int y = 0; y < x.dim(1); ++y) {
      for (int xx = 0; xx < x.dim(2); ++xx) out.at(ch, y, xx) *= gate;
    }
  }
  return out;
}

Tensor spatial_attention(const Tensor& x, const Tensor& w, const Tensor& b,
                         bool max_and_mean) {
  const int c = x.dim(0), h = x.dim(1), wd = x.dim(2);
  Tensor desc({max_and_mean ? 2 : 1, h, wd});
  for (int y = 0; y < h; ++y) {
    for (int xx = 0; xx < wd; ++xx) {
      double m = x.at(0, y, xx), s = 0;
      for (int ch = 0; ch < c; ++ch) {
        m = std::max(m, x.at(ch, y, xx));
        s += x.at(ch, y, xx);
      }
      desc.at(0, y, xx) = m;
      if (max_and_mean) desc.at(1, y, xx) = s / c;
    }
  }
  const Tensor gate = oracle::sigmoid(conv2d(desc, w, b, 1, 3, 1));
  Tensor out = x;
  for (int ch = 0; ch < c; ++ch) {
    for (int y = 0; y < h; ++y) {
      for (int xx = 0; xx < wd; ++xx) out.at(ch, y, xx) *= gate.at(0, y, xx);
    }
  }
  return out;
}

Tensor temporal_modulate(const vsod::ParamStore& params, int level,
                         const Tensor& f_m, bool max_and_mean) {
  const std::string pre = "modulator.level" + std::to_string(level) + ".";
  Tensor y = f_m;
  if (params.contains(pre + "ca.fc1.weight")) {
    y = channel_attention(y, p(params, pre + "ca.fc1.weight"),
                          p(params, pre + "ca.fc1.bias"),
                          p(params, pre + "ca.fc2.weight"),
                          p(params, pre + "ca.fc2.bias"));
  }
  if (params.contains(pre + "sa.conv.weight")) {
    y = spatial_attention(y, p(params, pre + "sa.conv.weight"),
                          p(params, pre + "sa.conv.bias"), max_and_mean);
  }
  return y;
}

Tensor fuse(const vsod::ParamStore& params, int level, const Tensor& f_a,
            const Tensor& f_m, bool max_and_mean) {
  Tensor out = f_a;
  const Tensor m = temporal_modulate(params, level, f_m, max_and_mean);
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] += m[i];
  return out;
}

Tensor rf_block(const vsod::ParamStore& params, const std::string& decoder,
                int level, const Tensor& f) {
  const std::string pre = decoder + ".rf" + std::to_string(level);
  const int dil[3] = {3, 5, 7};
  std::vector<Tensor> branch;
  branch.push_back(conv_named(params, pre + ".b0", f));
  for (int i = 0; i < 3; ++i) {
    const std::string br = pre + ".b" + std::to_string(i + 1);
    const Tensor r = conv_named(params, br + ".reduce", f);
    branch.push_back(conv_named(params, br + ".dilated", r, 1, dil[i], dil[i]));
  }
  const int wb = branch[0].dim(0);
  Tensor cat({4 * wb, f.dim(1), f.dim(2)});
  for (int i = 0; i < 4; ++i) {
    for (int c = 0; c < wb; ++c) {
      for (int y = 0; y < f.dim(1); ++y) {
        for (int x = 0; x < f.dim(2); ++x) {
          cat.at(i * wb + c, y, x) = branch[i].at(c, y, x);
        }
      }
    }
  }
  return relu(add(conv_named(params, pre + ".fuse", cat),
                  conv_named(params, pre + ".shortcut", f)));
}

Broadcast broadcast(const vsod::ParamStore& params, const std::string& decoder,
                    const Tensor& r3, const Tensor& r4, const Tensor& r5) {
  auto g = [&](const std::string& w, const Tensor& src, const Tensor& like) {
    return relu(conv_named(params, decoder + ".broadcast." + w,
                           bilinear(src, like.dim(1), like.dim(2)), 1, 1));
  };
  Broadcast out;
  out.p5 = r5;
  out.p4 = mul(r4, g("w5_4", r5, r4));
  out.p3 = mul(mul(r3, g("w4_3", r4, r3)), g("w5_3", r5, r3));
  return out;
}

Tensor unet(const vsod::ParamStore& params, const std::string& decoder,
            const Broadcast& b) {
  Tensor u4 = add(bilinear(b.p5, b.p4.dim(1), b.p4.dim(2)), b.p4);
  u4 = relu(conv_named(params, decoder + ".unet.conv4", u4, 1, 1));
  Tensor u3 = add(bilinear(u4, b.p3.dim(1), b.p3.dim(2)), b.p3);
  u3 = relu(conv_named(params, decoder + ".unet.conv3", u3, 1, 1));
  return conv_named(params, decoder + ".unet.head", u3);
}

Tensor partial_decode(const vsod::ParamStore& params,
                      const std::string& decoder, const Tensor& f3,
                      const Tensor& f4, const Tensor& f5) {
  return unet(params, decoder,
              broadcast(params, decoder, rf_block(params, decoder, 3, f3),
                        rf_block(params, decoder, 4, f4),
                        rf_block(params, decoder, 5, f5)));
}

Tensor teach(const Tensor& f, const Tensor& mask) {
  const Tensor m = bilinear(mask, f.dim(1), f.dim(2));
  Tensor out = f;
  for (int c = 0; c < f.dim(0); ++c) {
    for (int y = 0; y < f.dim(1); ++y) {
      for (int x = 0; x < f.dim(2); ++x) {
        out.at(c, y, x) = f.at(c, y, x) * (1.0 + m.at(0, y, x));
      }
    }
  }
  return out;
}

std::vector<Tensor> pyramid(const vsod::ParamStore& params,
                            const std::string& branch, const Tensor& image) {
  std::vector<Tensor> levels;
  Tensor x = image;
  for (int k = 1; k <= 5; ++k) {
    const std::string s = "backbone." + branch + ".stage" + std::to_string(k);
    x = relu(conv_named(params, s + ".conv1", x, 2, 1));
    x = relu(conv_named(params, s + ".conv2", x, 1, 1));
    levels.push_back(x);
  }
  return levels;
}

Masks dual_forward(const vsod::ParamStore& params, int input_size,
                   const Tensor& frame, const Tensor& flow) {
  const std::vector<Tensor> m = pyramid(params, "motion", flow);
  const Tensor zm = partial_decode(params, "decoder.teacher", m[2], m[3], m[4]);
  std::vector<Tensor> f;
  Tensor x = frame;
  for (int k = 1; k <= 5; ++k) {
    const std::string s = "backbone.appearance.stage" + std::to_string(k);
    x = relu(conv_named(params, s + ".conv1", x, 2, 1));
    x = relu(conv_named(params, s + ".conv2", x, 1, 1));
    x = fuse(params, k, x, m[k - 1]);
    f.push_back(x);
  }
  const Tensor mask = oracle::sigmoid(zm);
  const Tensor za = partial_decode(params, "decoder.student", teach(f[2], mask),
                                   teach(f[3], mask), teach(f[4], mask));
  return {bilinear(zm, input_size, input_size),
          bilinear(za, input_size, input_size)};
}

double bce(const Tensor& logits, const Tensor& target) {
  long double total = 0;
  for (std::size_t i = 0; i < logits.numel(); ++i) {
    const long double s = 1.0L / (1.0L + std::exp(-static_cast<long double>(logits[i])));
    const long double y = target[i];
    long double term = 0;
    if (y > 0) term -= y * std::log(s);
    if (y < 1) term -= (1 - y) * std::log(1 - s);
    total += term;
  }
  return static_cast<double>(total / logits.numel());
}

double mae(const Tensor& pred, const Tensor& gt) {
  long double s = 0;
  for (std::size_t i = 0; i < pred.numel(); ++i) {
    s += std::abs(static_cast<long double>(pred[i]) - gt[i]);
  }
  return static_cast<double>(s / pred.numel());
}

double f_beta_max(const Tensor& pred, const Tensor& gt, double beta2) {
  double best = 0;
  for (int i = 1; i <= 255; ++i) {
    const double t = i / 255.0;
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t j = 0; j < pred.numel(); ++j) {
      const bool on = pred[j] >= t;
      const bool fg = gt[j] > 0.5;
      tp += on && fg;
      fp += on && !fg;
      fn += !on && fg;
    }
    if (tp + fn == 0) return 0.0;
    const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double rec = tp / (tp + fn);
    const double f =
        prec + rec > 0 ? (1 + beta2) * prec * rec / (beta2 * prec + rec) : 0.0;
    best = std::max(best, f);
  }
  return best;
}

double s_measure(const Tensor& pred, const Tensor& gt, double alpha) {
  const auto P = grid(pred);
  const auto G = grid(gt);
  const int rows = static_cast<int>(G.size()), cols = static_cast<int>(G[0].size());
  double fg_count = 0, psum = 0;
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      fg_count += G[y][x];
      psum += P[y][x];
    }
  }
  const double area = static_cast<double>(rows) * cols;
  const double ratio = fg_count / area;
  if (ratio == 0) return std::max(0.0, 1 - psum / area);
  if (ratio == 1) return std::min(1.0, psum / area);

  std::vector<double> fg, bg;
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      if (G[y][x] == 1) fg.push_back(P[y][x]);
      else bg.push_back(1 - P[y][x]);
    }
  }
  const double s_obj =
      ratio * object_similarity(fg) + (1 - ratio) * object_similarity(bg);

  // Centroid in 1-based pixel coordinates.
  double col_acc = 0, row_acc = 0;
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      col_acc += G[y][x] * (x + 1);
      row_acc += G[y][x] * (y + 1);
    }
  }
  const int X = static_cast<int>(std::round(col_acc / fg_count));
  const int Y = static_cast<int>(std::round(row_acc / fg_count));
  struct Box {
    int r0, r1, c0, c1;
  };
  const Box boxes[4] = {{0, Y, 0, X}, {0, Y, X, cols}, {Y, rows, 0, X},
                        {Y, rows, X, cols}};
  double s_reg = 0;
  for (const Box& b : boxes) {
    std::vector<double> xs, ys;
    for (int y = b.r0; y < b.r1; ++y) {
      for (int x = b.c0; x < b.c1; ++x) {
        xs.push_back(P[y][x]);
        ys.push_back(G[y][x]);
      }
    }
    if (xs.empty()) continue;
    s_reg += xs.size() / area * block_ssim(xs, ys);
  }
  return std::clamp(alpha * s_obj + (1 - alpha) * s_reg, 0.0, 1.0);
}

Tensor random_tensor(std::vector<int> dims, std::mt19937_64& rng, double lo,
                     double hi) {
  Tensor t(std::move(dims));
  std::uniform_real_distribution<double> u(lo, hi);
  for (double& v : t.data()) v = u(rng);
  return t;
}

Tensor random_binary(int h, int w, std::mt19937_64& rng, double prob) {
  Tensor t({1, h, w});
  std::bernoulli_distribution b(prob);
  for (double& v : t.data()) v = b(rng) ? 1.0 : 0.0;
  return t;
}

void randomize(vsod::ParamStore& params, std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> u(-amp, amp);
  for (auto& [name, var] : params.items()) {
    for (double& v : var.mutable_value().data()) v = u(rng);
  }
}

}  // namespace oracle
