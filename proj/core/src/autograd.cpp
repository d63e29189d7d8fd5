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

#include "vsod/autograd.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "vsod/errors.hpp"

namespace vsod {
namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

thread_local bool t_grad_enabled = true;
thread_local KinkProbe* t_probe = nullptr;

Tensor& grad_of(Node* n) {
  if (n->grad.empty()) n->grad = Tensor(n->value.dims(), 0.0);
  return n->grad;
}

// Wraps `value` into a node. The backward closure is kept only when some
// input participates in differentiation.
Var make_result(Tensor value, std::vector<Var> inputs,
                std::function<void(Node&)> backward_fn) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  if (t_grad_enabled) {
    bool any = std::any_of(inputs.begin(), inputs.end(),
                           [](const Var& v) { return v.requires_grad(); });
    if (any) {
      node->requires_grad = true;
      node->inputs.reserve(inputs.size());
      for (auto& v : inputs) node->inputs.push_back(v.shared());
      node->backward = std::move(backward_fn);
    }
  }
  return Var::from_node(std::move(node));
}

void require_rank3(const Tensor& t, const char* op) {
  if (t.rank() != 3) {
    throw ShapeError(std::string(op) + " expects a (C,H,W) tensor, got " +
                     t.shape_string());
  }
}

// Output shape of a broadcast binary op, or ShapeError.
std::vector<int> broadcast_dims(const Tensor& a, const Tensor& b,
                                const char* op) {
  if (a.rank() != b.rank()) {
    throw ShapeError(std::string(op) + ": rank mismatch " + a.shape_string() +
                     " vs " + b.shape_string());
  }
  std::vector<int> out(a.dims());
  for (int i = 0; i < a.rank(); ++i) {
    int da = a.dim(i), db = b.dim(i);
    if (da == db) continue;
    if (da == 1) {
      out[i] = db;
    } else if (db != 1) {
      throw ShapeError(std::string(op) + ": cannot broadcast " +
                       a.shape_string() + " with " + b.shape_string());
    }
  }
  return out;
}

// Index of output element (c,y,x) in a possibly broadcast rank-3 operand.
struct Broadcast3 {
  int sc, sy, sx;  // strides, zero on broadcast axes
  explicit Broadcast3(const Tensor& t) {
    sx = t.dim(2) == 1 ? 0 : 1;
    sy = t.dim(1) == 1 ? 0 : t.dim(2);
    sc = t.dim(0) == 1 ? 0 : t.dim(1) * t.dim(2);
  }
  std::size_t at(int c, int y, int x) const {
    return static_cast<std::size_t>(c) * sc + static_cast<std::size_t>(y) * sy +
           static_cast<std::size_t>(x) * sx;
  }
};

template <typename Fn>
void for_each_broadcast(const std::vector<int>& out, const Tensor& a,
                        const Tensor& b, Fn fn) {
  Broadcast3 ia(a), ib(b);
  std::size_t o = 0;
  for (int c = 0; c < out[0]; ++c) {
    for (int y = 0; y < out[1]; ++y) {
      for (int x = 0; x < out[2]; ++x, ++o) {
        fn(o, ia.at(c, y, x), ib.at(c, y, x));
      }
    }
  }
}

int conv_out_size(int in, int k, Conv2dSpec s) {
  return (in + 2 * s.padding - s.dilation * (k - 1) - 1) / s.stride + 1;
}

// Unfolds x into a (C*k*k) x (Ho*Wo) row-major matrix.
void im2col(const Tensor& x, int k, Conv2dSpec s, int ho, int wo,
            double* cols) {
  const int c_in = x.channels(), h = x.height(), w = x.width();
  const double* src = x.raw();
  std::size_t row = 0;
  for (int c = 0; c < c_in; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx, ++row) {
        double* dst = cols + row * static_cast<std::size_t>(ho) * wo;
        for (int oy = 0; oy < ho; ++oy) {
          int iy = oy * s.stride - s.padding + ky * s.dilation;
          if (iy < 0 || iy >= h) {
            std::fill(dst, dst + wo, 0.0);
            dst += wo;
            continue;
          }
          const double* src_row =
              src + (static_cast<std::size_t>(c) * h + iy) * w;
          for (int ox = 0; ox < wo; ++ox) {
            int ix = ox * s.stride - s.padding + kx * s.dilation;
            *dst++ = (ix >= 0 && ix < w) ? src_row[ix] : 0.0;
          }
        }
      }
    }
  }
}

void col2im(const double* cols, int k, Conv2dSpec s, int ho, int wo,
            Tensor& dx) {
  const int c_in = dx.channels(), h = dx.height(), w = dx.width();
  double* dst = dx.raw();
  std::size_t row = 0;
  for (int c = 0; c < c_in; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx, ++row) {
        const double* src = cols + row * static_cast<std::size_t>(ho) * wo;
        for (int oy = 0; oy < ho; ++oy) {
          int iy = oy * s.stride - s.padding + ky * s.dilation;
          if (iy < 0 || iy >= h) {
            src += wo;
            continue;
          }
          double* dst_row = dst + (static_cast<std::size_t>(c) * h + iy) * w;
          for (int ox = 0; ox < wo; ++ox, ++src) {
            int ix = ox * s.stride - s.padding + kx * s.dilation;
            if (ix >= 0 && ix < w) dst_row[ix] += *src;
          }
        }
      }
    }
  }
}

// Interpolation taps along one axis for half-pixel-centre resampling.
struct Taps {
  std::vector<int> lo, hi;
  std::vector<double> frac;
};

Taps bilinear_taps(int in, int out) {
  Taps t;
  t.lo.resize(out);
  t.hi.resize(out);
  t.frac.resize(out);
  const double ratio = static_cast<double>(in) / out;
  for (int i = 0; i < out; ++i) {
    double src = (i + 0.5) * ratio - 0.5;
    if (src < 0.0) src = 0.0;
    int lo = static_cast<int>(src);
    if (lo > in - 1) lo = in - 1;
    t.lo[i] = lo;
    t.hi[i] = lo < in - 1 ? lo + 1 : lo;
    t.frac[i] = src - lo;
  }
  return t;
}

}  // namespace

Var::Var(Tensor value, bool requires_grad) : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

void Var::zero_grad() {
  if (node_ && !node_->grad.empty()) node_->grad.fill(0.0);
}

void backward(const Var& root) {
  if (!root.defined() || root.value().numel() != 1) {
    throw ShapeError("backward() requires a single-element root");
  }
  if (!root.requires_grad()) return;

  // Iterative post-order DFS yields a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root.node(), 0);
  seen.insert(root.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  grad_of(root.node())[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward && !n->grad.empty()) n->backward(*n);
  }
  // Intermediate gradients are not needed after propagation.
  for (Node* n : order) {
    if (n->backward) n->grad = Tensor();
  }
}

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) {
  t_grad_enabled = false;
}
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }

bool grad_enabled() { return t_grad_enabled; }

KinkProbe::KinkProbe() : previous_(t_probe), hash_(14695981039346656037ull) {
  t_probe = this;
}
KinkProbe::~KinkProbe() { t_probe = previous_; }

void KinkProbe::record(std::uint64_t v) {
  hash_ ^= v + 0x9e3779b97f4a7c15ull + (hash_ << 6) + (hash_ >> 2);
  hash_ *= 1099511628211ull;
}

Var conv2d(const Var& x, const Var& weight, const Var& bias, Conv2dSpec spec) {
  const Tensor& xv = x.value();
  const Tensor& wv = weight.value();
  require_rank3(xv, "conv2d");
  if (wv.rank() != 4 || wv.dim(2) != wv.dim(3)) {
    throw ShapeError("conv2d weight must be (O,C,k,k), got " +
                     wv.shape_string());
  }
  if (wv.dim(1) != xv.channels()) {
    throw ShapeError("conv2d: weight expects " + std::to_string(wv.dim(1)) +
                     " input channels, input has " +
                     std::to_string(xv.channels()));
  }
  const int out_c = wv.dim(0), k = wv.dim(2);
  const int ho = conv_out_size(xv.height(), k, spec);
  const int wo = conv_out_size(xv.width(), k, spec);
  if (ho <= 0 || wo <= 0) {
    throw ShapeError("conv2d: input " + xv.shape_string() +
                     " too small for kernel");
  }
  if (bias.defined() &&
      (bias.value().rank() != 1 || bias.value().dim(0) != out_c)) {
    throw ShapeError("conv2d bias must be (" + std::to_string(out_c) + ")");
  }

  const int rows = xv.channels() * k * k;
  const int npix = ho * wo;
  const bool pointwise = k == 1 && spec.stride == 1 && spec.padding == 0;
  auto cols = std::make_shared<std::vector<double>>();
  const double* cols_ptr = xv.raw();
  if (!pointwise) {
    cols->resize(static_cast<std::size_t>(rows) * npix);
    im2col(xv, k, spec, ho, wo, cols->data());
    cols_ptr = cols->data();
  }

  Tensor out({out_c, ho, wo});
  MatrixMap out_m(out.raw(), out_c, npix);
  ConstMatrixMap w_m(wv.raw(), out_c, rows);
  ConstMatrixMap col_m(cols_ptr, rows, npix);
  out_m.noalias() = w_m * col_m;
  if (bias.defined()) {
    for (int o = 0; o < out_c; ++o) out_m.row(o).array() += bias.value()[o];
  }

  std::vector<Var> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);
  return make_result(
      std::move(out), std::move(inputs),
      [cols, pointwise, k, spec, ho, wo, out_c, rows, npix](Node& n) {
        Node* xn = n.inputs[0].get();
        Node* wn = n.inputs[1].get();
        ConstMatrixMap g(n.grad.raw(), out_c, npix);
        const double* cp = pointwise ? xn->value.raw() : cols->data();
        ConstMatrixMap col_m(cp, rows, npix);
        if (wn->requires_grad) {
          MatrixMap gw(grad_of(wn).raw(), out_c, rows);
          gw.noalias() += g * col_m.transpose();
        }
        if (n.inputs.size() > 2 && n.inputs[2]->requires_grad) {
          Tensor& gb = grad_of(n.inputs[2].get());
          for (int o = 0; o < out_c; ++o) gb[o] += g.row(o).sum();
        }
        if (xn->requires_grad) {
          ConstMatrixMap w_m(wn->value.raw(), out_c, rows);
          Tensor& gx = grad_of(xn);
          if (pointwise) {
            MatrixMap gx_m(gx.raw(), rows, npix);
            gx_m.noalias() += w_m.transpose() * g;
          } else {
            RowMatrix dcols = w_m.transpose() * g;
            col2im(dcols.data(), k, spec, ho, wo, gx);
          }
        }
      });
}

Var relu(const Var& x) {
  const Tensor& xv = x.value();
  Tensor out(xv.dims());
  for (std::size_t i = 0; i < xv.numel(); ++i) {
    out[i] = xv[i] > 0.0 ? xv[i] : 0.0;
  }
  if (t_probe) {
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < xv.numel(); ++i) {
      word = (word << 1) | (xv[i] > 0.0 ? 1u : 0u);
      if (i % 64 == 63) {
        t_probe->record(word);
        word = 0;
      }
    }
    t_probe->record(word);
  }
  return make_result(std::move(out), {x}, [](Node& n) {
    Node* xn = n.inputs[0].get();
    Tensor& gx = grad_of(xn);
    for (std::size_t i = 0; i < gx.numel(); ++i) {
      if (xn->value[i] > 0.0) gx[i] += n.grad[i];
    }
  });
}

Tensor sigmoid(const Tensor& x) {
  Tensor out(x.dims());
  for (std::size_t i = 0; i < x.numel(); ++i) {
    out[i] = 1.0 / (1.0 + std::exp(-x[i]));
  }
  return out;
}

Var sigmoid(const Var& x) {
  return make_result(sigmoid(x.value()), {x}, [](Node& n) {
    Tensor& gx = grad_of(n.inputs[0].get());
    for (std::size_t i = 0; i < gx.numel(); ++i) {
      double s = n.value[i];
      gx[i] += n.grad[i] * s * (1.0 - s);
    }
  });
}

Var scale(const Var& x, double factor) {
  Tensor out(x.value().dims());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = x.value()[i] * factor;
  return make_result(std::move(out), {x}, [factor](Node& n) {
    Tensor& gx = grad_of(n.inputs[0].get());
    for (std::size_t i = 0; i < gx.numel(); ++i) gx[i] += n.grad[i] * factor;
  });
}

Var add(const Var& a, const Var& b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.same_shape(bv)) {
    Tensor out(av.dims());
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] = av[i] + bv[i];
    return make_result(std::move(out), {a, b}, [](Node& n) {
      for (int j = 0; j < 2; ++j) {
        Node* in = n.inputs[j].get();
        if (in->requires_grad) grad_of(in) += n.grad;
      }
    });
  }
  require_rank3(av, "add");
  auto dims = broadcast_dims(av, bv, "add");
  Tensor out(dims);
  for_each_broadcast(dims, av, bv, [&](std::size_t o, std::size_t i,
                                       std::size_t j) {
    out[o] = av[i] + bv[j];
  });
  return make_result(std::move(out), {a, b}, [](Node& n) {
    Node* an = n.inputs[0].get();
    Node* bn = n.inputs[1].get();
    Tensor* ga = an->requires_grad ? &grad_of(an) : nullptr;
    Tensor* gb = bn->requires_grad ? &grad_of(bn) : nullptr;
    for_each_broadcast(n.value.dims(), an->value, bn->value,
                       [&](std::size_t o, std::size_t i, std::size_t j) {
                         if (ga) (*ga)[i] += n.grad[o];
                         if (gb) (*gb)[j] += n.grad[o];
                       });
  });
}

Var mul(const Var& a, const Var& b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.same_shape(bv)) {
    Tensor out(av.dims());
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] = av[i] * bv[i];
    return make_result(std::move(out), {a, b}, [](Node& n) {
      Node* an = n.inputs[0].get();
      Node* bn = n.inputs[1].get();
      if (an->requires_grad) {
        Tensor& ga = grad_of(an);
        for (std::size_t i = 0; i < ga.numel(); ++i)
          ga[i] += n.grad[i] * bn->value[i];
      }
      if (bn->requires_grad) {
        Tensor& gb = grad_of(bn);
        for (std::size_t i = 0; i < gb.numel(); ++i)
          gb[i] += n.grad[i] * an->value[i];
      }
    });
  }
  require_rank3(av, "mul");
  auto dims = broadcast_dims(av, bv, "mul");
  Tensor out(dims);
  for_each_broadcast(dims, av, bv, [&](std::size_t o, std::size_t i,
                                       std::size_t j) {
    out[o] = av[i] * bv[j];
  });
  return make_result(std::move(out), {a, b}, [](Node& n) {
    Node* an = n.inputs[0].get();
    Node* bn = n.inputs[1].get();
    Tensor* ga = an->requires_grad ? &grad_of(an) : nullptr;
    Tensor* gb = bn->requires_grad ? &grad_of(bn) : nullptr;
    for_each_broadcast(n.value.dims(), an->value, bn->value,
                       [&](std::size_t o, std::size_t i, std::size_t j) {
                         if (ga) (*ga)[i] += n.grad[o] * bn->value[j];
                         if (gb) (*gb)[j] += n.grad[o] * an->value[i];
                       });
  });
}

Var global_max_pool(const Var& x) {
  const Tensor& xv = x.value();
  require_rank3(xv, "global_max_pool");
  const int c = xv.channels();
  const std::size_t plane = static_cast<std::size_t>(xv.height()) * xv.width();
  if (plane == 0) throw ShapeError("global_max_pool on empty spatial extent");
  Tensor out({c, 1, 1});
  std::vector<std::size_t> argmax(c);
  for (int ch = 0; ch < c; ++ch) {
    const double* p = xv.raw() + ch * plane;
    std::size_t best = 0;
    for (std::size_t i = 1; i < plane; ++i) {
      if (p[i] > p[best]) best = i;
    }
    argmax[ch] = ch * plane + best;
    out[ch] = p[best];
    if (t_probe) t_probe->record(best);
  }
  return make_result(std::move(out), {x},
                     [argmax = std::move(argmax)](Node& n) {
                       Tensor& gx = grad_of(n.inputs[0].get());
                       for (std::size_t ch = 0; ch < argmax.size(); ++ch) {
                         gx[argmax[ch]] += n.grad[ch];
                       }
                     });
}

Var channel_max(const Var& x) {
  const Tensor& xv = x.value();
  require_rank3(xv, "channel_max");
  const int c = xv.channels();
  const std::size_t plane = static_cast<std::size_t>(xv.height()) * xv.width();
  if (c == 0) throw ShapeError("channel_max on zero channels");
  Tensor out({1, xv.height(), xv.width()});
  std::vector<int> argmax(plane, 0);
  for (std::size_t i = 0; i < plane; ++i) {
    double best = xv[i];
    for (int ch = 1; ch < c; ++ch) {
      double v = xv[ch * plane + i];
      if (v > best) {
        best = v;
        argmax[i] = ch;
      }
    }
    out[i] = best;
  }
  if (t_probe) {
    for (int a : argmax) t_probe->record(static_cast<std::uint64_t>(a));
  }
  return make_result(std::move(out), {x},
                     [argmax = std::move(argmax), plane](Node& n) {
                       Tensor& gx = grad_of(n.inputs[0].get());
                       for (std::size_t i = 0; i < plane; ++i) {
                         gx[argmax[i] * plane + i] += n.grad[i];
                       }
                     });
}

Var channel_mean(const Var& x) {
  const Tensor& xv = x.value();
  require_rank3(xv, "channel_mean");
  const int c = xv.channels();
  const std::size_t plane = static_cast<std::size_t>(xv.height()) * xv.width();
  if (c == 0) throw ShapeError("channel_mean on zero channels");
  Tensor out({1, xv.height(), xv.width()});
  for (int ch = 0; ch < c; ++ch) {
    for (std::size_t i = 0; i < plane; ++i) out[i] += xv[ch * plane + i];
  }
  for (std::size_t i = 0; i < plane; ++i) out[i] /= c;
  return make_result(std::move(out), {x}, [c, plane](Node& n) {
    Tensor& gx = grad_of(n.inputs[0].get());
    for (int ch = 0; ch < c; ++ch) {
      for (std::size_t i = 0; i < plane; ++i) {
        gx[ch * plane + i] += n.grad[i] / c;
      }
    }
  });
}

Var concat_channels(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_channels of nothing");
  const Tensor& first = parts.front().value();
  require_rank3(first, "concat_channels");
  int total = 0;
  for (const auto& p : parts) {
    const Tensor& v = p.value();
    require_rank3(v, "concat_channels");
    if (v.height() != first.height() || v.width() != first.width()) {
      throw ShapeError("concat_channels spatial mismatch " + v.shape_string() +
                       " vs " + first.shape_string());
    }
    total += v.channels();
  }
  Tensor out({total, first.height(), first.width()});
  std::size_t offset = 0;
  for (const auto& p : parts) {
    std::copy(p.value().data().begin(), p.value().data().end(),
              out.raw() + offset);
    offset += p.value().numel();
  }
  return make_result(std::move(out), parts, [](Node& n) {
    std::size_t offset = 0;
    for (auto& in : n.inputs) {
      std::size_t len = in->value.numel();
      if (in->requires_grad) {
        Tensor& g = grad_of(in.get());
        for (std::size_t i = 0; i < len; ++i) g[i] += n.grad[offset + i];
      }
      offset += len;
    }
  });
}

Tensor resize_bilinear(const Tensor& x, int out_h, int out_w) {
  require_rank3(x, "resize_bilinear");
  if (out_h <= 0 || out_w <= 0) {
    throw ShapeError("resize_bilinear target must be positive");
  }
  Taps ty = bilinear_taps(x.height(), out_h);
  Taps tx = bilinear_taps(x.width(), out_w);
  Tensor out({x.channels(), out_h, out_w});
  for (int c = 0; c < x.channels(); ++c) {
    for (int y = 0; y < out_h; ++y) {
      double fy = ty.frac[y];
      for (int xo = 0; xo < out_w; ++xo) {
        double fx = tx.frac[xo];
        double top = x.at(c, ty.lo[y], tx.lo[xo]) * (1.0 - fx) +
                     x.at(c, ty.lo[y], tx.hi[xo]) * fx;
        double bot = x.at(c, ty.hi[y], tx.lo[xo]) * (1.0 - fx) +
                     x.at(c, ty.hi[y], tx.hi[xo]) * fx;
        out.at(c, y, xo) = top * (1.0 - fy) + bot * fy;
      }
    }
  }
  return out;
}

Var resize_bilinear(const Var& x, int out_h, int out_w) {
  const Tensor& xv = x.value();
  if (xv.rank() == 3 && xv.height() == out_h && xv.width() == out_w) {
    return x;
  }
  Tensor out = resize_bilinear(xv, out_h, out_w);
  return make_result(std::move(out), {x}, [out_h, out_w](Node& n) {
    Node* xn = n.inputs[0].get();
    Tensor& gx = grad_of(xn);
    Taps ty = bilinear_taps(xn->value.height(), out_h);
    Taps tx = bilinear_taps(xn->value.width(), out_w);
    for (int c = 0; c < gx.channels(); ++c) {
      for (int y = 0; y < out_h; ++y) {
        double fy = ty.frac[y];
        for (int xo = 0; xo < out_w; ++xo) {
          double fx = tx.frac[xo];
          double g = n.grad.at(c, y, xo);
          gx.at(c, ty.lo[y], tx.lo[xo]) += g * (1.0 - fy) * (1.0 - fx);
          gx.at(c, ty.lo[y], tx.hi[xo]) += g * (1.0 - fy) * fx;
          gx.at(c, ty.hi[y], tx.lo[xo]) += g * fy * (1.0 - fx);
          gx.at(c, ty.hi[y], tx.hi[xo]) += g * fy * fx;
        }
      }
    }
  });
}

Var sum(const Var& x) {
  double s = 0.0;
  for (double v : x.value().data()) s += v;
  return make_result(Tensor({1}, s), {x}, [](Node& n) {
    Tensor& gx = grad_of(n.inputs[0].get());
    const double g = n.grad[0];
    for (std::size_t i = 0; i < gx.numel(); ++i) gx[i] += g;
  });
}

Var bce_with_logits_mean(const Var& logits, const Tensor& target) {
  const Tensor& z = logits.value();
  if (!z.same_shape(target)) {
    throw ShapeError("bce: logits " + z.shape_string() + " vs target " +
                     target.shape_string());
  }
  const double count = static_cast<double>(z.numel());
  double total = 0.0;
  for (std::size_t i = 0; i < z.numel(); ++i) {
    double zi = z[i];
    total += std::max(zi, 0.0) - zi * target[i] +
             std::log1p(std::exp(-std::abs(zi)));
  }
  return make_result(
      Tensor({1}, total / count), {logits}, [target, count](Node& n) {
        Node* zn = n.inputs[0].get();
        Tensor& gz = grad_of(zn);
        const double g = n.grad[0] / count;
        for (std::size_t i = 0; i < gz.numel(); ++i) {
          double s = 1.0 / (1.0 + std::exp(-zn->value[i]));
          gz[i] += g * (s - target[i]);
        }
      });
}

}  // namespace vsod
