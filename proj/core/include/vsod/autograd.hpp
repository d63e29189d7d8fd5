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

// Minimal reverse-mode automatic differentiation over double tensors.
//
// A Var is a handle to a graph node holding a value and, when any input
// requires gradients, a closure that pushes the node's gradient into its
// inputs. Parameters are leaf Vars created with requires_grad = true; their
// gradients accumulate across backward() calls until zero_grad().
//
// Graph construction is skipped entirely inside a NoGradGuard, so inference
// on shared read-only parameters is safe from multiple threads.

#ifndef VSOD_AUTOGRAD_HPP_
#define VSOD_AUTOGRAD_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "vsod/tensor.hpp"

namespace vsod {

struct Node {
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;
};

class Var {
 public:
  Var() = default;
  explicit Var(Tensor value, bool requires_grad = false);

  static Var constant(Tensor value) { return Var(std::move(value), false); }
  static Var parameter(Tensor value) { return Var(std::move(value), true); }

  bool defined() const { return node_ != nullptr; }
  const Tensor& value() const { return node_->value; }
  // Direct access for optimizers and test hooks. Never call on a non-leaf.
  Tensor& mutable_value() { return node_->value; }
  const std::vector<int>& dims() const { return node_->value.dims(); }

  bool requires_grad() const { return node_ && node_->requires_grad; }
  bool has_grad() const { return node_ && !node_->grad.empty(); }
  const Tensor& grad() const { return node_->grad; }
  Tensor& mutable_grad() { return node_->grad; }
  void zero_grad();

  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& shared() const { return node_; }

  static Var from_node(std::shared_ptr<Node> node) {
    Var v;
    v.node_ = std::move(node);
    return v;
  }

 private:
  std::shared_ptr<Node> node_;
};

// Seeds d(root)/d(root) = 1 and propagates. `root` must hold one element.
void backward(const Var& root);

// Disables graph construction on the current thread while alive.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

// Fingerprints the branch decisions taken by non-smooth ops (rectifier
// masks, max-pool argmax). Finite-difference checks compare fingerprints at
// x-h, x and x+h to detect steps that cross a kink.
class KinkProbe {
 public:
  KinkProbe();
  ~KinkProbe();
  KinkProbe(const KinkProbe&) = delete;
  KinkProbe& operator=(const KinkProbe&) = delete;

  std::uint64_t fingerprint() const { return hash_; }
  void record(std::uint64_t v);

 private:
  KinkProbe* previous_;
  std::uint64_t hash_;
};

struct Conv2dSpec {
  int stride = 1;
  int padding = 0;
  int dilation = 1;
};

// x: (C,H,W); weight: (O,C,k,k); bias: (O) or undefined.
Var conv2d(const Var& x, const Var& weight, const Var& bias,
           Conv2dSpec spec = {});

Var relu(const Var& x);
Var sigmoid(const Var& x);
Var scale(const Var& x, double factor);

// Elementwise with broadcasting over rank-3 tensors: each dimension must
// match or be 1 on one side.
Var add(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);

// (C,H,W) -> (C,1,1), maximum over spatial positions.
Var global_max_pool(const Var& x);
// (C,H,W) -> (1,H,W) maximum / mean over channels.
Var channel_max(const Var& x);
Var channel_mean(const Var& x);

Var concat_channels(const std::vector<Var>& parts);

// Bilinear resampling with half-pixel centres (align_corners = false).
Var resize_bilinear(const Var& x, int out_h, int out_w);

// Sum of all elements, returned as a one-element tensor of dims {1}.
Var sum(const Var& x);

// Mean binary cross-entropy of logits against targets in [0,1], evaluated
// as max(z,0) - z*y + log(1 + exp(-|z|)).
Var bce_with_logits_mean(const Var& logits, const Tensor& target);

// Non-differentiable helpers on plain tensors.
Tensor sigmoid(const Tensor& x);
Tensor resize_bilinear(const Tensor& x, int out_h, int out_w);

}  // namespace vsod

#endif  // VSOD_AUTOGRAD_HPP_
