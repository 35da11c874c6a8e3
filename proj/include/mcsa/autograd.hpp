/* Copyright 2026 The MCSA Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Minimal tape-free reverse-mode automatic differentiation over Tensor.
//
// Every op returns a Var that holds its forward value. If any input requires
// a gradient the result keeps references to its inputs and a closure that
// propagates the output gradient back to them; otherwise the result is a
// plain constant and no graph is retained. backward() topologically sorts the
// graph reachable from a scalar and runs the closures in reverse order.

#ifndef MCSA_AUTOGRAD_HPP_
#define MCSA_AUTOGRAD_HPP_

#include <functional>
#include <memory>
#include <vector>

#include "mcsa/tensor.hpp"

namespace mcsa::ag {

struct Node {
  Tensor value;
  Tensor grad;  // empty until something flows into it
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  // Returns the gradient buffer, zero-allocating it on first use.
  Tensor& grad_buffer();
};

class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  const Tensor& value() const { return node_->value; }
  Tensor& mutable_value() { return node_->value; }
  // Zero tensor of the value's shape when no gradient has been accumulated.
  Tensor grad() const;
  bool requires_grad() const { return node_ && node_->requires_grad; }
  const Shape& shape() const { return node_->value.shape(); }
  std::size_t dim(std::size_t axis) const { return node_->value.dim(axis); }
  bool defined() const { return static_cast<bool>(node_); }
  void zero_grad() { node_->grad = Tensor(); }

  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

Var constant(Tensor value);
Var parameter(Tensor value);

// Seeds d(loss)/d(loss) = 1 and accumulates into every reachable input.
void backward(const Var& loss);

// Elementwise, identical shapes.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& x, double s);

// y's shape must be a suffix of x's shape; y is tiled over the leading axes.
Var add_broadcast(const Var& x, const Var& y);

// x[..., k] · w[k, n] -> [..., n]
Var matmul(const Var& x, const Var& w);
Var linear(const Var& x, const Var& w, const Var& b);
// a[B, m, k] · b[B, k, n] -> [B, m, n]
Var bmm(const Var& a, const Var& b);

Var reshape(const Var& x, Shape shape);
Var permute(const Var& x, const std::vector<std::size_t>& perm);
Var concat(const std::vector<Var>& xs, std::size_t axis);
Var slice(const Var& x, std::size_t axis, std::size_t begin, std::size_t end);

Var relu(const Var& x);
Var sigmoid(const Var& x);
Var swish(const Var& x);
// Gated linear unit over the last axis: first half * sigmoid(second half).
Var glu(const Var& x);

Var softmax(const Var& x);      // over the last axis
Var log_softmax(const Var& x);  // over the last axis
Var layer_norm(const Var& x, const Var& gamma, const Var& beta,
               double eps = 1e-5);

// table[V, D] gathered by ids -> [ids.size(), D]
Var embedding(const Var& table, const std::vector<int>& ids);

// x[T, C, D] -> [T, (2F+1)·C, D]; row j·C + c of frame t holds frame
// t + j − F of channel c, or zeros outside [0, T).
Var context_expand(const Var& x, std::size_t context);

// Grouped 2-D convolution with SAME-style padding (zeros, extra pad at the
// end): x[B, Cin, H, W], kernel[Cout, Cin/groups, KH, KW], bias[Cout].
// Output is [B, Cout, ceil(H/stride_h), ceil(W/stride_w)].
Var conv2d(const Var& x, const Var& kernel, const Var& bias,
           std::size_t stride_h, std::size_t stride_w, std::size_t groups);

// Weighted mean negative log-likelihood: logp[N, V], one target per row.
// Rows with weight 0 are ignored; an all-zero weight vector yields 0.
Var nll_loss(const Var& logp, const std::vector<int>& targets,
             const std::vector<double>& weights);

Var sum(const Var& x);
Var mean(const Var& x);

// Parameter-free helpers shared by the model code.
std::size_t same_out(std::size_t in, std::size_t stride);

}  // namespace mcsa::ag

#endif  // MCSA_AUTOGRAD_HPP_
