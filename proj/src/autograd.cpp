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

#include "mcsa/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace mcsa::ag {

Tensor& Node::grad_buffer() {
  if (grad.empty() && !value.empty()) grad = Tensor(value.shape(), 0.0);
  return grad;
}

Tensor Var::grad() const {
  if (node_->grad.empty()) return Tensor(node_->value.shape(), 0.0);
  return node_->grad;
}

Var constant(Tensor value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  return Var(n);
}

Var parameter(Tensor value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->requires_grad = true;
  return Var(n);
}

namespace {

using BackwardFn = std::function<void(Node&)>;

Var make_result(Tensor value, std::vector<Var> inputs, BackwardFn fn) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  bool any = false;
  for (const auto& v : inputs) any = any || v.requires_grad();
  if (any) {
    n->requires_grad = true;
    for (auto& v : inputs) n->parents.push_back(v.node());
    n->backward = std::move(fn);
  }
  return Var(n);
}

// Accumulate only into parents that want it.
inline bool wants(const std::shared_ptr<Node>& p) { return p->requires_grad; }

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                shape_str(a.shape()) + " vs " +
                                shape_str(b.shape()));
  }
}

}  // namespace

void backward(const Var& loss) {
  if (loss.value().size() != 1) {
    throw std::invalid_argument("backward: loss must be a scalar");
  }
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  // Iterative post-order DFS.
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  seen.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p->requires_grad && !seen.count(p)) {
        seen.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  loss.node()->grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward && !n->grad.empty()) n->backward(*n);
  }
}

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return make_result(std::move(out), {a, b}, [](Node& n) {
    for (auto& p : n.parents) {
      if (!wants(p)) continue;
      Tensor& g = p->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    }
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return make_result(std::move(out), {a, b}, [](Node& n) {
    const double sign[2] = {1.0, -1.0};
    for (int k = 0; k < 2; ++k) {
      auto& p = n.parents[k];
      if (!wants(p)) continue;
      Tensor& g = p->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += sign[k] * n.grad[i];
    }
  });
}

Var mul(const Var& a, const Var& b) {
  require_same_shape(a, b, "mul");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return make_result(std::move(out), {a, b}, [](Node& n) {
    auto& pa = n.parents[0];
    auto& pb = n.parents[1];
    if (wants(pa)) {
      Tensor& g = pa->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i)
        g[i] += n.grad[i] * pb->value[i];
    }
    if (wants(pb)) {
      Tensor& g = pb->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i)
        g[i] += n.grad[i] * pa->value[i];
    }
  });
}

Var scale(const Var& x, double s) {
  Tensor out = x.value();
  for (double& v : out.vec()) v *= s;
  return make_result(std::move(out), {x}, [s](Node& n) {
    Tensor& g = n.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += s * n.grad[i];
  });
}

Var add_broadcast(const Var& x, const Var& y) {
  const Shape& xs = x.shape();
  const Shape& ys = y.shape();
  if (ys.size() > xs.size() ||
      !std::equal(ys.begin(), ys.end(), xs.end() - ys.size())) {
    throw std::invalid_argument("add_broadcast: " + shape_str(ys) +
                                " is not a suffix of " + shape_str(xs));
  }
  const std::size_t inner = y.value().size();
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += y.value()[i % inner];
  return make_result(std::move(out), {x, y}, [inner](Node& n) {
    if (wants(n.parents[0])) {
      Tensor& g = n.parents[0]->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    }
    if (wants(n.parents[1])) {
      Tensor& g = n.parents[1]->grad_buffer();
      for (std::size_t i = 0; i < n.grad.size(); ++i) g[i % inner] += n.grad[i];
    }
  });
}

namespace {

// c[m, n] += a[m, k] · b[k, n]
void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    const double* ai = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

// c[m, k] += a[m, n] · b[k, n]^T
void gemm_nt(const double* a, const double* b, double* c, std::size_t m,
             std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * n;
    double* ci = c + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double* bp = b + p * n;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += ai[j] * bp[j];
      ci[p] += acc;
    }
  }
}

// c[k, n] += a[m, k]^T · b[m, n]
void gemm_tn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    const double* bi = b + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      double* cp = c + p * n;
      for (std::size_t j = 0; j < n; ++j) cp[j] += av * bi[j];
    }
  }
}

}  // namespace

Var matmul(const Var& x, const Var& w) {
  if (w.shape().size() != 2 || x.shape().empty() ||
      x.shape().back() != w.dim(0)) {
    throw std::invalid_argument("matmul: " + shape_str(x.shape()) + " · " +
                                shape_str(w.shape()));
  }
  const std::size_t k = w.dim(0);
  const std::size_t n = w.dim(1);
  const std::size_t m = x.value().size() / k;
  Shape out_shape = x.shape();
  out_shape.back() = n;
  Tensor out(out_shape, 0.0);
  gemm_nn(x.value().data().data(), w.value().data().data(),
          out.data().data(), m, k, n);
  return make_result(std::move(out), {x, w}, [m, k, n](Node& node) {
    auto& px = node.parents[0];
    auto& pw = node.parents[1];
    if (wants(px)) {
      gemm_nt(node.grad.data().data(), pw->value.data().data(),
              px->grad_buffer().data().data(), m, n, k);
    }
    if (wants(pw)) {
      gemm_tn(px->value.data().data(), node.grad.data().data(),
              pw->grad_buffer().data().data(), m, k, n);
    }
  });
}

Var linear(const Var& x, const Var& w, const Var& b) {
  return add_broadcast(matmul(x, w), b);
}

Var bmm(const Var& a, const Var& b) {
  if (a.shape().size() != 3 || b.shape().size() != 3 || a.dim(0) != b.dim(0) ||
      a.dim(2) != b.dim(1)) {
    throw std::invalid_argument("bmm: " + shape_str(a.shape()) + " · " +
                                shape_str(b.shape()));
  }
  const std::size_t bs = a.dim(0), m = a.dim(1), k = a.dim(2), n = b.dim(2);
  Tensor out({bs, m, n}, 0.0);
  for (std::size_t i = 0; i < bs; ++i) {
    gemm_nn(a.value().data().data() + i * m * k,
            b.value().data().data() + i * k * n, out.data().data() + i * m * n,
            m, k, n);
  }
  return make_result(std::move(out), {a, b}, [bs, m, k, n](Node& node) {
    auto& pa = node.parents[0];
    auto& pb = node.parents[1];
    for (std::size_t i = 0; i < bs; ++i) {
      const double* g = node.grad.data().data() + i * m * n;
      if (wants(pa)) {
        gemm_nt(g, pb->value.data().data() + i * k * n,
                pa->grad_buffer().data().data() + i * m * k, m, n, k);
      }
      if (wants(pb)) {
        gemm_tn(pa->value.data().data() + i * m * k, g,
                pb->grad_buffer().data().data() + i * k * n, m, k, n);
      }
    }
  });
}

Var reshape(const Var& x, Shape shape) {
  Tensor out = x.value().reshaped(std::move(shape));
  return make_result(std::move(out), {x}, [](Node& n) {
    Tensor& g = n.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
  });
}

Var permute(const Var& x, const std::vector<std::size_t>& perm) {
  const Shape& in = x.shape();
  const std::size_t r = in.size();
  if (perm.size() != r) throw std::invalid_argument("permute: rank");
  std::vector<std::size_t> in_strides(r, 1);
  for (std::size_t i = r; i-- > 1;) in_strides[i - 1] = in_strides[i] * in[i];
  Shape out_shape(r);
  std::vector<std::size_t> src_stride(r);
  for (std::size_t i = 0; i < r; ++i) {
    out_shape[i] = in[perm[i]];
    src_stride[i] = in_strides[perm[i]];
  }
  // map[o] = source offset of output element o
  const std::size_t total = x.value().size();
  std::vector<std::size_t> map(total);
  std::vector<std::size_t> idx(r, 0);
  std::size_t src = 0;
  for (std::size_t o = 0; o < total; ++o) {
    map[o] = src;
    for (std::size_t a = r; a-- > 0;) {
      ++idx[a];
      src += src_stride[a];
      if (idx[a] < out_shape[a]) break;
      src -= src_stride[a] * idx[a];
      idx[a] = 0;
    }
  }
  Tensor out(out_shape, 0.0);
  for (std::size_t o = 0; o < total; ++o) out[o] = x.value()[map[o]];
  return make_result(std::move(out), {x},
                     [map = std::move(map)](Node& n) {
                       Tensor& g = n.parents[0]->grad_buffer();
                       for (std::size_t o = 0; o < map.size(); ++o)
                         g[map[o]] += n.grad[o];
                     });
}

namespace {

struct AxisSplit {
  std::size_t outer = 1, axis = 1, inner = 1;
};

AxisSplit split_at(const Shape& s, std::size_t axis) {
  AxisSplit r;
  for (std::size_t i = 0; i < axis; ++i) r.outer *= s[i];
  r.axis = s[axis];
  for (std::size_t i = axis + 1; i < s.size(); ++i) r.inner *= s[i];
  return r;
}

}  // namespace

Var concat(const std::vector<Var>& xs, std::size_t axis) {
  if (xs.empty()) throw std::invalid_argument("concat: no inputs");
  Shape out_shape = xs[0].shape();
  if (axis >= out_shape.size()) throw std::invalid_argument("concat: axis");
  std::size_t total_axis = 0;
  for (const auto& v : xs) {
    Shape s = v.shape();
    if (s.size() != out_shape.size()) throw std::invalid_argument("concat");
    s[axis] = out_shape[axis];
    if (s != out_shape) throw std::invalid_argument("concat: shape mismatch");
    total_axis += v.dim(axis);
  }
  out_shape[axis] = total_axis;
  Tensor out(out_shape, 0.0);
  const AxisSplit os = split_at(out_shape, axis);
  std::vector<std::size_t> starts;
  std::size_t at = 0;
  for (const auto& v : xs) {
    starts.push_back(at);
    const AxisSplit is = split_at(v.shape(), axis);
    for (std::size_t o = 0; o < is.outer; ++o) {
      std::copy_n(v.value().data().data() + o * is.axis * is.inner,
                  is.axis * is.inner,
                  out.data().data() + (o * os.axis + at) * os.inner);
    }
    at += is.axis;
  }
  return make_result(std::move(out), xs, [os, starts](Node& n) {
    for (std::size_t k = 0; k < n.parents.size(); ++k) {
      auto& p = n.parents[k];
      if (!wants(p)) continue;
      Tensor& g = p->grad_buffer();
      const std::size_t len = g.size() / os.outer;  // axis * inner of parent
      for (std::size_t o = 0; o < os.outer; ++o) {
        const double* src =
            n.grad.data().data() + (o * os.axis + starts[k]) * os.inner;
        double* dst = g.data().data() + o * len;
        for (std::size_t i = 0; i < len; ++i) dst[i] += src[i];
      }
    }
  });
}

Var slice(const Var& x, std::size_t axis, std::size_t begin, std::size_t end) {
  if (axis >= x.shape().size() || begin > end || end > x.dim(axis)) {
    throw std::invalid_argument("slice: bad range");
  }
  const AxisSplit is = split_at(x.shape(), axis);
  Shape out_shape = x.shape();
  out_shape[axis] = end - begin;
  Tensor out(out_shape, 0.0);
  const std::size_t len = (end - begin) * is.inner;
  for (std::size_t o = 0; o < is.outer; ++o) {
    std::copy_n(x.value().data().data() + (o * is.axis + begin) * is.inner, len,
                out.data().data() + o * len);
  }
  return make_result(std::move(out), {x}, [is, begin, len](Node& n) {
    Tensor& g = n.parents[0]->grad_buffer();
    for (std::size_t o = 0; o < is.outer; ++o) {
      double* dst = g.data().data() + (o * is.axis + begin) * is.inner;
      const double* src = n.grad.data().data() + o * len;
      for (std::size_t i = 0; i < len; ++i) dst[i] += src[i];
    }
  });
}

Var relu(const Var& x) {
  Tensor out = x.value();
  for (double& v : out.vec()) v = v > 0.0 ? v : 0.0;
  return make_result(std::move(out), {x}, [](Node& n) {
    auto& p = n.parents[0];
    Tensor& g = p->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (p->value[i] > 0.0) g[i] += n.grad[i];
  });
}

namespace {
inline double sigm(double v) { return 1.0 / (1.0 + std::exp(-v)); }
}  // namespace

Var sigmoid(const Var& x) {
  Tensor out = x.value();
  for (double& v : out.vec()) v = sigm(v);
  return make_result(std::move(out), {x}, [](Node& n) {
    Tensor& g = n.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double y = n.value[i];
      g[i] += n.grad[i] * y * (1.0 - y);
    }
  });
}

Var swish(const Var& x) {
  Tensor out = x.value();
  for (double& v : out.vec()) v = v * sigm(v);
  return make_result(std::move(out), {x}, [](Node& n) {
    auto& p = n.parents[0];
    Tensor& g = p->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double v = p->value[i];
      const double s = sigm(v);
      g[i] += n.grad[i] * (s + v * s * (1.0 - s));
    }
  });
}

Var glu(const Var& x) {
  const std::size_t w = x.shape().back();
  if (w % 2 != 0) throw std::invalid_argument("glu: odd last axis");
  const std::size_t h = w / 2;
  const std::size_t rows = x.value().size() / w;
  Shape out_shape = x.shape();
  out_shape.back() = h;
  Tensor out(out_shape, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < h; ++j) {
      out[r * h + j] = x.value()[r * w + j] * sigm(x.value()[r * w + h + j]);
    }
  }
  return make_result(std::move(out), {x}, [rows, w, h](Node& n) {
    auto& p = n.parents[0];
    Tensor& g = p->grad_buffer();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < h; ++j) {
        const double a = p->value[r * w + j];
        const double s = sigm(p->value[r * w + h + j]);
        const double go = n.grad[r * h + j];
        g[r * w + j] += go * s;
        g[r * w + h + j] += go * a * s * (1.0 - s);
      }
    }
  });
}

Var softmax(const Var& x) {
  const std::size_t w = x.shape().back();
  const std::size_t rows = x.value().size() / w;
  Tensor out = x.value();
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = out.data().data() + r * w;
    const double mx = *std::max_element(row, row + w);
    double z = 0.0;
    for (std::size_t j = 0; j < w; ++j) z += (row[j] = std::exp(row[j] - mx));
    for (std::size_t j = 0; j < w; ++j) row[j] /= z;
  }
  return make_result(std::move(out), {x}, [rows, w](Node& n) {
    Tensor& g = n.parents[0]->grad_buffer();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* y = n.value.data().data() + r * w;
      const double* gy = n.grad.data().data() + r * w;
      double dot = 0.0;
      for (std::size_t j = 0; j < w; ++j) dot += gy[j] * y[j];
      for (std::size_t j = 0; j < w; ++j) g[r * w + j] += y[j] * (gy[j] - dot);
    }
  });
}

Var log_softmax(const Var& x) {
  const std::size_t w = x.shape().back();
  const std::size_t rows = x.value().size() / w;
  Tensor out = x.value();
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = out.data().data() + r * w;
    const double mx = *std::max_element(row, row + w);
    double z = 0.0;
    for (std::size_t j = 0; j < w; ++j) z += std::exp(row[j] - mx);
    const double lse = mx + std::log(z);
    for (std::size_t j = 0; j < w; ++j) row[j] -= lse;
  }
  return make_result(std::move(out), {x}, [rows, w](Node& n) {
    Tensor& g = n.parents[0]->grad_buffer();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* y = n.value.data().data() + r * w;
      const double* gy = n.grad.data().data() + r * w;
      double total = 0.0;
      for (std::size_t j = 0; j < w; ++j) total += gy[j];
      for (std::size_t j = 0; j < w; ++j)
        g[r * w + j] += gy[j] - std::exp(y[j]) * total;
    }
  });
}

Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps) {
  const std::size_t w = x.shape().back();
  if (gamma.value().size() != w || beta.value().size() != w) {
    throw std::invalid_argument("layer_norm: affine size mismatch");
  }
  const std::size_t rows = x.value().size() / w;
  Tensor out(x.shape(), 0.0);
  Tensor xhat(x.shape(), 0.0);
  std::vector<double> rstd(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = x.value().data().data() + r * w;
    double mu = 0.0;
    for (std::size_t j = 0; j < w; ++j) mu += row[j];
    mu /= static_cast<double>(w);
    double var = 0.0;
    for (std::size_t j = 0; j < w; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(w);
    rstd[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < w; ++j) {
      const double xh = (row[j] - mu) * rstd[r];
      xhat[r * w + j] = xh;
      out[r * w + j] = xh * gamma.value()[j] + beta.value()[j];
    }
  }
  return make_result(
      std::move(out), {x, gamma, beta},
      [rows, w, xhat = std::move(xhat), rstd = std::move(rstd)](Node& n) {
        auto& px = n.parents[0];
        auto& pg = n.parents[1];
        auto& pb = n.parents[2];
        const Tensor& gam = pg->value;
        std::vector<double> dxh(w);
        for (std::size_t r = 0; r < rows; ++r) {
          const double* gy = n.grad.data().data() + r * w;
          const double* xh = xhat.data().data() + r * w;
          if (wants(pg)) {
            Tensor& gg = pg->grad_buffer();
            for (std::size_t j = 0; j < w; ++j) gg[j] += gy[j] * xh[j];
          }
          if (wants(pb)) {
            Tensor& gb = pb->grad_buffer();
            for (std::size_t j = 0; j < w; ++j) gb[j] += gy[j];
          }
          if (wants(px)) {
            double m1 = 0.0, m2 = 0.0;
            for (std::size_t j = 0; j < w; ++j) {
              dxh[j] = gy[j] * gam[j];
              m1 += dxh[j];
              m2 += dxh[j] * xh[j];
            }
            m1 /= static_cast<double>(w);
            m2 /= static_cast<double>(w);
            Tensor& gx = px->grad_buffer();
            for (std::size_t j = 0; j < w; ++j)
              gx[r * w + j] += rstd[r] * (dxh[j] - m1 - xh[j] * m2);
          }
        }
      });
}

Var embedding(const Var& table, const std::vector<int>& ids) {
  if (table.shape().size() != 2) throw std::invalid_argument("embedding");
  const std::size_t v = table.dim(0), d = table.dim(1);
  Tensor out({ids.size(), d}, 0.0);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= v) {
      throw std::out_of_range("embedding: id " + std::to_string(ids[i]));
    }
    std::copy_n(table.value().data().data() + ids[i] * d, d,
                out.data().data() + i * d);
  }
  return make_result(std::move(out), {table}, [ids, d](Node& n) {
    Tensor& g = n.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = 0; j < d; ++j)
        g[ids[i] * d + j] += n.grad[i * d + j];
  });
}

Var context_expand(const Var& x, std::size_t context) {
  if (x.shape().size() != 3) throw std::invalid_argument("context_expand");
  const std::size_t t_len = x.dim(0), c = x.dim(1), d = x.dim(2);
  const std::size_t width = 2 * context + 1;
  Tensor out({t_len, width * c, d}, 0.0);
  for (std::size_t t = 0; t < t_len; ++t) {
    for (std::size_t j = 0; j < width; ++j) {
      const long src = static_cast<long>(t + j) - static_cast<long>(context);
      if (src < 0 || src >= static_cast<long>(t_len)) continue;
      std::copy_n(x.value().data().data() + src * c * d, c * d,
                  out.data().data() + (t * width + j) * c * d);
    }
  }
  return make_result(std::move(out), {x}, [t_len, c, d, width,
                                           context](Node& n) {
    Tensor& g = n.parents[0]->grad_buffer();
    for (std::size_t t = 0; t < t_len; ++t) {
      for (std::size_t j = 0; j < width; ++j) {
        const long src = static_cast<long>(t + j) - static_cast<long>(context);
        if (src < 0 || src >= static_cast<long>(t_len)) continue;
        const double* gs = n.grad.data().data() + (t * width + j) * c * d;
        double* gd = g.data().data() + src * c * d;
        for (std::size_t i = 0; i < c * d; ++i) gd[i] += gs[i];
      }
    }
  });
}

std::size_t same_out(std::size_t in, std::size_t stride) {
  return (in + stride - 1) / stride;
}

namespace {

struct ConvGeom {
  std::size_t batch, cin, h, w, cout, cin_g, cout_g, kh, kw, sh, sw, oh, ow;
  long pad_h, pad_w;
};

}  // namespace

Var conv2d(const Var& x, const Var& kernel, const Var& bias,
           std::size_t stride_h, std::size_t stride_w, std::size_t groups) {
  if (x.shape().size() != 4 || kernel.shape().size() != 4 ||
      bias.shape().size() != 1) {
    throw std::invalid_argument("conv2d: expects x[B,C,H,W], k[O,I,KH,KW], b[O]");
  }
  ConvGeom g{};
  g.batch = x.dim(0);
  g.cin = x.dim(1);
  g.h = x.dim(2);
  g.w = x.dim(3);
  g.cout = kernel.dim(0);
  g.cin_g = kernel.dim(1);
  g.kh = kernel.dim(2);
  g.kw = kernel.dim(3);
  g.sh = stride_h;
  g.sw = stride_w;
  if (groups == 0 || g.cin % groups || g.cout % groups ||
      g.cin / groups != g.cin_g || bias.dim(0) != g.cout || stride_h == 0 ||
      stride_w == 0) {
    throw std::invalid_argument("conv2d: inconsistent channels/groups, x " +
                                shape_str(x.shape()) + " kernel " +
                                shape_str(kernel.shape()));
  }
  g.cout_g = g.cout / groups;
  g.oh = same_out(g.h, g.sh);
  g.ow = same_out(g.w, g.sw);
  const long tot_h = std::max<long>(
      static_cast<long>((g.oh - 1) * g.sh + g.kh) - static_cast<long>(g.h), 0);
  const long tot_w = std::max<long>(
      static_cast<long>((g.ow - 1) * g.sw + g.kw) - static_cast<long>(g.w), 0);
  g.pad_h = tot_h / 2;
  g.pad_w = tot_w / 2;

  Tensor out({g.batch, g.cout, g.oh, g.ow}, 0.0);
  const double* xv = x.value().data().data();
  const double* kv = kernel.value().data().data();
  for (std::size_t b = 0; b < g.batch; ++b) {
    for (std::size_t o = 0; o < g.cout; ++o) {
      const std::size_t grp = o / g.cout_g;
      double* op = out.data().data() + ((b * g.cout + o) * g.oh) * g.ow;
      for (std::size_t i = 0; i < g.oh * g.ow; ++i) op[i] = bias.value()[o];
      for (std::size_t il = 0; il < g.cin_g; ++il) {
        const std::size_t ci = grp * g.cin_g + il;
        const double* xp = xv + ((b * g.cin + ci) * g.h) * g.w;
        const double* kp = kv + ((o * g.cin_g + il) * g.kh) * g.kw;
        for (std::size_t a = 0; a < g.oh; ++a) {
          for (std::size_t ki = 0; ki < g.kh; ++ki) {
            const long ih = static_cast<long>(a * g.sh + ki) - g.pad_h;
            if (ih < 0 || ih >= static_cast<long>(g.h)) continue;
            for (std::size_t c = 0; c < g.ow; ++c) {
              double acc = 0.0;
              for (std::size_t kj = 0; kj < g.kw; ++kj) {
                const long iw = static_cast<long>(c * g.sw + kj) - g.pad_w;
                if (iw < 0 || iw >= static_cast<long>(g.w)) continue;
                acc += kp[ki * g.kw + kj] * xp[ih * g.w + iw];
              }
              op[a * g.ow + c] += acc;
            }
          }
        }
      }
    }
  }
  return make_result(std::move(out), {x, kernel, bias}, [g](Node& n) {
    auto& px = n.parents[0];
    auto& pk = n.parents[1];
    auto& pb = n.parents[2];
    const double* xv = px->value.data().data();
    const double* kv = pk->value.data().data();
    double* gx = wants(px) ? px->grad_buffer().data().data() : nullptr;
    double* gk = wants(pk) ? pk->grad_buffer().data().data() : nullptr;
    double* gb = wants(pb) ? pb->grad_buffer().data().data() : nullptr;
    for (std::size_t b = 0; b < g.batch; ++b) {
      for (std::size_t o = 0; o < g.cout; ++o) {
        const std::size_t grp = o / g.cout_g;
        const double* gp = n.grad.data().data() + ((b * g.cout + o) * g.oh) * g.ow;
        if (gb) {
          for (std::size_t i = 0; i < g.oh * g.ow; ++i) gb[o] += gp[i];
        }
        for (std::size_t il = 0; il < g.cin_g; ++il) {
          const std::size_t ci = grp * g.cin_g + il;
          const std::size_t xoff = ((b * g.cin + ci) * g.h) * g.w;
          const std::size_t koff = ((o * g.cin_g + il) * g.kh) * g.kw;
          for (std::size_t a = 0; a < g.oh; ++a) {
            for (std::size_t ki = 0; ki < g.kh; ++ki) {
              const long ih = static_cast<long>(a * g.sh + ki) - g.pad_h;
              if (ih < 0 || ih >= static_cast<long>(g.h)) continue;
              for (std::size_t c = 0; c < g.ow; ++c) {
                const double go = gp[a * g.ow + c];
                if (go == 0.0) continue;
                for (std::size_t kj = 0; kj < g.kw; ++kj) {
                  const long iw = static_cast<long>(c * g.sw + kj) - g.pad_w;
                  if (iw < 0 || iw >= static_cast<long>(g.w)) continue;
                  const std::size_t xi = xoff + ih * g.w + iw;
                  if (gk) gk[koff + ki * g.kw + kj] += go * xv[xi];
                  if (gx) gx[xi] += go * kv[koff + ki * g.kw + kj];
                }
              }
            }
          }
        }
      }
    }
  });
}

Var nll_loss(const Var& logp, const std::vector<int>& targets,
             const std::vector<double>& weights) {
  if (logp.shape().size() != 2 || logp.dim(0) != targets.size() ||
      weights.size() != targets.size()) {
    throw std::invalid_argument("nll_loss: expects logp[N, V] and N targets");
  }
  const std::size_t v = logp.dim(1);
  double wsum = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (weights[i] == 0.0) continue;
    if (targets[i] < 0 || static_cast<std::size_t>(targets[i]) >= v) {
      throw std::out_of_range("nll_loss: target " + std::to_string(targets[i]));
    }
    wsum += weights[i];
    acc -= weights[i] * logp.value()[i * v + targets[i]];
  }
  const double loss = wsum > 0.0 ? acc / wsum : 0.0;
  return make_result(Tensor({1}, {loss}), {logp},
                     [targets, weights, wsum, v](Node& n) {
                       if (wsum <= 0.0) return;
                       Tensor& g = n.parents[0]->grad_buffer();
                       for (std::size_t i = 0; i < targets.size(); ++i) {
                         if (weights[i] == 0.0) continue;
                         g[i * v + targets[i]] -= n.grad[0] * weights[i] / wsum;
                       }
                     });
}

Var sum(const Var& x) {
  double s = 0.0;
  for (double v : x.value().data()) s += v;
  return make_result(Tensor({1}, {s}), {x}, [](Node& n) {
    Tensor& g = n.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[0];
  });
}

Var mean(const Var& x) {
  return scale(sum(x), 1.0 / static_cast<double>(x.value().size()));
}

}  // namespace mcsa::ag
