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

#include "mcsa/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace mcsa::nn {

Var ParameterSet::add(const std::string& name, Tensor init) {
  if (contains(name)) {
    throw std::invalid_argument("duplicate parameter " + name);
  }
  Var v = ag::parameter(std::move(init));
  entries_.emplace_back(name, v);
  return v;
}

Var ParameterSet::get(const std::string& name) const {
  for (const auto& [n, v] : entries_) {
    if (n == name) return v;
  }
  throw std::out_of_range("no parameter named " + name);
}

bool ParameterSet::contains(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.first == name) return true;
  }
  return false;
}

void ParameterSet::zero_grad() {
  for (auto& e : entries_) e.second.zero_grad();
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.second.value().size();
  return n;
}

Tensor xavier_uniform(const Shape& shape, std::size_t fan_in,
                      std::size_t fan_out, std::mt19937_64& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor t(shape, 0.0);
  for (double& v : t.vec()) v = dist(rng);
  return t;
}

Linear Linear::create(ParameterSet& params, const std::string& name,
                      std::size_t in, std::size_t out, std::mt19937_64& rng) {
  Linear l;
  l.weight = params.add(name + ".weight", xavier_uniform({in, out}, in, out, rng));
  l.bias = params.add(name + ".bias", Tensor({out}, 0.0));
  return l;
}

LayerNorm LayerNorm::create(ParameterSet& params, const std::string& name,
                            std::size_t dim) {
  LayerNorm n;
  n.gamma = params.add(name + ".gamma", Tensor({dim}, 1.0));
  n.beta = params.add(name + ".beta", Tensor({dim}, 0.0));
  return n;
}

FeedForward FeedForward::create(ParameterSet& params, const std::string& name,
                                std::size_t dim, std::size_t hidden,
                                std::mt19937_64& rng) {
  FeedForward f;
  f.in = Linear::create(params, name + ".in", dim, hidden, rng);
  f.out = Linear::create(params, name + ".out", hidden, dim, rng);
  return f;
}

MultiHeadAttention MultiHeadAttention::create(ParameterSet& params,
                                              const std::string& name,
                                              std::size_t dim,
                                              std::size_t heads,
                                              std::mt19937_64& rng) {
  if (heads == 0 || dim % heads != 0) {
    throw std::invalid_argument("attention: dim " + std::to_string(dim) +
                                " not divisible by heads " +
                                std::to_string(heads));
  }
  MultiHeadAttention m;
  m.q = Linear::create(params, name + ".q", dim, dim, rng);
  m.k = Linear::create(params, name + ".k", dim, dim, rng);
  m.v = Linear::create(params, name + ".v", dim, dim, rng);
  m.o = Linear::create(params, name + ".o", dim, dim, rng);
  m.heads = heads;
  return m;
}

AttentionOutput MultiHeadAttention::forward(
    const Var& query, const Var& memory,
    const std::optional<Tensor>& mask) const {
  if (query.shape().size() != 3 || memory.shape().size() != 3 ||
      query.dim(0) != memory.dim(0) || query.dim(2) != memory.dim(2)) {
    throw std::invalid_argument("attention: query " + shape_str(query.shape()) +
                                " memory " + shape_str(memory.shape()));
  }
  const std::size_t b = query.dim(0), nq = query.dim(1), nk = memory.dim(1);
  const std::size_t d = query.dim(2), dh = d / heads;

  auto split = [&](const Var& x, std::size_t n) {
    // [B, N, D] -> [B·H, N, dh]
    Var r = ag::reshape(x, {b, n, heads, dh});
    r = ag::permute(r, {0, 2, 1, 3});
    return ag::reshape(r, {b * heads, n, dh});
  };
  Var qh = split(q(query), nq);
  Var kh = ag::permute(ag::reshape(k(memory), {b, nk, heads, dh}), {0, 2, 3, 1});
  kh = ag::reshape(kh, {b * heads, dh, nk});
  Var vh = split(v(memory), nk);

  Var scores = ag::scale(ag::bmm(qh, kh), 1.0 / std::sqrt(static_cast<double>(dh)));
  if (mask) scores = ag::add_broadcast(scores, ag::constant(*mask));
  Var weights = ag::softmax(scores);
  Var ctx = ag::bmm(weights, vh);  // [B·H, Nq, dh]
  ctx = ag::permute(ag::reshape(ctx, {b, heads, nq, dh}), {0, 2, 1, 3});
  ctx = ag::reshape(ctx, {b, nq, d});
  return {o(ctx), weights};
}

DecoderLayer DecoderLayer::create(ParameterSet& params, const std::string& name,
                                 std::size_t dim, std::size_t heads,
                                 std::size_t ff_dim, std::mt19937_64& rng) {
  DecoderLayer l;
  l.self_norm = LayerNorm::create(params, name + ".self_norm", dim);
  l.self_attention =
      MultiHeadAttention::create(params, name + ".self_attn", dim, heads, rng);
  l.cross_norm = LayerNorm::create(params, name + ".cross_norm", dim);
  l.cross_attention =
      MultiHeadAttention::create(params, name + ".cross_attn", dim, heads, rng);
  l.ff_norm = LayerNorm::create(params, name + ".ff_norm", dim);
  l.ff = FeedForward::create(params, name + ".ff", dim, ff_dim, rng);
  return l;
}

Var DecoderLayer::operator()(const Var& x, const Var& memory) const {
  const std::size_t n = x.dim(1);
  Var h = self_norm(x);
  Var y = ag::add(x, self_attention.forward(h, h, causal_mask(n)).output);
  y = ag::add(y, cross_attention.forward(cross_norm(y), memory).output);
  return ag::add(y, ff(ff_norm(y)));
}

Tensor causal_mask(std::size_t n) {
  Tensor m({n, n}, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m.at({i, j}) = -1e30;
  return m;
}

Tensor sinusoidal_positions(std::size_t length, std::size_t dim) {
  Tensor pe({length, dim}, 0.0);
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double freq =
          std::pow(10000.0, -static_cast<double>(2 * (i / 2)) /
                                static_cast<double>(dim));
      const double a = static_cast<double>(t) * freq;
      pe.at({t, i}) = (i % 2 == 0) ? std::sin(a) : std::cos(a);
    }
  }
  return pe;
}

}  // namespace mcsa::nn
