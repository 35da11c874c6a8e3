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

// Shared layers for the encoder and the two decoders.

#ifndef MCSA_NN_HPP_
#define MCSA_NN_HPP_

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mcsa/autograd.hpp"

namespace mcsa::nn {

using ag::Var;

// Ordered registry of named trainable tensors.
class ParameterSet {
 public:
  Var add(const std::string& name, Tensor init);
  Var get(const std::string& name) const;
  bool contains(const std::string& name) const;

  const std::vector<std::pair<std::string, Var>>& entries() const {
    return entries_;
  }
  void zero_grad();
  std::size_t scalar_count() const;

 private:
  std::vector<std::pair<std::string, Var>> entries_;
};

Tensor xavier_uniform(const Shape& shape, std::size_t fan_in,
                      std::size_t fan_out, std::mt19937_64& rng);

struct Linear {
  Var weight;  // [in, out]
  Var bias;    // [out]

  static Linear create(ParameterSet& params, const std::string& name,
                       std::size_t in, std::size_t out, std::mt19937_64& rng);
  Var operator()(const Var& x) const { return ag::linear(x, weight, bias); }
};

struct LayerNorm {
  Var gamma;
  Var beta;

  static LayerNorm create(ParameterSet& params, const std::string& name,
                          std::size_t dim);
  Var operator()(const Var& x) const { return ag::layer_norm(x, gamma, beta); }
};

// Linear -> swish -> Linear.
struct FeedForward {
  Linear in;
  Linear out;

  static FeedForward create(ParameterSet& params, const std::string& name,
                            std::size_t dim, std::size_t hidden,
                            std::mt19937_64& rng);
  Var operator()(const Var& x) const { return out(ag::swish(in(x))); }
};

struct AttentionOutput {
  Var output;   // [B, Nq, D]
  Var weights;  // [B·H, Nq, Nk], rows sum to one
};

// Multi-head scaled dot-product attention. Queries come from `query`
// [B, Nq, D]; keys and values are both projected from `memory` [B, Nk, D].
// Scores are scaled by the square root of the per-head width.
struct MultiHeadAttention {
  Linear q, k, v, o;
  std::size_t heads = 1;

  static MultiHeadAttention create(ParameterSet& params,
                                   const std::string& name, std::size_t dim,
                                   std::size_t heads, std::mt19937_64& rng);
  AttentionOutput forward(const Var& query, const Var& memory,
                          const std::optional<Tensor>& mask = {}) const;
};

// Pre-norm Transformer decoder layer on [1, N, D]: causal self-attention,
// cross-attention over a [1, T, D] memory, then a feed-forward module.
struct DecoderLayer {
  LayerNorm self_norm;
  MultiHeadAttention self_attention;
  LayerNorm cross_norm;
  MultiHeadAttention cross_attention;
  LayerNorm ff_norm;
  FeedForward ff;

  static DecoderLayer create(ParameterSet& params, const std::string& name,
                             std::size_t dim, std::size_t heads,
                             std::size_t ff_dim, std::mt19937_64& rng);
  Var operator()(const Var& x, const Var& memory) const;
};

// Additive mask [n, n] with a large negative value above the diagonal.
Tensor causal_mask(std::size_t n);

// Standard sine/cosine absolute position table [length, dim].
Tensor sinusoidal_positions(std::size_t length, std::size_t dim);

}  // namespace mcsa::nn

#endif  // MCSA_NN_HPP_
