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

// Multichannel Conformer encoder. Each block replaces the leading
// feed-forward module of a Conformer with multi-frame cross-channel attention
// (MFCCA): queries are the C channels of frame t, keys and values are the
// C channels of frames t-F..t+F. A learned convolution over the channel axis
// collapses the C streams into a single T × D sequence at the end.

#ifndef MCSA_MFCCA_ENCODER_HPP_
#define MCSA_MFCCA_ENCODER_HPP_

#include <random>
#include <string>
#include <vector>

#include "mcsa/autograd.hpp"
#include "mcsa/nn.hpp"

namespace mcsa::encoder {

using ag::Var;

inline constexpr std::size_t kMaxFusionChannels = 4;

struct MfccaConfig {
  std::size_t d_model = 256;
  std::size_t heads = 4;
  std::size_t context = 2;  // F, frames on each side
  std::size_t num_layers = 12;
  std::size_t ff_dim = 2048;
  std::size_t conv_kernel = 15;  // depthwise kernel of the convolution module

  void validate() const;
};

struct ContextExpandedInput {
  Tensor values;  // [T, (2F+1)·C, D]
};

// Non-differentiable convenience wrapper over ag::context_expand.
ContextExpandedInput context_expand(const Tensor& x, std::size_t context);

struct MfccaAttention {
  nn::MultiHeadAttention attention;
  std::size_t context = 0;

  static MfccaAttention create(nn::ParameterSet& params,
                               const std::string& name, const MfccaConfig& cfg,
                               std::mt19937_64& rng);
  // x: [T, C, D]. Output [T, C, D]; weights [T·H, C, (2F+1)·C].
  nn::AttentionOutput forward(const Var& x) const;
};

// Pointwise (D -> 2D) + GLU, depthwise conv over time, LayerNorm, swish,
// pointwise (D -> D). Input and output [C, T, D].
struct ConvolutionModule {
  nn::Linear pointwise_in;
  Var depthwise_kernel;  // [D, 1, K, 1]
  Var depthwise_bias;    // [D]
  nn::LayerNorm norm;
  nn::Linear pointwise_out;

  static ConvolutionModule create(nn::ParameterSet& params,
                                  const std::string& name,
                                  const MfccaConfig& cfg, std::mt19937_64& rng);
  Var operator()(const Var& x) const;
};

// Pre-norm residual block on [T, C, D]:
//   x += MFCCA(LN x); x += MHSA_time(LN x) per channel;
//   x += Conv(LN x) per channel; x += ½·FFN(LN x); x = LN x.
struct ConformerMfccaBlock {
  nn::LayerNorm mfcca_norm;
  MfccaAttention mfcca;
  nn::LayerNorm mhsa_norm;
  nn::MultiHeadAttention mhsa;
  nn::LayerNorm conv_norm;
  ConvolutionModule conv;
  nn::LayerNorm ff_norm;
  nn::FeedForward ff;
  nn::LayerNorm final_norm;

  static ConformerMfccaBlock create(nn::ParameterSet& params,
                                    const std::string& name,
                                    const MfccaConfig& cfg,
                                    std::mt19937_64& rng);
  Var operator()(const Var& x) const;
};

// C = 1 passes through; 2 -> 1; 3 -> 2 -> 1; 4 -> 2 -> 1. Every stage is a
// 3×3 same-padded convolution with the microphone streams as input planes.
struct ChannelConvFusion {
  struct Stage {
    Var kernel;  // [Cout, Cin, 3, 3]
    Var bias;    // [Cout]
  };
  std::size_t channels = 1;
  std::vector<Stage> stages;

  static std::vector<std::size_t> stage_plan(std::size_t channels);
  static ChannelConvFusion create(nn::ParameterSet& params,
                                  const std::string& name, std::size_t channels,
                                  std::mt19937_64& rng);
  // [C, T, D] -> [T, D]
  Var operator()(const Var& x) const;
};

struct EncoderOutput {
  Var per_channel;  // [C, T, D]
  Var fused;        // [T, D], H^asr
};

class MfccaEncoder {
 public:
  static MfccaEncoder create(nn::ParameterSet& params, const std::string& name,
                             const MfccaConfig& cfg, std::size_t channels,
                             std::mt19937_64& rng);

  // features: [C, T, D] already projected to the model dimension.
  EncoderOutput encode(const Var& features) const;

  const MfccaConfig& config() const { return cfg_; }
  std::size_t channels() const { return channels_; }
  const std::vector<ConformerMfccaBlock>& blocks() const { return blocks_; }
  const ChannelConvFusion& fusion() const { return fusion_; }

 private:
  MfccaConfig cfg_;
  std::size_t channels_ = 1;
  std::vector<ConformerMfccaBlock> blocks_;
  ChannelConvFusion fusion_;
};

}  // namespace mcsa::encoder

#endif  // MCSA_MFCCA_ENCODER_HPP_
