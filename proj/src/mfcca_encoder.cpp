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

#include "mcsa/mfcca_encoder.hpp"

#include <stdexcept>

namespace mcsa::encoder {

void MfccaConfig::validate() const {
  if (d_model == 0 || heads == 0 || d_model % heads != 0) {
    throw std::invalid_argument("MfccaConfig: d_model " +
                                std::to_string(d_model) +
                                " must be a positive multiple of heads " +
                                std::to_string(heads));
  }
  if (num_layers == 0 || ff_dim == 0 || conv_kernel == 0) {
    throw std::invalid_argument("MfccaConfig: layers, ff_dim and conv_kernel must be positive");
  }
}

ContextExpandedInput context_expand(const Tensor& x, std::size_t context) {
  return {ag::context_expand(ag::constant(x), context).value()};
}

MfccaAttention MfccaAttention::create(nn::ParameterSet& params,
                                      const std::string& name,
                                      const MfccaConfig& cfg,
                                      std::mt19937_64& rng) {
  MfccaAttention m;
  m.attention =
      nn::MultiHeadAttention::create(params, name, cfg.d_model, cfg.heads, rng);
  m.context = cfg.context;
  return m;
}

nn::AttentionOutput MfccaAttention::forward(const Var& x) const {
  if (x.shape().size() != 3) {
    throw std::invalid_argument("mfcca: expected [T, C, D], got " +
                                shape_str(x.shape()));
  }
  // Batch over frames: each frame's C queries attend to its (2F+1)·C rows.
  return attention.forward(x, ag::context_expand(x, context));
}

ConvolutionModule ConvolutionModule::create(nn::ParameterSet& params,
                                            const std::string& name,
                                            const MfccaConfig& cfg,
                                            std::mt19937_64& rng) {
  ConvolutionModule m;
  const std::size_t d = cfg.d_model, k = cfg.conv_kernel;
  m.pointwise_in = nn::Linear::create(params, name + ".pointwise_in", d, 2 * d, rng);
  m.depthwise_kernel = params.add(name + ".depthwise.weight",
                                  nn::xavier_uniform({d, 1, k, 1}, k, k, rng));
  m.depthwise_bias = params.add(name + ".depthwise.bias", Tensor({d}, 0.0));
  m.norm = nn::LayerNorm::create(params, name + ".norm", d);
  m.pointwise_out = nn::Linear::create(params, name + ".pointwise_out", d, d, rng);
  return m;
}

Var ConvolutionModule::operator()(const Var& x) const {
  const std::size_t c = x.dim(0), t = x.dim(1), d = x.dim(2);
  Var y = ag::glu(pointwise_in(x));
  y = ag::reshape(ag::permute(y, {0, 2, 1}), {c, d, t, 1});
  y = ag::conv2d(y, depthwise_kernel, depthwise_bias, 1, 1, d);
  y = ag::permute(ag::reshape(y, {c, d, t}), {0, 2, 1});
  return pointwise_out(ag::swish(norm(y)));
}

ConformerMfccaBlock ConformerMfccaBlock::create(nn::ParameterSet& params,
                                                const std::string& name,
                                                const MfccaConfig& cfg,
                                                std::mt19937_64& rng) {
  ConformerMfccaBlock b;
  const std::size_t d = cfg.d_model;
  b.mfcca_norm = nn::LayerNorm::create(params, name + ".mfcca_norm", d);
  b.mfcca = MfccaAttention::create(params, name + ".mfcca", cfg, rng);
  b.mhsa_norm = nn::LayerNorm::create(params, name + ".mhsa_norm", d);
  b.mhsa = nn::MultiHeadAttention::create(params, name + ".mhsa", d, cfg.heads, rng);
  b.conv_norm = nn::LayerNorm::create(params, name + ".conv_norm", d);
  b.conv = ConvolutionModule::create(params, name + ".conv", cfg, rng);
  b.ff_norm = nn::LayerNorm::create(params, name + ".ff_norm", d);
  b.ff = nn::FeedForward::create(params, name + ".ff", d, cfg.ff_dim, rng);
  b.final_norm = nn::LayerNorm::create(params, name + ".final_norm", d);
  return b;
}

Var ConformerMfccaBlock::operator()(const Var& x_tcd) const {
  Var x = ag::add(x_tcd, mfcca.forward(mfcca_norm(x_tcd)).output);
  // Remaining modules run along time, one sequence per channel.
  x = ag::permute(x, {1, 0, 2});  // [C, T, D]
  Var h = mhsa_norm(x);
  x = ag::add(x, mhsa.forward(h, h).output);
  x = ag::add(x, conv(conv_norm(x)));
  x = ag::add(x, ag::scale(ff(ff_norm(x)), 0.5));
  x = final_norm(x);
  return ag::permute(x, {1, 0, 2});
}

std::vector<std::size_t> ChannelConvFusion::stage_plan(std::size_t channels) {
  switch (channels) {
    case 1:
      return {1};
    case 2:
      return {2, 1};
    case 3:
      return {3, 2, 1};
    case 4:
      return {4, 2, 1};
    default:
      throw std::invalid_argument("channel fusion supports 1 to 4 channels, got " +
                                  std::to_string(channels));
  }
}

ChannelConvFusion ChannelConvFusion::create(nn::ParameterSet& params,
                                            const std::string& name,
                                            std::size_t channels,
                                            std::mt19937_64& rng) {
  ChannelConvFusion f;
  f.channels = channels;
  const auto plan = stage_plan(channels);
  for (std::size_t i = 0; i + 1 < plan.size(); ++i) {
    const std::size_t cin = plan[i], cout = plan[i + 1];
    Stage s;
    const std::string prefix = name + ".stage" + std::to_string(i);
    s.kernel = params.add(prefix + ".weight",
                          nn::xavier_uniform({cout, cin, 3, 3}, cin * 9,
                                             cout * 9, rng));
    s.bias = params.add(prefix + ".bias", Tensor({cout}, 0.0));
    f.stages.push_back(s);
  }
  return f;
}

Var ChannelConvFusion::operator()(const Var& x) const {
  if (x.shape().size() != 3 || x.dim(0) != channels) {
    throw std::invalid_argument("channel fusion: expected [" +
                                std::to_string(channels) + ", T, D], got " +
                                shape_str(x.shape()));
  }
  const std::size_t t = x.dim(1), d = x.dim(2);
  Var y = ag::reshape(x, {1, channels, t, d});
  for (const auto& s : stages) y = ag::conv2d(y, s.kernel, s.bias, 1, 1, 1);
  return ag::reshape(y, {t, d});
}

MfccaEncoder MfccaEncoder::create(nn::ParameterSet& params,
                                  const std::string& name,
                                  const MfccaConfig& cfg, std::size_t channels,
                                  std::mt19937_64& rng) {
  cfg.validate();
  MfccaEncoder e;
  e.cfg_ = cfg;
  e.channels_ = channels;
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    e.blocks_.push_back(ConformerMfccaBlock::create(
        params, name + ".block" + std::to_string(l), cfg, rng));
  }
  e.fusion_ = ChannelConvFusion::create(params, name + ".fusion", channels, rng);
  return e;
}

EncoderOutput MfccaEncoder::encode(const Var& features) const {
  if (features.shape().size() != 3 || features.dim(0) != channels_ ||
      features.dim(2) != cfg_.d_model) {
    throw std::invalid_argument("encode: expected [" + std::to_string(channels_) +
                                ", T, " + std::to_string(cfg_.d_model) +
                                "], got " + shape_str(features.shape()));
  }
  const std::size_t t = features.dim(1);
  Var x = ag::add_broadcast(
      features, ag::constant(nn::sinusoidal_positions(t, cfg_.d_model)));
  x = ag::permute(x, {1, 0, 2});  // [T, C, D]
  for (const auto& block : blocks_) x = block(x);
  Var per_channel = ag::permute(x, {1, 0, 2});
  return {per_channel, fusion_(per_channel)};
}

}  // namespace mcsa::encoder
