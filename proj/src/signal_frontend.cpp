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

#include "mcsa/signal_frontend.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"

namespace mcsa::frontend {

namespace {

using fft::RealFft;

std::size_t reflect_index(long i, std::size_t len) {
  const long n = static_cast<long>(len);
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return static_cast<std::size_t>(i);
}

}  // namespace

void MultichannelWave::validate() const {
  if (samples.rank() != 2 || samples.dim(0) == 0 || samples.dim(1) == 0) {
    throw std::invalid_argument("wave: expected non-empty [C, L] samples");
  }
  if (!(sample_rate > 0.0)) {
    throw std::invalid_argument("wave: sample rate must be positive");
  }
  for (double v : samples.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("wave: non-finite sample");
  }
}

FeatureKind parse_feature_kind(const std::string& name) {
  if (name == "mel") return FeatureKind::kMel;
  if (name == "magphase") return FeatureKind::kMagPhase;
  throw std::invalid_argument("unknown feature kind '" + name +
                              "' (expected mel or magphase)");
}

std::string feature_kind_name(FeatureKind kind) {
  return kind == FeatureKind::kMel ? "mel" : "magphase";
}

StftTensor stft(const MultichannelWave& wave, double window_ms, double hop_ms) {
  wave.validate();
  if (!(hop_ms > 0.0) || !(window_ms >= hop_ms)) {
    throw std::invalid_argument("stft: need window_ms >= hop_ms > 0");
  }
  const double fs = wave.sample_rate;
  const auto win = static_cast<std::size_t>(std::lround(window_ms * fs / 1000.0));
  const auto hop = static_cast<std::size_t>(std::lround(hop_ms * fs / 1000.0));
  if (win < 2 || hop == 0) throw std::invalid_argument("stft: window too short");
  const std::size_t len = wave.length();
  const std::size_t half = win / 2;
  if (len <= half) {
    throw std::invalid_argument("stft: signal of " + std::to_string(len) +
                                " samples too short for reflect padding of " +
                                std::to_string(half));
  }
  const std::size_t frames = (len + hop - 1) / hop;
  const std::size_t bins = win / 2 + 1;

  std::vector<double> window(win);
  for (std::size_t i = 0; i < win; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / win);
  }

  StftTensor out;
  out.window_ms = window_ms;
  out.hop_ms = hop_ms;
  out.sample_rate = fs;
  out.n_fft = win;
  out.magnitude = Tensor({wave.channels(), frames, bins}, 0.0);
  out.phase = Tensor({wave.channels(), frames, bins}, 0.0);

  RealFft fft(win);
  for (std::size_t c = 0; c < wave.channels(); ++c) {
    const double* x = wave.samples.data().data() + c * len;
    for (std::size_t f = 0; f < frames; ++f) {
      const long start = static_cast<long>(f * hop) - static_cast<long>(half);
      double* in = fft.input();
      for (std::size_t i = 0; i < win; ++i) {
        in[i] = window[i] * x[reflect_index(start + static_cast<long>(i), len)];
      }
      const fftw_complex* spec = fft.run();
      for (std::size_t k = 0; k < bins; ++k) {
        const double re = spec[k][0];
        const double im = spec[k][1];
        const std::size_t o = (c * frames + f) * bins + k;
        out.magnitude[o] = std::hypot(re, im);
        double ph = std::atan2(im, re);
        if (ph <= -std::numbers::pi) ph = std::numbers::pi;
        out.phase[o] = ph;
      }
    }
  }
  return out;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::vector<double> mel_band_centers(std::size_t n_mels, double sample_rate) {
  const double top = hz_to_mel(sample_rate / 2.0);
  std::vector<double> centers(n_mels);
  for (std::size_t m = 0; m < n_mels; ++m) {
    centers[m] = mel_to_hz(top * static_cast<double>(m + 1) /
                           static_cast<double>(n_mels + 1));
  }
  return centers;
}

Tensor mel_filterbank(std::size_t n_mels, std::size_t n_fft,
                      double sample_rate) {
  const std::size_t bins = n_fft / 2 + 1;
  if (n_mels == 0 || n_mels > bins) {
    throw std::invalid_argument("mel_filterbank: n_mels " +
                                std::to_string(n_mels) + " must be in [1, " +
                                std::to_string(bins) + "]");
  }
  const double top = hz_to_mel(sample_rate / 2.0);
  const double step = top / static_cast<double>(n_mels + 1);
  Tensor fb({n_mels, bins}, 0.0);
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double left = step * m;
    const double center = step * (m + 1);
    const double right = step * (m + 2);
    for (std::size_t k = 0; k < bins; ++k) {
      const double mel = hz_to_mel(sample_rate * k / static_cast<double>(n_fft));
      if (mel <= left || mel >= right) continue;
      fb.at({m, k}) = mel <= center ? (mel - left) / (center - left)
                                    : (right - mel) / (right - center);
    }
  }
  return fb;
}

MelFeatureTensor log_mel(const StftTensor& spec, std::size_t n_mels) {
  const Tensor fb = mel_filterbank(n_mels, spec.n_fft, spec.sample_rate);
  const std::size_t c = spec.channels(), t = spec.frames(), g = spec.bins();
  MelFeatureTensor out{Tensor({c, t, n_mels}, 0.0)};
  for (std::size_t row = 0; row < c * t; ++row) {
    const double* mag = spec.magnitude.data().data() + row * g;
    for (std::size_t m = 0; m < n_mels; ++m) {
      const double* w = fb.data().data() + m * g;
      double e = 0.0;
      for (std::size_t k = 0; k < g; ++k) e += w[k] * mag[k];
      out.values[row * n_mels + m] = std::log(e + kLogFloor);
    }
  }
  return out;
}

MagPhaseFeatureTensor mag_phase_features(const StftTensor& spec) {
  const std::size_t c = spec.channels(), t = spec.frames(), g = spec.bins();
  if (spec.phase.shape() != spec.magnitude.shape()) {
    throw std::invalid_argument("mag_phase_features: phase/magnitude shapes");
  }
  MagPhaseFeatureTensor out{Tensor({c, t, 3, g}, 0.0)};
  for (std::size_t row = 0; row < c * t; ++row) {
    for (std::size_t k = 0; k < g; ++k) {
      const double ph = spec.phase[row * g + k];
      out.values[(row * 3 + 0) * g + k] = spec.magnitude[row * g + k];
      out.values[(row * 3 + 1) * g + k] = std::cos(ph);
      out.values[(row * 3 + 2) * g + k] = std::sin(ph);
    }
  }
  return out;
}

SeparableConv SeparableConv::create(nn::ParameterSet& params,
                                    const std::string& name,
                                    std::size_t in_channels,
                                    std::size_t out_channels,
                                    std::size_t stride_time,
                                    std::size_t stride_freq,
                                    std::mt19937_64& rng, std::size_t kernel) {
  SeparableConv l;
  const std::size_t area = kernel * kernel;
  l.depthwise_kernel = params.add(
      name + ".depthwise.weight",
      nn::xavier_uniform({in_channels, 1, kernel, kernel}, area, area, rng));
  l.depthwise_bias = params.add(name + ".depthwise.bias", Tensor({in_channels}, 0.0));
  l.pointwise_kernel = params.add(
      name + ".pointwise.weight",
      nn::xavier_uniform({out_channels, in_channels, 1, 1}, in_channels,
                         out_channels, rng));
  l.pointwise_bias = params.add(name + ".pointwise.bias", Tensor({out_channels}, 0.0));
  l.stride_time = stride_time;
  l.stride_freq = stride_freq;
  return l;
}

ag::Var SeparableConv::operator()(const ag::Var& x) const {
  const std::size_t cin = depthwise_kernel.dim(0);
  ag::Var y = ag::conv2d(x, depthwise_kernel, depthwise_bias, stride_time,
                         stride_freq, cin);
  y = ag::conv2d(y, pointwise_kernel, pointwise_bias, 1, 1, 1);
  return ag::relu(y);
}

ConvFrontend ConvFrontend::create_mel(nn::ParameterSet& params,
                                      const std::string& name,
                                      std::size_t n_mels,
                                      std::mt19937_64& rng) {
  ConvFrontend f;
  f.kind_ = FeatureKind::kMel;
  f.input_bins_ = n_mels;
  f.layers_.push_back(
      SeparableConv::create(params, name + ".conv1", 1, kConvChannels, 2, 2, rng));
  f.layers_.push_back(SeparableConv::create(params, name + ".conv2",
                                            kConvChannels, kConvChannels, 2, 2, rng));
  return f;
}

ConvFrontend ConvFrontend::create_magphase(nn::ParameterSet& params,
                                           const std::string& name,
                                           std::size_t n_bins,
                                           std::mt19937_64& rng) {
  ConvFrontend f;
  f.kind_ = FeatureKind::kMagPhase;
  f.input_bins_ = n_bins;
  f.layers_.push_back(
      SeparableConv::create(params, name + ".conv1", 3, kConvChannels, 1, 2, rng));
  f.layers_.push_back(SeparableConv::create(params, name + ".conv2",
                                            kConvChannels, kConvChannels, 2, 2, rng));
  f.layers_.push_back(SeparableConv::create(params, name + ".conv3",
                                            kConvChannels, kConvChannels, 2, 2, rng));
  return f;
}

std::size_t subsampled_frames(std::size_t stft_frames) {
  return ag::same_out(ag::same_out(stft_frames, 2), 2);
}

std::size_t frontend_feature_dim(FeatureKind kind, std::size_t bins) {
  return kind == FeatureKind::kMel ? kConvChannels * ag::same_out(bins, 4)
                                   : kConvChannels * ag::same_out(bins, 8);
}

std::size_t ConvFrontend::output_dim() const {
  return frontend_feature_dim(kind_, input_bins_);
}

ag::Var ConvFrontend::forward(const ag::Var& features) const {
  const Shape& s = features.shape();
  ag::Var x;
  if (kind_ == FeatureKind::kMel) {
    if (s.size() != 3 || s[2] != input_bins_) {
      throw std::invalid_argument("mel frontend: expected [C, T, " +
                                  std::to_string(input_bins_) + "], got " +
                                  shape_str(s));
    }
    x = ag::reshape(features, {s[0], 1, s[1], s[2]});
  } else {
    if (s.size() != 4 || s[2] != 3 || s[3] != input_bins_) {
      throw std::invalid_argument("magphase frontend: expected [C, T, 3, " +
                                  std::to_string(input_bins_) + "], got " +
                                  shape_str(s));
    }
    x = ag::permute(features, {0, 2, 1, 3});
  }
  if (s[1] < 4) {
    throw std::invalid_argument("frontend: " + std::to_string(s[1]) +
                                " STFT frames, need at least 4");
  }
  for (const auto& layer : layers_) x = layer(x);
  // [C, 32, T, F] -> [C, T, 32·F]
  const std::size_t c = x.dim(0), ch = x.dim(1), t = x.dim(2), f = x.dim(3);
  x = ag::permute(x, {0, 2, 1, 3});
  return ag::reshape(x, {c, t, ch * f});
}

FrontendFeatures conv_frontend_mel(const MelFeatureTensor& mel,
                                   const ConvFrontend& net) {
  if (net.kind() != FeatureKind::kMel) {
    throw std::invalid_argument("conv_frontend_mel: network is not a mel stack");
  }
  return {net.forward(ag::constant(mel.values)).value()};
}

FrontendFeatures conv_frontend_magphase(const MagPhaseFeatureTensor& mp,
                                        const ConvFrontend& net) {
  if (net.kind() != FeatureKind::kMagPhase) {
    throw std::invalid_argument(
        "conv_frontend_magphase: network is not a magnitude+phase stack");
  }
  return {net.forward(ag::constant(mp.values)).value()};
}

Tensor project_to_model_dim(const FrontendFeatures& feat,
                            const nn::Linear& projection) {
  if (feat.values.rank() != 3 || feat.values.dim(2) != projection.weight.dim(0)) {
    throw std::invalid_argument("project_to_model_dim: feature dim mismatch");
  }
  return projection(ag::constant(feat.values)).value();
}

}  // namespace mcsa::frontend
