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

// Multichannel STFT, the two encoder input representations (log-Mel and
// magnitude+phase) and the depthwise-separable convolution stacks that turn
// them into C × T × A frame sequences.

#ifndef MCSA_SIGNAL_FRONTEND_HPP_
#define MCSA_SIGNAL_FRONTEND_HPP_

#include <random>
#include <string>
#include <vector>

#include "mcsa/autograd.hpp"
#include "mcsa/nn.hpp"
#include "mcsa/tensor.hpp"

namespace mcsa::frontend {

inline constexpr double kLogFloor = 1e-10;
inline constexpr std::size_t kConvChannels = 32;

struct MultichannelWave {
  Tensor samples;  // [C, L]
  double sample_rate = 16000.0;

  std::size_t channels() const { return samples.dim(0); }
  std::size_t length() const { return samples.dim(1); }
  // Throws std::invalid_argument on an empty or non-finite signal.
  void validate() const;
};

struct StftTensor {
  Tensor magnitude;  // [C, T_stft, G], >= 0
  Tensor phase;      // [C, T_stft, G], radians in (-pi, pi]
  double window_ms = 25.0;
  double hop_ms = 10.0;
  double sample_rate = 16000.0;
  std::size_t n_fft = 0;

  std::size_t channels() const { return magnitude.dim(0); }
  std::size_t frames() const { return magnitude.dim(1); }
  std::size_t bins() const { return magnitude.dim(2); }
};

struct MelFeatureTensor {
  Tensor values;  // [C, T_stft, M]
};

struct MagPhaseFeatureTensor {
  Tensor values;  // [C, T_stft, 3, G]; planes: magnitude, cos, sin
};

struct FrontendFeatures {
  Tensor values;  // [C, T, A]
};

enum class FeatureKind { kMel, kMagPhase };

FeatureKind parse_feature_kind(const std::string& name);
std::string feature_kind_name(FeatureKind kind);

// Periodic-Hann STFT with reflect padding of n_fft/2 at both ends; frame i is
// centred on sample i·hop, giving ceil(L / hop) frames. n_fft equals the
// window length in samples.
StftTensor stft(const MultichannelWave& wave, double window_ms = 25.0,
                double hop_ms = 10.0);

// HTK-style triangular filters spanning 0 Hz to Nyquist, [n_mels, G].
Tensor mel_filterbank(std::size_t n_mels, std::size_t n_fft,
                      double sample_rate);
double hz_to_mel(double hz);
double mel_to_hz(double mel);
// Centre frequency (Hz) of each band of mel_filterbank.
std::vector<double> mel_band_centers(std::size_t n_mels, double sample_rate);

MelFeatureTensor log_mel(const StftTensor& spec, std::size_t n_mels = 80);
MagPhaseFeatureTensor mag_phase_features(const StftTensor& spec);

// Depthwise k×k convolution followed by a pointwise 1×1 mix and ReLU.
struct SeparableConv {
  ag::Var depthwise_kernel;  // [Cin, 1, k, k]
  ag::Var depthwise_bias;    // [Cin]
  ag::Var pointwise_kernel;  // [Cout, Cin, 1, 1]
  ag::Var pointwise_bias;    // [Cout]
  std::size_t stride_time = 1;
  std::size_t stride_freq = 1;

  static SeparableConv create(nn::ParameterSet& params, const std::string& name,
                              std::size_t in_channels, std::size_t out_channels,
                              std::size_t stride_time, std::size_t stride_freq,
                              std::mt19937_64& rng, std::size_t kernel = 3);
  // x: [B, Cin, H, W]
  ag::Var operator()(const ag::Var& x) const;
};

// Per-microphone convolutional subsampling. Microphones are the batch axis,
// so every channel shares the same weights.
class ConvFrontend {
 public:
  // Two stride-2 layers over a 1-plane [T, M] image.
  static ConvFrontend create_mel(nn::ParameterSet& params,
                                 const std::string& name, std::size_t n_mels,
                                 std::mt19937_64& rng);
  // A plane-fusing layer (stride 1 in time, 2 in frequency) followed by two
  // stride-2 layers over a 3-plane [T, G] image.
  static ConvFrontend create_magphase(nn::ParameterSet& params,
                                      const std::string& name,
                                      std::size_t n_bins, std::mt19937_64& rng);

  FeatureKind kind() const { return kind_; }
  std::size_t input_bins() const { return input_bins_; }
  std::size_t output_dim() const;

  // [C, T_stft, M] (mel) or [C, T_stft, 3, G] (magphase) -> [C, T, A]
  ag::Var forward(const ag::Var& features) const;

  const std::vector<SeparableConv>& layers() const { return layers_; }

 private:
  FeatureKind kind_ = FeatureKind::kMel;
  std::size_t input_bins_ = 0;
  std::vector<SeparableConv> layers_;
};

// Frames after the 4x time subsampling shared by both stacks.
std::size_t subsampled_frames(std::size_t stft_frames);
// A = 32·ceil(M/4) for log-Mel, 32·ceil(G/8) for magnitude+phase.
std::size_t frontend_feature_dim(FeatureKind kind, std::size_t bins);

FrontendFeatures conv_frontend_mel(const MelFeatureTensor& mel,
                                   const ConvFrontend& net);
FrontendFeatures conv_frontend_magphase(const MagPhaseFeatureTensor& mp,
                                        const ConvFrontend& net);

// Shared affine map A -> D over every channel and frame: [C, T, A] -> [C, T, D].
Tensor project_to_model_dim(const FrontendFeatures& feat,
                            const nn::Linear& projection);

}  // namespace mcsa::frontend

#endif  // MCSA_SIGNAL_FRONTEND_HPP_
