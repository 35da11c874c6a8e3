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

// The full speaker-attributed recognizer: convolutional frontend, MFCCA
// encoder, speaker decoder and profile-conditioned ASR decoder, plus
// training, decoding and checkpoints.

#ifndef MCSA_MODEL_HPP_
#define MCSA_MODEL_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcsa/asr_decoder.hpp"
#include "mcsa/mfcca_encoder.hpp"
#include "mcsa/nn.hpp"
#include "mcsa/signal_frontend.hpp"
#include "mcsa/sot.hpp"
#include "mcsa/speaker_module.hpp"

namespace mcsa::model {

using ag::Var;

struct ModelConfig {
  frontend::FeatureKind features = frontend::FeatureKind::kMel;
  std::size_t n_mels = 80;
  double sample_rate = 16000.0;
  double window_ms = 25.0;  // G = window samples / 2 + 1
  double hop_ms = 10.0;
  std::size_t channels = 4;
  std::size_t d_model = 256;
  std::size_t heads = 4;
  std::size_t context = 2;
  std::size_t encoder_layers = 12;
  std::size_t encoder_ff_dim = 2048;
  std::size_t conv_kernel = 15;
  std::size_t decoder_ff_dim = 2048;
  std::size_t asr_decoder_layers = 1;
  std::size_t speaker_decoder_layers = 2;
  std::size_t embedding_dim = 192;  // E
  std::size_t profile_pool = 8;     // K
  std::uint64_t seed = 0;

  // Full-size configuration.
  static ModelConfig full();
  // Small dimensions for desk-scale runs.
  static ModelConfig toy();

  std::size_t stft_bins() const;
  void validate() const;
  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

// One decoded or trained-on mixture.
struct Example {
  std::string id;
  Tensor features;     // [C, T_stft, M] or [C, T_stft, 3, G]
  Tensor speaker_mel;  // [1, T_stft, M], channel-averaged log-Mel
  speaker::SpeakerProfileMatrix profiles;
  sot::SotTranscript reference;  // may be empty when only decoding
};

// Computes encoder and speaker inputs for a wave, keeping the first
// cfg.channels microphones.
Example make_example(const std::string& id, const frontend::MultichannelWave& wave,
                     const ModelConfig& cfg, speaker::SpeakerProfileMatrix profiles,
                     sot::SotTranscript reference = {});

struct ForwardOutput {
  Var token_logits;    // [N, V]
  Var speaker_logits;  // [N, K]
  Var h_asr;           // [T, D]
  Var h_spk;           // [T, D]
};

class SaAsrModel {
 public:
  SaAsrModel(const ModelConfig& cfg, asr::Vocabulary vocab);

  const ModelConfig& config() const { return cfg_; }
  const asr::Vocabulary& vocabulary() const { return vocab_; }
  nn::ParameterSet& parameters() { return params_; }
  const nn::ParameterSet& parameters() const { return params_; }

  // [C, T_stft, ...] features -> H^asr [T, D].
  Var encode(const Var& features) const;
  // [1, T_stft, M] -> H^spk [T, D].
  Var speaker_embeddings(const Var& speaker_mel) const;

  // Teacher-forced pass over <sos> + reference tokens: speaker queries give
  // posteriors over the profiles, whose weighted profiles condition the ASR
  // decoder at each position.
  ForwardOutput forward(const Var& features, const Var& speaker_mel,
                        const std::vector<int>& input_tokens,
                        const speaker::SpeakerProfileMatrix& profiles) const;

  asr::JointLoss loss(const Example& ex, double speaker_weight) const;

  // Greedy serialized decoding; max_len 0 allows 2·T + 8 tokens.
  sot::SotTranscript decode(const Example& ex, std::size_t max_len = 0) const;

  void save(const std::string& path, const nlohmann::json& extra_meta = {}) const;
  static SaAsrModel load(const std::string& path);

 private:
  ModelConfig cfg_;
  asr::Vocabulary vocab_;
  nn::ParameterSet params_;
  frontend::ConvFrontend frontend_;
  nn::Linear projection_;
  encoder::MfccaEncoder encoder_;
  speaker::SpeakerEncoderStub speaker_encoder_;
  speaker::SpeakerDecoder speaker_decoder_;
  asr::AsrDecoder asr_decoder_;
};

struct TrainConfig {
  std::size_t steps = 200;
  std::string optimizer = "adam";  // adam | sgd
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double epsilon = 1e-9;
  double grad_clip = 5.0;  // global L2 norm; 0 disables
  double speaker_weight = asr::kDefaultSpeakerWeight;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct StepLog {
  std::size_t step = 0;
  double total = 0.0;
  double asr_loss = 0.0;
  double speaker_loss = 0.0;
};

// Full-batch training: each step averages the joint loss over all examples
// and applies one optimizer update. Losses are logged before the update.
class Trainer {
 public:
  Trainer(SaAsrModel& model, TrainConfig cfg);

  StepLog step(const std::vector<Example>& batch);
  std::vector<StepLog> run(const std::vector<Example>& batch,
                           const std::function<bool(const StepLog&)>& on_step = {});

 private:
  SaAsrModel& model_;
  TrainConfig cfg_;
  std::size_t t_ = 0;
  std::vector<Tensor> m_, v_;
};

std::string loss_csv(const std::vector<StepLog>& log);

}  // namespace mcsa::model

#endif  // MCSA_MODEL_HPP_
