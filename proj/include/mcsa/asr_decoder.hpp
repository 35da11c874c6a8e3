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

// Speaker-profile-conditioned Transformer ASR decoder, the joint token and
// speaker objective, and greedy serialized decoding.

#ifndef MCSA_ASR_DECODER_HPP_
#define MCSA_ASR_DECODER_HPP_

#include <map>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcsa/autograd.hpp"
#include "mcsa/nn.hpp"
#include "mcsa/sot.hpp"
#include "mcsa/speaker_module.hpp"

namespace mcsa::asr {

using ag::Var;

inline constexpr double kDefaultSpeakerWeight = 0.1;

// Token <-> id map. Ids 0..3 are <sos>, <eos>, <sc>, <unk>.
class Vocabulary {
 public:
  static Vocabulary with_words(const std::vector<std::string>& words);
  static Vocabulary from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  // Unknown tokens map to <unk>.
  int id(const std::string& token) const;
  const std::string& token(int id) const;
  std::size_t size() const { return tokens_.size(); }

  int sos() const { return 0; }
  int eos() const { return 1; }
  int sc() const { return 2; }
  int unk() const { return 3; }

  std::vector<int> encode(const std::vector<std::string>& tokens) const;

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int> ids_;
};

struct AsrDecoderConfig {
  std::size_t d_model = 256;
  std::size_t heads = 4;
  std::size_t ff_dim = 2048;
  std::size_t num_layers = 1;
  std::size_t vocab_size = 0;
  std::size_t embedding_dim = 192;  // E of the speaker profiles
};

class AsrDecoder {
 public:
  static AsrDecoder create(nn::ParameterSet& params, const std::string& name,
                           const AsrDecoderConfig& cfg, std::mt19937_64& rng);

  // input_tokens: <sos> followed by the prefix, length N. profiles: [N, E],
  // row n is the weighted speaker profile for output position n; it is
  // projected to D and added to that position's token embedding.
  // Returns logits [N, V].
  Var forward(const std::vector<int>& input_tokens, const Var& h_asr,
              const Var& profiles) const;

  const AsrDecoderConfig& config() const { return cfg_; }
  const nn::Linear& profile_projection() const { return profile_projection_; }

 private:
  AsrDecoderConfig cfg_;
  Var embedding_;  // [V, D]
  nn::Linear profile_projection_;
  std::vector<nn::DecoderLayer> layers_;
  nn::LayerNorm final_norm_;
  nn::Linear output_;
};

// Next-token logits. `profiles` holds one weighted profile per position of
// <sos> + prev_tokens, the last being the profile of the token to predict.
std::vector<double> decoder_step(const AsrDecoder& decoder, int sos_id,
                                 const std::vector<int>& prev_tokens,
                                 const Tensor& h_asr,
                                 const std::vector<std::vector<double>>& profiles);

struct JointLossReport {
  double asr_loss = 0.0;
  double speaker_loss = 0.0;
  double total = 0.0;
  double speaker_weight = kDefaultSpeakerWeight;
};

struct LossTargets {
  std::vector<int> tokens;    // reference ids, ending with <eos>
  std::vector<int> speakers;  // profile column per token, -1 for none
  std::vector<bool> separator;  // true where tokens[i] is <sc>
};

struct JointLoss {
  Var total;
  JointLossReport report;
};

// asr_loss: mean token cross-entropy. speaker_loss: mean cross-entropy of
// softmax(speaker_logits) against the reference columns, skipping rows with
// speaker -1 and, unless include_separators, the <sc> rows.
// total = asr_loss + speaker_weight · speaker_loss.
JointLoss joint_loss(const Var& token_logits, const Var& speaker_logits,
                     const LossTargets& targets,
                     double speaker_weight = kDefaultSpeakerWeight,
                     bool include_separators = true);

// Builds loss targets from a reference transcript: token ids plus <eos>,
// speaker columns from `profiles` (-1 for <eos>).
LossTargets make_targets(const sot::SotTranscript& ref, const Vocabulary& vocab,
                         const speaker::SpeakerProfileMatrix& profiles);

struct DecodedSequence {
  std::vector<int> tokens;    // without <eos>
  std::vector<int> speakers;  // argmax profile column per token
  bool reached_eos = false;
};

// Alternates speaker query -> posterior -> weighted profile -> ASR decoder
// and emits the argmax token with the argmax speaker, until <eos> or
// max_len tokens.
DecodedSequence greedy_decode(const speaker::SpeakerDecoder& speaker_decoder,
                              const AsrDecoder& decoder, const Vocabulary& vocab,
                              const Tensor& h_asr, const Tensor& h_spk,
                              const speaker::SpeakerProfileMatrix& profiles,
                              std::size_t max_len);

sot::SotTranscript greedy_decode_sot(
    const speaker::SpeakerDecoder& speaker_decoder, const AsrDecoder& decoder,
    const Vocabulary& vocab, const Tensor& h_asr, const Tensor& h_spk,
    const speaker::SpeakerProfileMatrix& profiles, std::size_t max_len);

}  // namespace mcsa::asr

#endif  // MCSA_ASR_DECODER_HPP_
