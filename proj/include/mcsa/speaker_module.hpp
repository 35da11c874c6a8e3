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

// Speaker side of the model: a frame-level speaker encoder (stub network or
// externally supplied embeddings), enrollment profiles, the speaker decoder
// that emits one query per output token, and the posterior / weighted
// profile computed against the enrolled speaker matrix.

#ifndef MCSA_SPEAKER_MODULE_HPP_
#define MCSA_SPEAKER_MODULE_HPP_

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mcsa/autograd.hpp"
#include "mcsa/nn.hpp"
#include "mcsa/signal_frontend.hpp"

namespace mcsa::speaker {

using ag::Var;

struct SpeakerProfileMatrix {
  Tensor matrix;  // S, [E, K], unit-norm columns
  std::vector<std::string> speaker_ids;

  std::size_t embedding_dim() const { return matrix.dim(0); }
  std::size_t size() const { return matrix.dim(1); }
  // Column index of `id`, or -1.
  int index_of(const std::string& id) const;
  std::vector<double> column(std::size_t k) const;
  void validate() const;
};

struct SpeakerEmbeddingSeq {
  Tensor h_spk;  // [T, D]
};

struct SpeakerPosterior {
  std::vector<double> probs;  // K, sums to one
  std::vector<double> query;  // E

  std::size_t argmax() const;
};

using Enrollment = std::pair<std::string, std::vector<std::vector<double>>>;

// Per speaker: mean of the enrollment vectors, L2-normalised. Columns keep
// the input order.
SpeakerProfileMatrix build_profile_matrix(const std::vector<Enrollment>& enrollments);

// Enrollments for `speaker_ids` from externally computed embeddings keyed by
// speaker: each tensor is [E] or [n_enrollments, E].
std::vector<Enrollment> enrollments_from_tensors(const std::map<std::string, Tensor>& table,
                                                 const std::vector<std::string>& speaker_ids);

// Log-Mel features averaged over microphones: [C, T, M] -> [1, T, M].
Tensor average_channels(const Tensor& mel);

// Frame-level stand-in for a pretrained speaker embedding network: the
// log-Mel convolutional subsampling stack followed by a linear layer to D.
// Produces the same frame rate as the ASR frontend.
class SpeakerEncoderStub {
 public:
  static SpeakerEncoderStub create(nn::ParameterSet& params,
                                   const std::string& name, std::size_t n_mels,
                                   std::size_t d_model, std::mt19937_64& rng);
  // mel: [1, T_stft, M] -> [T, D]
  Var forward(const Var& mel) const;
  std::size_t n_mels() const { return frontend_.input_bins(); }

 private:
  frontend::ConvFrontend frontend_;
  nn::Linear projection_;
};

// Channel-averaged log-Mel of `wave` through the stub network.
SpeakerEmbeddingSeq speaker_encode(const frontend::MultichannelWave& wave,
                                   const SpeakerEncoderStub& net);

// Accepts externally computed frame-level embeddings; throws when their
// frame count differs from the encoder's.
SpeakerEmbeddingSeq external_speaker_embeddings(Tensor h_spk,
                                                std::size_t expected_frames,
                                                std::size_t d_model);

// Deterministic utterance-level embedder used to build enrollment profiles
// when no external embeddings are supplied: the time- and channel-averaged
// log-Mel vector through a fixed random projection to E dimensions.
class EnrollmentEmbedder {
 public:
  EnrollmentEmbedder(std::size_t n_mels, std::size_t dim, std::uint64_t seed);
  std::vector<double> embed(const frontend::MultichannelWave& wave) const;
  std::size_t dim() const { return dim_; }

 private:
  std::size_t n_mels_;
  std::size_t dim_;
  Tensor projection_;  // [M, E]
};

struct SpeakerDecoderConfig {
  std::size_t d_model = 256;
  std::size_t heads = 4;
  std::size_t ff_dim = 2048;
  std::size_t num_layers = 2;
  std::size_t vocab_size = 0;
  std::size_t embedding_dim = 192;  // E
};

// Layer 1 cross-attends H^asr, layer 2 cross-attends H^spk (further layers
// alternate); a final LayerNorm and linear map D -> E produce the queries.
class SpeakerDecoder {
 public:
  static SpeakerDecoder create(nn::ParameterSet& params, const std::string& name,
                               const SpeakerDecoderConfig& cfg,
                               std::mt19937_64& rng);

  // input_tokens: <sos> followed by the token prefix. Row n of the result is
  // the query for the token at output position n. h_asr, h_spk: [T, D].
  Var forward(const std::vector<int>& input_tokens, const Var& h_asr,
              const Var& h_spk) const;

  const SpeakerDecoderConfig& config() const { return cfg_; }

 private:
  SpeakerDecoderConfig cfg_;
  Var embedding_;  // [V, D]
  std::vector<nn::DecoderLayer> layers_;
  nn::LayerNorm final_norm_;
  nn::Linear to_query_;
};

// Query for the next position given the previous tokens (without <sos>).
std::vector<double> speaker_decode(const SpeakerDecoder& decoder, int sos_id,
                                   const std::vector<int>& prev_tokens,
                                   const Tensor& h_asr, const Tensor& h_spk);

// S^T q for every row of q: [N, E] -> [N, K].
Var speaker_logits(const Var& queries, const SpeakerProfileMatrix& profiles);
// Posterior-weighted profile S·p for every row: [N, K] -> [N, E].
Var weighted_profiles(const Var& posteriors, const SpeakerProfileMatrix& profiles);

SpeakerPosterior speaker_posterior(const std::vector<double>& query,
                                   const SpeakerProfileMatrix& profiles);
std::vector<double> weighted_profile(const SpeakerPosterior& posterior,
                                     const SpeakerProfileMatrix& profiles);

}  // namespace mcsa::speaker

#endif  // MCSA_SPEAKER_MODULE_HPP_
