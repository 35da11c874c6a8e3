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

#include "mcsa/speaker_module.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace mcsa::speaker {

int SpeakerProfileMatrix::index_of(const std::string& id) const {
  for (std::size_t k = 0; k < speaker_ids.size(); ++k) {
    if (speaker_ids[k] == id) return static_cast<int>(k);
  }
  return -1;
}

std::vector<double> SpeakerProfileMatrix::column(std::size_t k) const {
  std::vector<double> col(embedding_dim());
  for (std::size_t e = 0; e < col.size(); ++e) col[e] = matrix.at({e, k});
  return col;
}

void SpeakerProfileMatrix::validate() const {
  if (matrix.rank() != 2 || matrix.dim(1) == 0) {
    throw std::invalid_argument("profile matrix must be [E, K] with K >= 1");
  }
  if (speaker_ids.size() != matrix.dim(1)) {
    throw std::invalid_argument("profile matrix: id count does not match K");
  }
  if (std::set<std::string>(speaker_ids.begin(), speaker_ids.end()).size() != size()) {
    throw std::invalid_argument("profile matrix: duplicate speaker id");
  }
  for (std::size_t k = 0; k < size(); ++k) {
    double n2 = 0.0;
    for (double v : column(k)) n2 += v * v;
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-6) {
      throw std::invalid_argument("profile matrix: column " + std::to_string(k) +
                                  " is not unit norm");
    }
  }
}

std::size_t SpeakerPosterior::argmax() const {
  return static_cast<std::size_t>(
      std::max_element(probs.begin(), probs.end()) - probs.begin());
}

SpeakerProfileMatrix build_profile_matrix(const std::vector<Enrollment>& enrollments) {
  if (enrollments.empty()) {
    throw std::invalid_argument("build_profile_matrix: no enrollments");
  }
  const std::size_t e_dim = enrollments.front().second.empty()
                                ? 0
                                : enrollments.front().second.front().size();
  if (e_dim == 0) throw std::invalid_argument("build_profile_matrix: empty embedding");
  SpeakerProfileMatrix out;
  out.matrix = Tensor({e_dim, enrollments.size()}, 0.0);
  for (std::size_t k = 0; k < enrollments.size(); ++k) {
    const auto& [id, vectors] = enrollments[k];
    if (vectors.empty()) {
      throw std::invalid_argument("build_profile_matrix: speaker " + id +
                                  " has no enrollment embeddings");
    }
    std::vector<double> mean(e_dim, 0.0);
    for (const auto& v : vectors) {
      if (v.size() != e_dim) {
        throw std::invalid_argument("build_profile_matrix: embedding size mismatch for " + id);
      }
      for (std::size_t e = 0; e < e_dim; ++e) mean[e] += v[e];
    }
    double norm = 0.0;
    for (double& m : mean) {
      m /= static_cast<double>(vectors.size());
      norm += m * m;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      throw std::invalid_argument("build_profile_matrix: zero mean embedding for " + id);
    }
    for (std::size_t e = 0; e < e_dim; ++e) out.matrix.at({e, k}) = mean[e] / norm;
    out.speaker_ids.push_back(id);
  }
  out.validate();
  return out;
}

std::vector<Enrollment> enrollments_from_tensors(const std::map<std::string, Tensor>& table,
                                                 const std::vector<std::string>& speaker_ids) {
  std::vector<Enrollment> out;
  for (const auto& id : speaker_ids) {
    const auto it = table.find(id);
    if (it == table.end()) throw std::invalid_argument("no embeddings for speaker " + id);
    const Tensor& t = it->second;
    if (t.rank() != 1 && t.rank() != 2) {
      throw std::invalid_argument("embeddings for " + id + " must be [E] or [n, E]");
    }
    const std::size_t rows = t.rank() == 1 ? 1 : t.dim(0);
    const std::size_t dim = t.shape().back();
    std::vector<std::vector<double>> vectors;
    for (std::size_t r = 0; r < rows; ++r) {
      vectors.emplace_back(t.data().begin() + static_cast<long>(r * dim),
                           t.data().begin() + static_cast<long>((r + 1) * dim));
    }
    out.emplace_back(id, std::move(vectors));
  }
  return out;
}

Tensor average_channels(const Tensor& mel) {
  if (mel.rank() != 3) throw std::invalid_argument("average_channels: expected [C, T, M]");
  const std::size_t c = mel.dim(0), t = mel.dim(1), m = mel.dim(2);
  Tensor out({1, t, m}, 0.0);
  for (std::size_t ch = 0; ch < c; ++ch)
    for (std::size_t i = 0; i < t * m; ++i) out[i] += mel[ch * t * m + i];
  for (double& v : out.vec()) v /= static_cast<double>(c);
  return out;
}

SpeakerEncoderStub SpeakerEncoderStub::create(nn::ParameterSet& params,
                                              const std::string& name,
                                              std::size_t n_mels,
                                              std::size_t d_model,
                                              std::mt19937_64& rng) {
  SpeakerEncoderStub s;
  s.frontend_ = frontend::ConvFrontend::create_mel(params, name + ".frontend", n_mels, rng);
  s.projection_ = nn::Linear::create(params, name + ".projection",
                                     s.frontend_.output_dim(), d_model, rng);
  return s;
}

Var SpeakerEncoderStub::forward(const Var& mel) const {
  if (mel.shape().size() != 3 || mel.dim(0) != 1) {
    throw std::invalid_argument("speaker encoder: expected [1, T, M], got " +
                                shape_str(mel.shape()));
  }
  Var h = projection_(frontend_.forward(mel));  // [1, T, D]
  return ag::reshape(h, {h.dim(1), h.dim(2)});
}

SpeakerEmbeddingSeq speaker_encode(const frontend::MultichannelWave& wave,
                                   const SpeakerEncoderStub& net) {
  const auto mel = frontend::log_mel(frontend::stft(wave), net.n_mels());
  return {net.forward(ag::constant(average_channels(mel.values))).value()};
}

SpeakerEmbeddingSeq external_speaker_embeddings(Tensor h_spk,
                                                std::size_t expected_frames,
                                                std::size_t d_model) {
  if (h_spk.rank() != 2 || h_spk.dim(1) != d_model) {
    throw std::invalid_argument("external speaker embeddings must be [T, " +
                                std::to_string(d_model) + "]");
  }
  if (h_spk.dim(0) != expected_frames) {
    throw std::invalid_argument("external speaker embeddings have " +
                                std::to_string(h_spk.dim(0)) +
                                " frames, encoder produces " +
                                std::to_string(expected_frames));
  }
  return {std::move(h_spk)};
}

EnrollmentEmbedder::EnrollmentEmbedder(std::size_t n_mels, std::size_t dim,
                                       std::uint64_t seed)
    : n_mels_(n_mels), dim_(dim), projection_({n_mels, dim}, 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(n_mels)));
  for (double& v : projection_.vec()) v = normal(rng);
}

std::vector<double> EnrollmentEmbedder::embed(const frontend::MultichannelWave& wave) const {
  const auto mel = frontend::log_mel(frontend::stft(wave), n_mels_);
  const std::size_t c = mel.values.dim(0), t = mel.values.dim(1);
  std::vector<double> avg(n_mels_, 0.0);
  for (std::size_t row = 0; row < c * t; ++row)
    for (std::size_t m = 0; m < n_mels_; ++m) avg[m] += mel.values[row * n_mels_ + m];
  // Mean-removed so the projection sees spectral shape rather than level.
  double mu = 0.0;
  for (double& a : avg) {
    a /= static_cast<double>(c * t);
    mu += a;
  }
  mu /= static_cast<double>(n_mels_);
  std::vector<double> out(dim_, 0.0);
  for (std::size_t m = 0; m < n_mels_; ++m)
    for (std::size_t e = 0; e < dim_; ++e)
      out[e] += (avg[m] - mu) * projection_.at({m, e});
  return out;
}

SpeakerDecoder SpeakerDecoder::create(nn::ParameterSet& params,
                                      const std::string& name,
                                      const SpeakerDecoderConfig& cfg,
                                      std::mt19937_64& rng) {
  if (cfg.vocab_size == 0 || cfg.num_layers == 0 || cfg.embedding_dim == 0) {
    throw std::invalid_argument("speaker decoder: vocab, layers and E must be positive");
  }
  SpeakerDecoder d;
  d.cfg_ = cfg;
  d.embedding_ = params.add(name + ".embedding",
                            nn::xavier_uniform({cfg.vocab_size, cfg.d_model},
                                               cfg.vocab_size, cfg.d_model, rng));
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    d.layers_.push_back(nn::DecoderLayer::create(
        params, name + ".layer" + std::to_string(l), cfg.d_model, cfg.heads,
        cfg.ff_dim, rng));
  }
  d.final_norm_ = nn::LayerNorm::create(params, name + ".final_norm", cfg.d_model);
  d.to_query_ = nn::Linear::create(params, name + ".to_query", cfg.d_model,
                                   cfg.embedding_dim, rng);
  return d;
}

Var SpeakerDecoder::forward(const std::vector<int>& input_tokens,
                            const Var& h_asr, const Var& h_spk) const {
  if (h_asr.shape().size() != 2 || h_asr.dim(0) == 0) {
    throw std::invalid_argument("speaker decoder: empty or malformed H^asr");
  }
  if (h_spk.shape() != h_asr.shape()) {
    throw std::invalid_argument("speaker decoder: H^spk " + shape_str(h_spk.shape()) +
                                " does not match H^asr " + shape_str(h_asr.shape()));
  }
  if (input_tokens.empty()) throw std::invalid_argument("speaker decoder: no input tokens");
  const std::size_t n = input_tokens.size(), t = h_asr.dim(0), d = cfg_.d_model;
  Var x = ag::add(ag::embedding(embedding_, input_tokens),
                  ag::constant(nn::sinusoidal_positions(n, d)));
  x = ag::reshape(x, {1, n, d});
  const Var mem_asr = ag::reshape(h_asr, {1, t, d});
  const Var mem_spk = ag::reshape(h_spk, {1, t, d});
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    x = layers_[l](x, l % 2 == 0 ? mem_asr : mem_spk);
  }
  return ag::reshape(to_query_(final_norm_(x)), {n, cfg_.embedding_dim});
}

std::vector<double> speaker_decode(const SpeakerDecoder& decoder, int sos_id,
                                   const std::vector<int>& prev_tokens,
                                   const Tensor& h_asr, const Tensor& h_spk) {
  std::vector<int> input{sos_id};
  input.insert(input.end(), prev_tokens.begin(), prev_tokens.end());
  const Tensor q = decoder.forward(input, ag::constant(h_asr), ag::constant(h_spk)).value();
  const std::size_t e = q.dim(1);
  return {q.data().end() - static_cast<long>(e), q.data().end()};
}

Var speaker_logits(const Var& queries, const SpeakerProfileMatrix& profiles) {
  return ag::matmul(queries, ag::constant(profiles.matrix));
}

Var weighted_profiles(const Var& posteriors, const SpeakerProfileMatrix& profiles) {
  const std::size_t e = profiles.embedding_dim(), k = profiles.size();
  Tensor st({k, e}, 0.0);
  for (std::size_t i = 0; i < e; ++i)
    for (std::size_t j = 0; j < k; ++j) st.at({j, i}) = profiles.matrix.at({i, j});
  return ag::matmul(posteriors, ag::constant(std::move(st)));
}

SpeakerPosterior speaker_posterior(const std::vector<double>& query,
                                   const SpeakerProfileMatrix& profiles) {
  if (query.size() != profiles.embedding_dim()) {
    throw std::invalid_argument("speaker_posterior: query has " +
                                std::to_string(query.size()) + " dims, profiles " +
                                std::to_string(profiles.embedding_dim()));
  }
  const Var q = ag::constant(Tensor({1, query.size()}, query));
  const Tensor p = ag::softmax(speaker_logits(q, profiles)).value();
  return {p.vec(), query};
}

std::vector<double> weighted_profile(const SpeakerPosterior& posterior,
                                     const SpeakerProfileMatrix& profiles) {
  if (posterior.probs.size() != profiles.size()) {
    throw std::invalid_argument("weighted_profile: posterior size mismatch");
  }
  const Var p = ag::constant(Tensor({1, posterior.probs.size()}, posterior.probs));
  return weighted_profiles(p, profiles).value().vec();
}

}  // namespace mcsa::speaker
