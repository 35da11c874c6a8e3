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

#include "mcsa/asr_decoder.hpp"

#include <algorithm>
#include <stdexcept>

namespace mcsa::asr {

namespace {
const std::vector<std::string> kSpecials = {"<sos>", "<eos>", sot::kSpeakerChange,
                                            "<unk>"};
}  // namespace

Vocabulary Vocabulary::with_words(const std::vector<std::string>& words) {
  Vocabulary v;
  for (const auto& s : kSpecials) {
    v.ids_[s] = static_cast<int>(v.tokens_.size());
    v.tokens_.push_back(s);
  }
  for (const auto& w : words) {
    if (v.ids_.count(w)) continue;
    v.ids_[w] = static_cast<int>(v.tokens_.size());
    v.tokens_.push_back(w);
  }
  return v;
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  std::vector<std::pair<int, std::string>> entries;
  for (auto it = j.begin(); it != j.end(); ++it) {
    entries.emplace_back(it.value().get<int>(), it.key());
  }
  std::sort(entries.begin(), entries.end());
  Vocabulary v;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].first != static_cast<int>(i)) {
      throw std::invalid_argument("vocabulary ids must be dense from 0");
    }
    v.ids_[entries[i].second] = entries[i].first;
    v.tokens_.push_back(entries[i].second);
  }
  for (std::size_t i = 0; i < kSpecials.size(); ++i) {
    if (v.tokens_.size() <= i || v.tokens_[i] != kSpecials[i]) {
      throw std::invalid_argument("vocabulary must start with <sos> <eos> <sc> <unk>");
    }
  }
  return v;
}

nlohmann::json Vocabulary::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < tokens_.size(); ++i) j[tokens_[i]] = i;
  return j;
}

int Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? unk() : it->second;
}

const std::string& Vocabulary::token(int id) const { return tokens_.at(id); }

std::vector<int> Vocabulary::encode(const std::vector<std::string>& tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

AsrDecoder AsrDecoder::create(nn::ParameterSet& params, const std::string& name,
                              const AsrDecoderConfig& cfg, std::mt19937_64& rng) {
  if (cfg.vocab_size == 0 || cfg.num_layers == 0) {
    throw std::invalid_argument("asr decoder: vocab and layers must be positive");
  }
  AsrDecoder d;
  d.cfg_ = cfg;
  d.embedding_ = params.add(name + ".embedding",
                            nn::xavier_uniform({cfg.vocab_size, cfg.d_model},
                                               cfg.vocab_size, cfg.d_model, rng));
  d.profile_projection_ = nn::Linear::create(params, name + ".profile_projection",
                                             cfg.embedding_dim, cfg.d_model, rng);
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    d.layers_.push_back(nn::DecoderLayer::create(
        params, name + ".layer" + std::to_string(l), cfg.d_model, cfg.heads,
        cfg.ff_dim, rng));
  }
  d.final_norm_ = nn::LayerNorm::create(params, name + ".final_norm", cfg.d_model);
  d.output_ = nn::Linear::create(params, name + ".output", cfg.d_model,
                                 cfg.vocab_size, rng);
  return d;
}

Var AsrDecoder::forward(const std::vector<int>& input_tokens, const Var& h_asr,
                        const Var& profiles) const {
  if (h_asr.shape().size() != 2 || h_asr.dim(0) == 0) {
    throw std::invalid_argument("asr decoder: empty or malformed H^asr");
  }
  const std::size_t n = input_tokens.size(), d = cfg_.d_model;
  if (n == 0) throw std::invalid_argument("asr decoder: no input tokens");
  if (profiles.shape() != Shape{n, cfg_.embedding_dim}) {
    throw std::invalid_argument("asr decoder: profiles " + shape_str(profiles.shape()) +
                                ", expected [" + std::to_string(n) + ", " +
                                std::to_string(cfg_.embedding_dim) + "]");
  }
  Var x = ag::add(ag::embedding(embedding_, input_tokens), profile_projection_(profiles));
  x = ag::add(x, ag::constant(nn::sinusoidal_positions(n, d)));
  x = ag::reshape(x, {1, n, d});
  const Var memory = ag::reshape(h_asr, {1, h_asr.dim(0), d});
  for (const auto& layer : layers_) x = layer(x, memory);
  return ag::reshape(output_(final_norm_(x)), {n, cfg_.vocab_size});
}

std::vector<double> decoder_step(const AsrDecoder& decoder, int sos_id,
                                 const std::vector<int>& prev_tokens,
                                 const Tensor& h_asr,
                                 const std::vector<std::vector<double>>& profiles) {
  std::vector<int> input{sos_id};
  input.insert(input.end(), prev_tokens.begin(), prev_tokens.end());
  const std::size_t e = decoder.config().embedding_dim;
  if (profiles.size() != input.size()) {
    throw std::invalid_argument("decoder_step: need one profile per input position");
  }
  Tensor prof({input.size(), e}, 0.0);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (profiles[i].size() != e) {
      throw std::invalid_argument("decoder_step: profile dimension mismatch");
    }
    std::copy(profiles[i].begin(), profiles[i].end(), prof.data().begin() + i * e);
  }
  const Tensor logits =
      decoder.forward(input, ag::constant(h_asr), ag::constant(std::move(prof))).value();
  const std::size_t v = logits.dim(1);
  return {logits.data().end() - static_cast<long>(v), logits.data().end()};
}

JointLoss joint_loss(const Var& token_logits, const Var& speaker_logits,
                     const LossTargets& targets, double speaker_weight,
                     bool include_separators) {
  const std::size_t n = targets.tokens.size();
  if (token_logits.shape().size() != 2 || token_logits.dim(0) != n ||
      speaker_logits.shape().size() != 2 || speaker_logits.dim(0) != n ||
      targets.speakers.size() != n || targets.separator.size() != n) {
    throw std::invalid_argument("joint_loss: sequence lengths do not match the reference (" +
                                std::to_string(n) + ")");
  }
  const std::vector<double> token_w(n, 1.0);
  std::vector<double> spk_w(n, 0.0);
  std::vector<int> spk_t(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (targets.speakers[i] < 0) continue;
    if (targets.separator[i] && !include_separators) continue;
    spk_w[i] = 1.0;
    spk_t[i] = targets.speakers[i];
  }
  Var asr = ag::nll_loss(ag::log_softmax(token_logits), targets.tokens, token_w);
  Var spk = ag::nll_loss(ag::log_softmax(speaker_logits), spk_t, spk_w);
  Var total = ag::add(asr, ag::scale(spk, speaker_weight));
  JointLossReport r;
  r.asr_loss = asr.value()[0];
  r.speaker_loss = spk.value()[0];
  r.total = total.value()[0];
  r.speaker_weight = speaker_weight;
  return {total, r};
}

LossTargets make_targets(const sot::SotTranscript& ref, const Vocabulary& vocab,
                         const speaker::SpeakerProfileMatrix& profiles) {
  LossTargets t;
  for (std::size_t i = 0; i < ref.tokens.size(); ++i) {
    t.tokens.push_back(vocab.id(ref.tokens[i]));
    const int k = profiles.index_of(ref.token_speakers[i]);
    if (k < 0) {
      throw std::invalid_argument("reference speaker " + ref.token_speakers[i] +
                                  " is not enrolled");
    }
    t.speakers.push_back(k);
    t.separator.push_back(ref.tokens[i] == sot::kSpeakerChange);
  }
  t.tokens.push_back(vocab.eos());
  t.speakers.push_back(-1);
  t.separator.push_back(false);
  return t;
}

DecodedSequence greedy_decode(const speaker::SpeakerDecoder& speaker_decoder,
                              const AsrDecoder& decoder, const Vocabulary& vocab,
                              const Tensor& h_asr, const Tensor& h_spk,
                              const speaker::SpeakerProfileMatrix& profiles,
                              std::size_t max_len) {
  const Var asr = ag::constant(h_asr);
  const Var spk = ag::constant(h_spk);
  DecodedSequence out;
  std::vector<int> input{vocab.sos()};
  while (out.tokens.size() < max_len) {
    const Var q = speaker_decoder.forward(input, asr, spk);
    const Var post = ag::softmax(speaker::speaker_logits(q, profiles));
    const Var prof = speaker::weighted_profiles(post, profiles);
    const Tensor logits = decoder.forward(input, asr, prof).value();
    const std::size_t n = input.size(), v = logits.dim(1), k = profiles.size();
    const auto row = logits.data().subspan((n - 1) * v, v);
    const int token = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    if (token == vocab.eos()) {
      out.reached_eos = true;
      break;
    }
    const auto prow = post.value().data().subspan((n - 1) * k, k);
    out.tokens.push_back(token);
    out.speakers.push_back(
        static_cast<int>(std::max_element(prow.begin(), prow.end()) - prow.begin()));
    input.push_back(token);
  }
  return out;
}

sot::SotTranscript greedy_decode_sot(
    const speaker::SpeakerDecoder& speaker_decoder, const AsrDecoder& decoder,
    const Vocabulary& vocab, const Tensor& h_asr, const Tensor& h_spk,
    const speaker::SpeakerProfileMatrix& profiles, std::size_t max_len) {
  const DecodedSequence d =
      greedy_decode(speaker_decoder, decoder, vocab, h_asr, h_spk, profiles, max_len);
  sot::SotTranscript t;
  for (std::size_t i = 0; i < d.tokens.size(); ++i) {
    t.tokens.push_back(vocab.token(d.tokens[i]));
    t.token_speakers.push_back(profiles.speaker_ids.at(d.speakers[i]));
  }
  return t;
}

}  // namespace mcsa::asr
