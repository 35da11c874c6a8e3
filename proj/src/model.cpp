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

#include "mcsa/model.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include "mcsa/io.hpp"

namespace mcsa::model {

ModelConfig ModelConfig::full() { return ModelConfig{}; }

ModelConfig ModelConfig::toy() {
  ModelConfig c;
  c.channels = 2;
  c.d_model = 32;
  c.heads = 4;
  c.context = 2;
  c.encoder_layers = 2;
  c.encoder_ff_dim = 64;
  c.conv_kernel = 5;
  c.decoder_ff_dim = 64;
  c.embedding_dim = 32;
  return c;
}

std::size_t ModelConfig::stft_bins() const {
  return static_cast<std::size_t>(std::lround(window_ms * sample_rate / 1000.0)) / 2 + 1;
}

void ModelConfig::validate() const {
  if (channels < 1 || channels > encoder::kMaxFusionChannels) {
    throw std::invalid_argument("channels must be 1..4");
  }
  if (d_model == 0 || heads == 0 || d_model % heads != 0) {
    throw std::invalid_argument("d_model must be a positive multiple of heads");
  }
  if (encoder_layers == 0 || asr_decoder_layers == 0 || speaker_decoder_layers == 0) {
    throw std::invalid_argument("layer counts must be positive");
  }
  if (embedding_dim == 0 || profile_pool == 0 || n_mels == 0) {
    throw std::invalid_argument("embedding_dim, profile_pool and n_mels must be positive");
  }
  if (n_mels > stft_bins()) throw std::invalid_argument("n_mels exceeds STFT bins");
}

nlohmann::json ModelConfig::to_json() const {
  return {{"features", frontend::feature_kind_name(features)},
          {"n_mels", n_mels},
          {"sample_rate", sample_rate},
          {"window_ms", window_ms},
          {"hop_ms", hop_ms},
          {"channels", channels},
          {"d_model", d_model},
          {"heads", heads},
          {"context", context},
          {"encoder_layers", encoder_layers},
          {"encoder_ff_dim", encoder_ff_dim},
          {"conv_kernel", conv_kernel},
          {"decoder_ff_dim", decoder_ff_dim},
          {"asr_decoder_layers", asr_decoder_layers},
          {"speaker_decoder_layers", speaker_decoder_layers},
          {"embedding_dim", embedding_dim},
          {"profile_pool", profile_pool},
          {"seed", seed}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  if (j.contains("features")) c.features = frontend::parse_feature_kind(j["features"].get<std::string>());
  c.n_mels = j.value("n_mels", c.n_mels);
  c.sample_rate = j.value("sample_rate", c.sample_rate);
  c.window_ms = j.value("window_ms", c.window_ms);
  c.hop_ms = j.value("hop_ms", c.hop_ms);
  c.channels = j.value("channels", c.channels);
  c.d_model = j.value("d_model", c.d_model);
  c.heads = j.value("heads", c.heads);
  c.context = j.value("context", c.context);
  c.encoder_layers = j.value("encoder_layers", c.encoder_layers);
  c.encoder_ff_dim = j.value("encoder_ff_dim", c.encoder_ff_dim);
  c.conv_kernel = j.value("conv_kernel", c.conv_kernel);
  c.decoder_ff_dim = j.value("decoder_ff_dim", c.decoder_ff_dim);
  c.asr_decoder_layers = j.value("asr_decoder_layers", c.asr_decoder_layers);
  c.speaker_decoder_layers = j.value("speaker_decoder_layers", c.speaker_decoder_layers);
  c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
  c.profile_pool = j.value("profile_pool", c.profile_pool);
  c.seed = j.value("seed", c.seed);
  return c;
}

Example make_example(const std::string& id, const frontend::MultichannelWave& wave,
                     const ModelConfig& cfg, speaker::SpeakerProfileMatrix profiles,
                     sot::SotTranscript reference) {
  wave.validate();
  if (wave.channels() < cfg.channels) {
    throw std::invalid_argument(id + ": recording has " + std::to_string(wave.channels()) +
                                " channels, model expects " + std::to_string(cfg.channels));
  }
  if (std::abs(wave.sample_rate - cfg.sample_rate) > 1e-6) {
    throw std::invalid_argument(id + ": sample rate does not match the model");
  }
  frontend::MultichannelWave used;
  used.sample_rate = wave.sample_rate;
  used.samples = Tensor({cfg.channels, wave.length()},
                        std::vector<double>(wave.samples.data().begin(),
                                            wave.samples.data().begin() +
                                                static_cast<long>(cfg.channels * wave.length())));
  const auto spec = frontend::stft(used, cfg.window_ms, cfg.hop_ms);
  const auto mel = frontend::log_mel(spec, cfg.n_mels);
  Example ex;
  ex.id = id;
  ex.features = cfg.features == frontend::FeatureKind::kMel
                    ? mel.values
                    : frontend::mag_phase_features(spec).values;
  ex.speaker_mel = speaker::average_channels(mel.values);
  ex.profiles = std::move(profiles);
  ex.reference = std::move(reference);
  return ex;
}

SaAsrModel::SaAsrModel(const ModelConfig& cfg, asr::Vocabulary vocab)
    : cfg_(cfg), vocab_(std::move(vocab)) {
  cfg_.validate();
  std::mt19937_64 rng(cfg_.seed);
  frontend_ = cfg_.features == frontend::FeatureKind::kMel
                  ? frontend::ConvFrontend::create_mel(params_, "frontend", cfg_.n_mels, rng)
                  : frontend::ConvFrontend::create_magphase(params_, "frontend",
                                                            cfg_.stft_bins(), rng);
  projection_ = nn::Linear::create(params_, "projection", frontend_.output_dim(),
                                   cfg_.d_model, rng);
  encoder::MfccaConfig ec;
  ec.d_model = cfg_.d_model;
  ec.heads = cfg_.heads;
  ec.context = cfg_.context;
  ec.num_layers = cfg_.encoder_layers;
  ec.ff_dim = cfg_.encoder_ff_dim;
  ec.conv_kernel = cfg_.conv_kernel;
  encoder_ = encoder::MfccaEncoder::create(params_, "encoder", ec, cfg_.channels, rng);
  speaker_encoder_ =
      speaker::SpeakerEncoderStub::create(params_, "speaker_encoder", cfg_.n_mels, cfg_.d_model, rng);
  speaker::SpeakerDecoderConfig sc;
  sc.d_model = cfg_.d_model;
  sc.heads = cfg_.heads;
  sc.ff_dim = cfg_.decoder_ff_dim;
  sc.num_layers = cfg_.speaker_decoder_layers;
  sc.vocab_size = vocab_.size();
  sc.embedding_dim = cfg_.embedding_dim;
  speaker_decoder_ = speaker::SpeakerDecoder::create(params_, "speaker_decoder", sc, rng);
  asr::AsrDecoderConfig ac;
  ac.d_model = cfg_.d_model;
  ac.heads = cfg_.heads;
  ac.ff_dim = cfg_.decoder_ff_dim;
  ac.num_layers = cfg_.asr_decoder_layers;
  ac.vocab_size = vocab_.size();
  ac.embedding_dim = cfg_.embedding_dim;
  asr_decoder_ = asr::AsrDecoder::create(params_, "asr_decoder", ac, rng);
}

Var SaAsrModel::encode(const Var& features) const {
  const Var a = frontend_.forward(features);  // [C, T, A]
  return encoder_.encode(projection_(a)).fused;
}

Var SaAsrModel::speaker_embeddings(const Var& speaker_mel) const {
  return speaker_encoder_.forward(speaker_mel);
}

ForwardOutput SaAsrModel::forward(const Var& features, const Var& speaker_mel,
                                  const std::vector<int>& input_tokens,
                                  const speaker::SpeakerProfileMatrix& profiles) const {
  if (profiles.embedding_dim() != cfg_.embedding_dim) {
    throw std::invalid_argument("profiles have " + std::to_string(profiles.embedding_dim()) +
                                " dims, model expects " + std::to_string(cfg_.embedding_dim));
  }
  ForwardOutput out;
  out.h_asr = encode(features);
  out.h_spk = speaker_embeddings(speaker_mel);
  const Var q = speaker_decoder_.forward(input_tokens, out.h_asr, out.h_spk);
  out.speaker_logits = speaker::speaker_logits(q, profiles);
  const Var weighted = speaker::weighted_profiles(ag::softmax(out.speaker_logits), profiles);
  out.token_logits = asr_decoder_.forward(input_tokens, out.h_asr, weighted);
  return out;
}

asr::JointLoss SaAsrModel::loss(const Example& ex, double speaker_weight) const {
  const asr::LossTargets targets = asr::make_targets(ex.reference, vocab_, ex.profiles);
  std::vector<int> input{vocab_.sos()};
  input.insert(input.end(), targets.tokens.begin(), targets.tokens.end() - 1);
  const ForwardOutput f = forward(ag::constant(ex.features), ag::constant(ex.speaker_mel),
                                  input, ex.profiles);
  return asr::joint_loss(f.token_logits, f.speaker_logits, targets, speaker_weight);
}

sot::SotTranscript SaAsrModel::decode(const Example& ex, std::size_t max_len) const {
  const Tensor h_asr = encode(ag::constant(ex.features)).value();
  const Tensor h_spk = speaker_embeddings(ag::constant(ex.speaker_mel)).value();
  if (max_len == 0) max_len = 2 * h_asr.dim(0) + 8;
  return asr::greedy_decode_sot(speaker_decoder_, asr_decoder_, vocab_, h_asr, h_spk,
                                ex.profiles, max_len);
}

void SaAsrModel::save(const std::string& path, const nlohmann::json& extra_meta) const {
  io::TensorArchive a;
  for (const auto& [name, var] : params_.entries()) a.tensors.emplace(name, var.value());
  a.meta = {{"kind", "mcsa-checkpoint"}, {"model", cfg_.to_json()}, {"vocab", vocab_.to_json()}};
  if (!extra_meta.is_null()) a.meta["extra"] = extra_meta;
  io::write_archive(path, a);
}

SaAsrModel SaAsrModel::load(const std::string& path) {
  const io::TensorArchive a = io::read_archive(path);
  if (a.meta.value("kind", "") != "mcsa-checkpoint") {
    throw io::DataError(path + ": not a model checkpoint");
  }
  SaAsrModel m(ModelConfig::from_json(a.meta.at("model")),
               asr::Vocabulary::from_json(a.meta.at("vocab")));
  for (auto& [name, var] : m.params_.entries()) {
    auto it = a.tensors.find(name);
    if (it == a.tensors.end()) throw io::DataError(path + ": missing parameter " + name);
    if (it->second.shape() != var.shape()) {
      throw io::DataError(path + ": parameter " + name + " has shape " +
                          shape_str(it->second.shape()) + ", expected " + shape_str(var.shape()));
    }
    Var v = var;
    v.mutable_value() = it->second;
  }
  if (a.tensors.size() != m.params_.entries().size()) {
    throw io::DataError(path + ": checkpoint has parameters the model does not");
  }
  return m;
}

void TrainConfig::validate() const {
  if (optimizer != "adam" && optimizer != "sgd") {
    throw std::invalid_argument("optimizer must be adam or sgd");
  }
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (!(speaker_weight >= 0.0)) throw std::invalid_argument("speaker_weight must be >= 0");
  if (grad_clip < 0.0) throw std::invalid_argument("grad_clip must be >= 0");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"steps", steps},        {"optimizer", optimizer}, {"learning_rate", learning_rate},
          {"beta1", beta1},        {"beta2", beta2},         {"epsilon", epsilon},
          {"grad_clip", grad_clip}, {"speaker_weight", speaker_weight}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.steps = j.value("steps", c.steps);
  c.optimizer = j.value("optimizer", c.optimizer);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.grad_clip = j.value("grad_clip", c.grad_clip);
  c.speaker_weight = j.value("speaker_weight", c.speaker_weight);
  return c;
}

Trainer::Trainer(SaAsrModel& model, TrainConfig cfg) : model_(model), cfg_(std::move(cfg)) {
  cfg_.validate();
  for (const auto& [name, var] : model_.parameters().entries()) {
    m_.emplace_back(var.shape(), 0.0);
    v_.emplace_back(var.shape(), 0.0);
  }
}

StepLog Trainer::step(const std::vector<Example>& batch) {
  if (batch.empty()) throw std::invalid_argument("train: empty batch");
  auto& params = model_.parameters();
  params.zero_grad();
  StepLog log;
  log.step = t_;
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (const auto& ex : batch) {
    const asr::JointLoss l = model_.loss(ex, cfg_.speaker_weight);
    ag::backward(ag::scale(l.total, inv));
    log.total += l.report.total * inv;
    log.asr_loss += l.report.asr_loss * inv;
    log.speaker_loss += l.report.speaker_loss * inv;
  }

  std::vector<Tensor> grads;
  double norm2 = 0.0;
  for (const auto& [name, var] : params.entries()) {
    grads.push_back(var.grad());
    for (double g : grads.back().data()) norm2 += g * g;
  }
  const double norm = std::sqrt(norm2);
  const double clip = cfg_.grad_clip > 0.0 && norm > cfg_.grad_clip ? cfg_.grad_clip / norm : 1.0;

  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  auto& entries = params.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Var p = entries[i].second;
    auto w = p.mutable_value().data();
    const auto g = grads[i].data();
    if (cfg_.optimizer == "sgd") {
      for (std::size_t j = 0; j < w.size(); ++j) w[j] -= cfg_.learning_rate * clip * g[j];
      continue;
    }
    auto m = m_[i].data();
    auto v = v_[i].data();
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double gj = clip * g[j];
      m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * gj;
      v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * gj * gj;
      w[j] -= cfg_.learning_rate * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + cfg_.epsilon);
    }
  }
  params.zero_grad();
  return log;
}

std::vector<StepLog> Trainer::run(const std::vector<Example>& batch,
                                  const std::function<bool(const StepLog&)>& on_step) {
  std::vector<StepLog> out;
  for (std::size_t s = 0; s < cfg_.steps; ++s) {
    out.push_back(step(batch));
    if (on_step && !on_step(out.back())) break;
  }
  return out;
}

std::string loss_csv(const std::vector<StepLog>& log) {
  std::ostringstream os;
  os << "step,total,asr_loss,speaker_loss\n";
  char buf[128];
  for (const auto& l : log) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", l.step, l.total, l.asr_loss,
                  l.speaker_loss);
    os << buf;
  }
  return os.str();
}

}  // namespace mcsa::model
