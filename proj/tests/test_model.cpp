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

#include <filesystem>

#include "doctest.h"
#include "mcsa/io.hpp"
#include "mcsa/model.hpp"
#include "test_util.hpp"

namespace mcsa::model {
namespace {

using testing::random_tensor;

ModelConfig tiny_config(frontend::FeatureKind kind = frontend::FeatureKind::kMel) {
  ModelConfig c = ModelConfig::toy();
  c.features = kind;
  c.n_mels = 8;
  c.window_ms = 4.0;  // 64-point STFT, G = 33
  c.hop_ms = 2.0;
  c.d_model = 8;
  c.heads = 2;
  c.context = 1;
  c.encoder_layers = 1;
  c.encoder_ff_dim = 8;
  c.conv_kernel = 3;
  c.decoder_ff_dim = 8;
  c.embedding_dim = 4;
  c.profile_pool = 3;
  return c;
}

asr::Vocabulary tiny_vocab() { return asr::Vocabulary::with_words({"alpha", "bravo", "charlie"}); }

speaker::SpeakerProfileMatrix tiny_profiles(std::size_t e, std::mt19937_64& rng) {
  std::vector<speaker::Enrollment> enr;
  for (const char* id : {"ann", "bob", "cat"}) enr.push_back({id, {random_tensor({e}, rng).vec()}});
  return speaker::build_profile_matrix(enr);
}

Example tiny_example(const ModelConfig& cfg, std::uint64_t seed, std::size_t samples = 400) {
  std::mt19937_64 rng(seed);
  frontend::MultichannelWave wave{random_tensor({3, samples}, rng, -0.5, 0.5), cfg.sample_rate};
  sot::SotTranscript ref{{"alpha", "<sc>", "bravo", "charlie"}, {"bob", "bob", "ann", "ann"}, {}};
  return make_example("ex" + std::to_string(seed), wave, cfg, tiny_profiles(cfg.embedding_dim, rng),
                      ref);
}

TEST_CASE("examples keep the configured microphones") {
  const auto cfg = tiny_config();
  const auto ex = tiny_example(cfg, 1);
  CHECK(ex.features.dim(0) == 2);
  CHECK(ex.features.dim(2) == 8);
  CHECK(ex.speaker_mel.dim(0) == 1);
  auto cfg4 = cfg;
  cfg4.channels = 4;
  CHECK_THROWS_AS(tiny_example(cfg4, 1), std::invalid_argument);
  const auto mp = tiny_example(tiny_config(frontend::FeatureKind::kMagPhase), 1);
  CHECK(mp.features.shape() == Shape{2, ex.features.dim(1), 3, 33});
}

TEST_CASE("forward shapes") {
  const auto cfg = tiny_config();
  SaAsrModel model(cfg, tiny_vocab());
  const auto ex = tiny_example(cfg, 2);
  const auto out = model.forward(ag::constant(ex.features), ag::constant(ex.speaker_mel),
                                 {0, 4, 2, 5}, ex.profiles);
  const std::size_t t = frontend::subsampled_frames(ex.features.dim(1));
  CHECK(out.token_logits.shape() == Shape{4, 7});
  CHECK(out.speaker_logits.shape() == Shape{4, 3});
  CHECK(out.h_asr.shape() == Shape{t, 8});
  CHECK(out.h_spk.shape() == Shape{t, 8});
}

TEST_CASE("end-to-end gradients of the joint loss") {
  for (auto kind : {frontend::FeatureKind::kMel, frontend::FeatureKind::kMagPhase}) {
    auto cfg = tiny_config(kind);
    SaAsrModel model(cfg, tiny_vocab());
    const auto ex = tiny_example(cfg, 3, 240);
    auto loss = [&] { return model.loss(ex, 0.1).total; };
    CHECK(testing::parameter_gradient_check(model.parameters(), loss, 1e-6, 6, 5) < 1e-4);
  }
}

TEST_CASE("checkpoint round trip") {
  const auto cfg = tiny_config();
  SaAsrModel model(cfg, tiny_vocab());
  const auto ex = tiny_example(cfg, 4);
  const auto path = std::filesystem::temp_directory_path() / "mcsa_model_ckpt.bin";
  model.save(path.string(), {{"note", "unit"}});
  const auto back = SaAsrModel::load(path.string());
  CHECK(back.config().to_json() == cfg.to_json());
  CHECK(back.vocabulary().size() == 7);
  CHECK(back.loss(ex, 0.1).report.total == model.loss(ex, 0.1).report.total);
  CHECK(back.decode(ex, 6).tokens == model.decode(ex, 6).tokens);
  const auto archive = io::read_archive(path.string());
  CHECK(archive.meta["kind"] == "mcsa-checkpoint");
  CHECK(archive.tensors.size() == model.parameters().entries().size());

  auto broken = archive;
  broken.tensors.erase(broken.tensors.begin());
  io::write_archive(path.string(), broken);
  CHECK_THROWS(SaAsrModel::load(path.string()));
  std::filesystem::remove(path);
}

TEST_CASE("initialisation and training are deterministic") {
  const auto cfg = tiny_config();
  const std::vector<Example> batch = {tiny_example(cfg, 5), tiny_example(cfg, 6)};
  TrainConfig tc;
  tc.learning_rate = 3e-3;
  std::vector<std::vector<StepLog>> logs;
  for (int run = 0; run < 2; ++run) {
    SaAsrModel model(cfg, tiny_vocab());
    Trainer trainer(model, tc);
    std::vector<StepLog> log;
    for (int s = 0; s < 3; ++s) log.push_back(trainer.step(batch));
    logs.push_back(log);
  }
  for (std::size_t s = 0; s < 3; ++s) CHECK(logs[0][s].total == logs[1][s].total);
}

TEST_CASE("training lowers the loss") {
  const auto cfg = tiny_config();
  const std::vector<Example> batch = {tiny_example(cfg, 7), tiny_example(cfg, 8)};
  SaAsrModel model(cfg, tiny_vocab());
  TrainConfig tc;
  tc.steps = 60;
  tc.learning_rate = 1e-2;
  Trainer trainer(model, tc);
  const auto log = trainer.run(batch);
  REQUIRE(log.size() == 60);
  CHECK(log.back().total < 0.5 * log.front().total);
  CHECK(log.front().total ==
        doctest::Approx(log.front().asr_loss + 0.1 * log.front().speaker_loss));
  const auto csv = loss_csv(log);
  CHECK(csv.rfind("step,total,asr_loss,speaker_loss\n", 0) == 0);

  // The callback can stop training early.
  SaAsrModel other(cfg, tiny_vocab());
  Trainer early(other, tc);
  CHECK(early.run(batch, [](const StepLog& s) { return s.step < 4; }).size() == 5);
}

TEST_CASE("configuration round trips and validation") {
  const auto cfg = ModelConfig::full();
  CHECK(cfg.d_model == 256);
  CHECK(cfg.encoder_layers == 12);
  CHECK(cfg.stft_bins() == 201);
  CHECK(ModelConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());
  TrainConfig tc;
  CHECK(tc.speaker_weight == 0.1);
  CHECK(TrainConfig::from_json(tc.to_json()).to_json() == tc.to_json());
  auto bad = cfg;
  bad.channels = 5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  tc.optimizer = "lbfgs";
  CHECK_THROWS_AS(tc.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace mcsa::model
