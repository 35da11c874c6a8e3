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

// Acceptance gate: runs the ten release criteria and prints one PASS/FAIL
// line per criterion. Exit status is 0 only when every selected criterion
// passes within its time budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcsa/ami_segmenter.hpp"
#include "mcsa/metrics.hpp"
#include "mcsa/mfcca_encoder.hpp"
#include "mcsa/mixture_simulator.hpp"
#include "mcsa/model.hpp"
#include "mcsa/signal_frontend.hpp"
#include "meetings.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace mcsa {
namespace {

using testing::random_tensor;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // 0: no time limit
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

// 1 ------------------------------------------------------------------------
Outcome frontend_dimensions() {
  std::mt19937_64 rng(1);
  nn::ParameterSet params;
  const auto mel_net = frontend::ConvFrontend::create_mel(params, "mel", 80, rng);
  const auto mp_net = frontend::ConvFrontend::create_magphase(params, "mp", 201, rng);
  const frontend::MultichannelWave wave{random_tensor({4, 4000}, rng), 16000.0};
  const auto spec = frontend::stft(wave);
  const auto mel = frontend::conv_frontend_mel(frontend::log_mel(spec, 80), mel_net);
  const auto mp = frontend::conv_frontend_magphase(frontend::mag_phase_features(spec), mp_net);
  const std::size_t a_mel = mel.values.dim(2), a_mp = mp.values.dim(2);
  const std::size_t t = frontend::subsampled_frames(spec.frames());
  const bool ok = spec.bins() == 201 && a_mel == 640 && a_mp == 832 &&
                  frontend::frontend_feature_dim(frontend::FeatureKind::kMel, 80) == 640 &&
                  frontend::frontend_feature_dim(frontend::FeatureKind::kMagPhase, 201) == 832 &&
                  mel.values.dim(0) == 4 && mel.values.dim(1) == t && mp.values.dim(1) == t;
  return {ok, fmt("G=%zu, A(mel, M=80)=%zu, A(mag+phase)=%zu, T=%zu", spec.bins(), a_mel, a_mp, t)};
}

// 2 ------------------------------------------------------------------------
Outcome kv_shape_law() {
  std::mt19937_64 rng(2);
  int checked = 0, wrong = 0;
  for (std::size_t f = 0; f <= 2; ++f)
    for (std::size_t c = 1; c <= 4; ++c) {
      encoder::MfccaConfig cfg;
      cfg.d_model = 8;
      cfg.heads = 2;
      cfg.context = f;
      nn::ParameterSet params;
      const auto m = encoder::MfccaAttention::create(params, "m", cfg, rng);
      const Tensor x = random_tensor({5, c, 8}, rng);
      const auto kv = encoder::context_expand(x, f).values;
      const auto w = m.forward(ag::constant(x)).weights;
      const std::size_t want = (2 * f + 1) * c;
      ++checked;
      if (kv.dim(1) != want || w.dim(2) != want || w.dim(1) != c) ++wrong;
    }
  return {wrong == 0, fmt("%d (F, C) pairs, %d mismatches", checked, wrong)};
}

// 3 ------------------------------------------------------------------------
Outcome gradient_suite() {
  double worst = 0.0;
  std::string detail;
  for (auto kind : {frontend::FeatureKind::kMel, frontend::FeatureKind::kMagPhase}) {
    model::ModelConfig cfg = model::ModelConfig::toy();
    cfg.features = kind;
    cfg.n_mels = 8;
    cfg.window_ms = 4.0;
    cfg.hop_ms = 2.0;
    cfg.channels = 2;
    cfg.d_model = 16;
    cfg.heads = 2;
    cfg.context = 1;
    cfg.encoder_layers = 2;
    cfg.encoder_ff_dim = 16;
    cfg.conv_kernel = 3;
    cfg.decoder_ff_dim = 16;
    cfg.embedding_dim = 8;
    cfg.profile_pool = 3;
    model::SaAsrModel net(cfg, asr::Vocabulary::with_words({"alpha", "bravo", "charlie"}));
    std::mt19937_64 rng(3);
    const frontend::MultichannelWave wave{random_tensor({2, 640}, rng, -0.5, 0.5), 16000.0};
    std::vector<speaker::Enrollment> enr;
    for (const char* id : {"ann", "bob", "cat"}) enr.push_back({id, {random_tensor({8}, rng).vec()}});
    sot::SotTranscript ref{{"alpha", "<sc>", "bravo", "charlie"}, {"bob", "bob", "ann", "ann"}, {}};
    const auto ex = model::make_example("g", wave, cfg, speaker::build_profile_matrix(enr), ref);
    const std::size_t t = frontend::subsampled_frames(ex.features.dim(1));
    auto loss = [&] { return net.loss(ex, asr::kDefaultSpeakerWeight).total; };
    constexpr std::size_t kProbes = 8;
    const double err = testing::parameter_gradient_check(net.parameters(), loss, 1e-6, kProbes, 17);
    worst = std::max(worst, err);
    detail += fmt("%s: T=%zu C=2 D=16, %zu tensors x <=%zu coords, rel err %.2e; ",
                  frontend::feature_kind_name(kind).c_str(), t, net.parameters().entries().size(),
                  kProbes, err);
  }
  return {worst < 1e-4, detail + fmt("worst %.2e (< 1e-4)", worst)};
}

// 4 ------------------------------------------------------------------------
Outcome overfit() {
  sim::SimulationConfig sc;
  sc.n_mics = 2;
  sc.min_speakers = 2;
  sc.max_speakers = 2;
  sc.min_words = 2;
  sc.max_words = 3;
  const auto voices = sim::voice_pool(sc);
  const model::ModelConfig mc = model::ModelConfig::toy();
  const speaker::EnrollmentEmbedder embedder(mc.n_mels, mc.embedding_dim, 11);
  const auto vocab = asr::Vocabulary::with_words(sim::toy_lexicon());
  std::vector<model::Example> batch;
  for (int i = 0; i < 4; ++i) {
    const auto mix = sim::simulate_mixture(sc, "overfit" + std::to_string(i), 100 + i);
    std::vector<speaker::Enrollment> enr;
    for (const auto& id : mix.manifest.profile_speakers)
      for (const auto& v : voices)
        if (v.speaker_id == id) {
          std::vector<std::vector<double>> e;
          for (const auto& w : sim::enrollment_waves(sc, v, 7)) e.push_back(embedder.embed(w));
          enr.push_back({id, e});
        }
    batch.push_back(model::make_example(mix.manifest.id, mix.wave, mc,
                                        speaker::build_profile_matrix(enr), mix.transcript));
  }
  model::SaAsrModel net(mc, vocab);
  model::TrainConfig tc;
  tc.steps = 2000;
  tc.learning_rate = 2e-3;
  model::Trainer trainer(net, tc);
  double wer = 100.0, tser = 100.0;
  std::size_t reached = 0;
  double last_loss = 0.0;
  trainer.run(batch, [&](const model::StepLog& s) {
    last_loss = s.total;
    if ((s.step + 1) % 25 != 0) return true;
    std::vector<sot::SotTranscript> refs, hyps;
    for (const auto& ex : batch) {
      refs.push_back(ex.reference);
      hyps.push_back(net.decode(ex));
    }
    const auto report = metrics::score_corpus(refs, hyps);
    wer = report.overall.wer();
    tser = report.overall.t_ser();
    reached = s.step + 1;
    return !(wer <= 5.0 && tser <= 5.0);
  });
  return {wer <= 5.0 && tser <= 5.0,
          fmt("vocab %zu, %zu params, after %zu steps: WER %.1f%%, T-SER %.1f%%, loss %.4f",
              vocab.size(), net.parameters().scalar_count(), reached, wer, tser, last_loss)};
}

// 5 ------------------------------------------------------------------------
Outcome oracle_equivalence() {
  std::mt19937_64 rng(5);
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  constexpr int kInstances = 100;
  double mfcca = 0.0, fusion = 0.0, mixing = 0.0;
  std::size_t align_bad = 0;
  for (int i = 0; i < kInstances; ++i) {
    encoder::MfccaConfig cfg;
    cfg.heads = pick(1, 2);
    cfg.d_model = 4 * cfg.heads;
    cfg.context = pick(0, 2);
    nn::ParameterSet params;
    const auto m = encoder::MfccaAttention::create(params, "m", cfg, rng);
    const Tensor x = random_tensor({pick(1, 6), pick(1, 4), cfg.d_model}, rng);
    mfcca = std::max(mfcca, max_abs_diff(m.forward(ag::constant(x)).output.value(),
                                         oracle::mfcca(x, m)));

    const std::size_t c = pick(1, 4);
    auto f = encoder::ChannelConvFusion::create(params, "f", c, rng);
    for (auto& s : f.stages) s.bias.mutable_value() = random_tensor(s.bias.shape(), rng);
    const Tensor y = random_tensor({c, pick(1, 7), pick(1, 7)}, rng);
    fusion = std::max(fusion, max_abs_diff(f(ag::constant(y)).value(), oracle::channel_fusion(y, f)));

    const std::size_t mics = pick(1, 4), n_src = pick(1, 3);
    std::vector<sim::DelayedSource> srcs;
    std::size_t offset = 0;
    for (std::size_t k = 0; k < n_src; ++k) {
      sim::DelayedSource s;
      s.dry = random_tensor({pick(1, 120)}, rng).vec();
      s.offset = offset;
      offset += pick(1, 80);
      for (std::size_t mic = 0; mic < mics; ++mic) s.rirs.push_back(random_tensor({pick(1, 90)}, rng).vec());
      srcs.push_back(std::move(s));
    }
    const auto mix = sim::mix_with_delays(srcs, 16000.0);
    Tensor want({mics, mix.length()}, 0.0);
    for (const auto& s : srcs)
      for (std::size_t mic = 0; mic < mics; ++mic) {
        const auto conv = oracle::convolve(s.dry, s.rirs[mic]);
        for (std::size_t n = 0; n < conv.size(); ++n) want.at({mic, s.offset + n}) += conv[n];
      }
    mixing = std::max(mixing, max_abs_diff(mix.samples, want));

    std::vector<std::string> ref(pick(1, 10)), hyp(pick(0, 10));
    for (auto& w : ref) w = std::string(1, static_cast<char>('a' + pick(0, 3)));
    for (auto& w : hyp) w = std::string(1, static_cast<char>('a' + pick(0, 3)));
    const std::size_t dist = oracle::levenshtein(ref, hyp);
    const double want_wer = 100.0 * static_cast<double>(dist) / static_cast<double>(ref.size());
    if (metrics::align(ref, hyp).errors() != dist ||
        std::abs(metrics::wer(ref, hyp) - want_wer) > 1e-10) {
      ++align_bad;
    }
  }
  const bool ok = mfcca < 1e-10 && fusion < 1e-10 && mixing < 1e-10 && align_bad == 0;
  return {ok, fmt("%d instances each; max |diff| MFCCA %.1e, fusion %.1e, mixing %.1e; "
                  "alignment mismatches %zu",
                  kInstances, mfcca, fusion, mixing, align_bad)};
}

// 6 ------------------------------------------------------------------------
Outcome acoustics() {
  std::string detail;
  bool ok = true;
  std::size_t delay_checks = 0, delay_bad = 0;
  for (double target : {0.4, 0.7, 1.0}) {
    sim::SimulationConfig sc;
    sc.fixed_rt60_s = target;
    sc.min_words = 1;
    sc.max_words = 1;
    double lo = 1e9, hi = 0.0;
    std::size_t rirs = 0;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto mix = sim::simulate_mixture(sc, "rt", 600 + seed + static_cast<std::uint64_t>(target * 100));
      const auto& m = mix.manifest;
      const auto all = sim::manifest_rirs(m);
      for (std::size_t k = 0; k < all.size(); ++k)
        for (std::size_t mic = 0; mic < all[k].size(); ++mic) {
          const auto& h = all[k][mic];
          const double rt = sim::estimate_rt60(h, m.sample_rate);
          lo = std::min(lo, rt);
          hi = std::max(hi, rt);
          ++rirs;
          // Direct path: the strongest tap before the first reflection.
          const double d = sim::distance(m.sources[k].position, m.array.mic_positions[mic]);
          const double delay = d / sim::kSpeedOfSound * m.sample_rate;
          const std::size_t end = std::min(h.size(), static_cast<std::size_t>(delay) + 3);
          std::size_t peak = 0;
          for (std::size_t n = 0; n < end; ++n)
            if (std::abs(h[n]) > std::abs(h[peak])) peak = n;
          sim::RirOptions direct;
          direct.max_order = 0;
          const auto h0 = sim::image_source_rir(m.room, m.sources[k].position, m.array.mic_positions[mic], direct);
          std::size_t peak0 = 0;
          for (std::size_t n = 0; n < h0.size(); ++n)
            if (std::abs(h0[n]) > std::abs(h0[peak0])) peak0 = n;
          delay_checks += 2;
          delay_bad += std::abs(static_cast<double>(peak) - delay) > 1.0;
          delay_bad += std::abs(static_cast<double>(peak0) - delay) > 1.0;
        }
    }
    const bool in_band = lo >= 0.8 * target && hi <= 1.2 * target;
    ok = ok && in_band;
    detail += fmt("target %.1f s: %zu RIRs, RT60 %.3f-%.3f s; ", target, rirs, lo, hi);
  }
  ok = ok && delay_bad == 0;
  return {ok, detail + fmt("direct-path delay off by > 1 sample in %zu of %zu", delay_bad, delay_checks)};
}

// 7 ------------------------------------------------------------------------
Outcome metric_goldens(const std::string& data_dir) {
  std::ifstream in(data_dir + "/metrics_golden.json");
  if (!in) return {false, "cannot open " + data_dir + "/metrics_golden.json"};
  const auto golden = nlohmann::json::parse(in);
  std::vector<sot::SotTranscript> refs, hyps;
  std::size_t bad = 0;
  auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
  for (const auto& c : golden.at("cases")) {
    sot::SotTranscript ref{c["ref"].get<std::vector<std::string>>(),
                           c["ref_spk"].get<std::vector<std::string>>(), {}};
    sot::SotTranscript hyp{c["hyp"].get<std::vector<std::string>>(),
                           c["hyp_spk"].get<std::vector<std::string>>(), {}};
    bad += !same(metrics::wer(ref.tokens, hyp.tokens), c["wer"].get<double>());
    bad += !same(metrics::t_ser(ref, hyp), c["t_ser"].get<double>());
    bad += !same(metrics::t_ser(ref, hyp, {false}), c["t_ser_no_insdel"].get<double>());
    bad += !same(metrics::s_ser(ref, hyp), c["s_ser"].get<double>());
    bad += sot::speaker_count(ref.tokens) != c["ref_count"].get<std::size_t>();
    bad += sot::speaker_count(hyp.tokens) != c["hyp_count"].get<std::size_t>();
    refs.push_back(ref);
    hyps.push_back(hyp);
  }
  const auto report = metrics::score_corpus(refs, hyps);
  const auto& corpus = golden.at("corpus");
  bad += !same(report.overall.wer(), corpus["wer"].get<double>());
  bad += !same(report.overall.t_ser(), corpus["t_ser"].get<double>());
  bad += !same(report.overall.s_ser(), corpus["s_ser"].get<double>());
  const auto& counting = golden.at("counting");
  for (std::size_t r = 0; r < metrics::kCountRows; ++r) {
    for (std::size_t c = 0; c < metrics::kCountColumns; ++c)
      bad += report.counting.counts[r][c] != counting["counts"][r][c].get<std::size_t>();
    bad += !same(report.counting.accuracy[r], counting["accuracy"][r].get<double>());
  }
  // Speaker count is the separator count plus one on arbitrary sequences.
  std::mt19937_64 rng(7);
  std::size_t count_bad = 0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<std::string> toks(1 + rng() % 12);
    std::size_t sc = 0;
    for (auto& t : toks) {
      t = rng() % 3 == 0 ? sot::kSpeakerChange : "w";
      sc += t == sot::kSpeakerChange;
    }
    count_bad += sot::speaker_count(toks) != sc + 1;
  }
  return {bad == 0 && count_bad == 0,
          fmt("%zu cases, %zu mismatched values; speaker-count rule violated %zu / 10000",
              golden["cases"].size(), bad, count_bad)};
}

// 8 ------------------------------------------------------------------------
Outcome segmenter_invariants() {
  std::mt19937_64 rng(8);
  std::size_t groups_total = 0, boundary_bad = 0, uncovered = 0, stats_bad = 0, words_total = 0;
  auto inside = [](double t, double lo, double hi) { return lo < t && t < hi; };
  for (int meeting = 0; meeting < 1000; ++meeting) {
    const auto words = testing::random_meeting(rng, 1 + meeting % 4, 60.0);
    words_total += words.size();
    const auto overlaps = segmenter::find_overlap_regions(words);
    const auto groups = segmenter::segment_meeting(words, {});
    groups_total += groups.size();
    std::set<std::pair<std::string, std::string>> covered;
    for (const auto& g : groups) {
      for (double b : {g.start_s, g.end_s}) {
        for (const auto& r : overlaps) boundary_bad += inside(b, r.start_s, r.end_s);
        for (const auto& w : words) boundary_bad += inside(b, w.start_s, w.end_s);
      }
      for (const auto& w : g.words) covered.insert({w.speaker_id, w.word});
    }
    uncovered += words.size() - covered.size();
    const auto stats = segmenter::dataset_stats(groups);
    std::size_t segs = 0, nwords = 0;
    double dur = 0.0;
    for (const auto& [n, b] : stats.by_speakers) {
      segs += b.segments;
      nwords += b.words;
      dur += b.total_duration_s;
    }
    stats_bad += segs != stats.total.segments || nwords != stats.total.words ||
                 std::abs(dur - stats.total.total_duration_s) > 1e-9 ||
                 stats.total.segments != groups.size();
  }
  return {boundary_bad == 0 && uncovered == 0 && stats_bad == 0,
          fmt("1000 meetings, %zu words, %zu groups; boundaries inside overlap/word %zu, "
              "uncovered words %zu, inconsistent stats tables %zu",
              words_total, groups_total, boundary_bad, uncovered, stats_bad)};
}

// 9 ------------------------------------------------------------------------
Outcome simulation_constraints() {
  std::mt19937_64 rng(9);
  std::size_t bad = 0;
  auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  for (int i = 0; i < 10000; ++i) {
    sim::SamplingConfig cfg;
    cfg.n_mics = 2 + static_cast<std::size_t>(i % 3);
    const auto s = sim::sample_room(rng, 1 + static_cast<std::size_t>(i % 3), cfg);
    const auto& d = s.room.dims;
    bool ok = in(d[0], 3.0, 8.0) && in(d[1], 3.0, 8.0) && in(d[2], 2.4, 3.0) &&
              in(s.room.rt60_s, 0.4, 1.0) && s.room.absorption > 0.0 && s.room.absorption <= 1.0;
    double aperture = 0.0;
    for (const auto& a : s.array.mic_positions)
      for (const auto& b : s.array.mic_positions) aperture = std::max(aperture, sim::distance(a, b));
    ok = ok && std::abs(aperture - 0.10) < 1e-9 && s.array.n_mics() == cfg.n_mics;
    const auto c = s.array.center();
    ok = ok && std::hypot(c[0] - d[0] / 2, c[1] - d[1] / 2) <= 0.5 + 1e-12;
    for (const auto& m : s.array.mic_positions) ok = ok && in(m[2], 0.6, 0.8);
    for (const auto& src : s.sources)
      for (int a = 0; a < 3; ++a)
        ok = ok && src.position[a] >= 0.5 && d[a] - src.position[a] >= 0.5;
    bad += !ok;
  }
  return {bad == 0, fmt("10000 geometries, %zu out of range", bad)};
}

// 10 -----------------------------------------------------------------------
Outcome fifo_order() {
  sim::SimulationConfig sc;
  sc.n_mics = 2;
  sc.min_words = 1;
  sc.max_words = 3;
  sc.max_order = 2;
  sc.calibrate_absorption = false;
  std::size_t bad = 0, multi = 0;
  constexpr int kMixtures = 300;
  for (int i = 0; i < kMixtures; ++i) {
    const auto mix = sim::simulate_mixture(sc, "fifo" + std::to_string(i), 1000 + i);
    const auto& m = mix.manifest;
    std::vector<std::pair<std::size_t, std::string>> by_start;
    for (const auto& u : m.utterances) by_start.emplace_back(u.offset_samples, u.speaker_id);
    std::sort(by_start.begin(), by_start.end());
    std::vector<std::string> first_tokens;
    const auto& t = mix.transcript;
    for (std::size_t n = 0; n < t.tokens.size(); ++n)
      if (n == 0 || t.tokens[n - 1] == sot::kSpeakerChange) first_tokens.push_back(t.token_speakers[n]);
    std::vector<std::string> want;
    for (const auto& [o, s] : by_start) want.push_back(s);
    bad += first_tokens != want;
    multi += m.n_speakers() > 1;
  }
  return {bad == 0, fmt("%d mixtures (%zu multi-speaker), %zu order mismatches", kMixtures, multi, bad)};
}

}  // namespace
}  // namespace mcsa

int main(int argc, char** argv) {
  using namespace mcsa;
  CLI::App app{"Runs the acceptance criteria"};
  std::vector<int> only;
  std::string data_dir = MCSA_TEST_DATA_DIR;
  app.add_option("--only", only, "Criterion numbers to run (default: all)")->delimiter(',');
  app.add_option("--data-dir", data_dir, "Directory holding metrics_golden.json");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "frontend dimensions", 1.0, frontend_dimensions},
      {2, "MFCCA key/value shape law", 0.0, kv_shape_law},
      {3, "end-to-end gradient suite", 60.0, gradient_suite},
      {4, "toy overfit", 600.0, overfit},
      {5, "oracle equivalence", 60.0, oracle_equivalence},
      {6, "acoustics", 120.0, acoustics},
      {7, "metric goldens", 0.0, [&] { return metric_goldens(data_dir); }},
      {8, "segmenter invariants", 60.0, segmenter_invariants},
      {9, "simulation constraints", 30.0, simulation_constraints},
      {10, "FIFO serialization", 0.0, fifo_order},
  };
  int failed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_s == 0.0 || secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::string budget = c.budget_s > 0.0 ? fmt(" / %.0f s", c.budget_s) : "";
    std::printf("criterion %2d [%s] %s (%.2f s%s)\n    %s%s\n", c.id, pass ? "PASS" : "FAIL",
                c.name.c_str(), secs, budget.c_str(), o.detail.c_str(),
                in_time ? "" : "\n    exceeded the time budget");
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
