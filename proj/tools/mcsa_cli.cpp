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

// Command-line pipeline: simulate -> featurize -> train -> decode -> score,
// plus meeting segmentation and statistics.
//
// Exit codes: 0 success, 2 invalid configuration or arguments, 3 unreadable
// or malformed input data, 1 anything else.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcsa/ami_segmenter.hpp"
#include "mcsa/io.hpp"
#include "mcsa/metrics.hpp"
#include "mcsa/mixture_simulator.hpp"
#include "mcsa/model.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mcsa::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitData = 3;

constexpr char kFeatureSuffix[] = ".mcsa";

// Options shared by every subcommand.
struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string config_path;
  std::optional<std::size_t> channels;
  std::optional<std::string> features;
};

// Sections of a pipeline config file: "simulation", "model", "train",
// "segmentation". Missing sections and keys keep their defaults.
json load_pipeline_config(const GlobalOptions& g) {
  if (g.config_path.empty()) return json::object();
  if (!fs::exists(g.config_path)) throw io::DataError("config not found: " + g.config_path);
  const json j = io::read_json(g.config_path);
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  return j;
}

json section(const json& cfg, const char* name) {
  return cfg.contains(name) ? cfg.at(name) : json::object();
}

model::ModelConfig resolve_model(const json& cfg, const GlobalOptions& g) {
  json j = model::ModelConfig::toy().to_json();
  j.merge_patch(section(cfg, "model"));
  auto m = model::ModelConfig::from_json(j);
  if (g.channels) m.channels = *g.channels;
  if (g.features) m.features = frontend::parse_feature_kind(*g.features);
  m.validate();
  return m;
}

segmenter::SegmentationConfig resolve_segmentation(const json& cfg) {
  const json j = section(cfg, "segmentation");
  segmenter::SegmentationConfig s;
  s.chunk_s = j.value("chunk_s", s.chunk_s);
  s.hop_s = j.value("hop_s", s.hop_s);
  s.overlap_margin_s = j.value("overlap_margin_s", s.overlap_margin_s);
  s.max_iterations = j.value("max_iterations", s.max_iterations);
  s.validate();
  return s;
}

json segmentation_json(const segmenter::SegmentationConfig& s) {
  return {{"chunk_s", s.chunk_s},
          {"hop_s", s.hop_s},
          {"overlap_margin_s", s.overlap_margin_s},
          {"max_iterations", s.max_iterations}};
}

void make_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) {
    throw std::runtime_error("cannot create directory " + p.string());
  }
}

void require_dir(const fs::path& p) {
  if (!fs::is_directory(p)) throw io::DataError("directory not found: " + p.string());
}

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw io::DataError("file not found: " + p.string());
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!(out << text)) throw std::runtime_error("cannot write " + p.string());
}

std::vector<std::string> read_index(const fs::path& dir) {
  require_file(dir / "index.json");
  return io::read_json((dir / "index.json").string()).at("ids").get<std::vector<std::string>>();
}

// Sorted stems of `*.json` files, skipping the config echo.
std::vector<std::string> transcript_ids(const fs::path& dir) {
  require_dir(dir);
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json" &&
        e.path().filename() != "config.json") {
      ids.push_back(e.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string enrollment_name(const std::string& speaker, std::size_t k) {
  return speaker + "_" + std::to_string(k) + ".wav";
}

// simulate ---------------------------------------------------------------

struct SimulateOptions {
  std::string out;
  std::size_t count = 10;
  std::optional<double> rt60;
  std::optional<int> max_order;
  bool no_calibration = false;
};

int run_simulate(const GlobalOptions& g, const SimulateOptions& o) {
  const json cfg = load_pipeline_config(g);
  json sim_json = sim::SimulationConfig{}.to_json();
  sim_json.merge_patch(section(cfg, "simulation"));
  auto sc = sim::SimulationConfig::from_json(sim_json);
  if (g.channels) sc.n_mics = *g.channels;
  if (o.rt60) sc.fixed_rt60_s = *o.rt60;
  if (o.max_order) sc.max_order = *o.max_order;
  if (o.no_calibration) sc.calibrate_absorption = false;
  sc.validate();
  if (o.count == 0) throw std::invalid_argument("--count must be positive");

  const fs::path root(o.out);
  for (const char* sub : {"waves", "manifests", "transcripts", "enrollments"}) make_dir(root / sub);

  std::mt19937_64 seeds(g.seed);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < o.count; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "mix%05zu", i);
    const auto mix = sim::simulate_mixture(sc, id, seeds());
    io::write_wav((root / "waves" / (std::string(id) + ".wav")).string(), mix.wave);
    io::write_json((root / "manifests" / (std::string(id) + ".json")).string(), to_json(mix.manifest));
    sot::write_transcript((root / "transcripts" / (std::string(id) + ".json")).string(), mix.transcript);
    ids.emplace_back(id);
  }
  const std::uint64_t enroll_seed = seeds();
  for (const auto& voice : sim::voice_pool(sc)) {
    const auto waves = sim::enrollment_waves(sc, voice, enroll_seed);
    for (std::size_t k = 0; k < waves.size(); ++k) {
      io::write_wav((root / "enrollments" / enrollment_name(voice.speaker_id, k)).string(), waves[k]);
    }
  }
  io::write_json((root / "index.json").string(), {{"ids", ids}});
  io::write_json((root / "config.json").string(),
                 {{"command", "simulate"}, {"seed", g.seed}, {"count", o.count},
                  {"simulation", sc.to_json()}});
  std::cout << "simulated " << ids.size() << " mixtures into " << root.string() << "\n";
  return kExitOk;
}

// featurize --------------------------------------------------------------

struct FeaturizeOptions {
  std::string data;
  std::string out;
  std::string embeddings;  // archive of external enrollment embeddings
};

speaker::SpeakerProfileMatrix load_profiles(const fs::path& enroll_dir,
                                            const std::vector<std::string>& speakers,
                                            const speaker::EnrollmentEmbedder& embedder) {
  std::vector<speaker::Enrollment> enrollments;
  for (const auto& id : speakers) {
    std::vector<std::vector<double>> vectors;
    for (std::size_t k = 0; fs::exists(enroll_dir / enrollment_name(id, k)); ++k) {
      vectors.push_back(embedder.embed(io::read_wav((enroll_dir / enrollment_name(id, k)).string())));
    }
    if (vectors.empty()) throw io::DataError("no enrollment recordings for speaker " + id);
    enrollments.emplace_back(id, std::move(vectors));
  }
  return speaker::build_profile_matrix(enrollments);
}

int run_featurize(const GlobalOptions& g, const FeaturizeOptions& o) {
  const json cfg = load_pipeline_config(g);
  const auto mc = resolve_model(cfg, g);
  const fs::path data(o.data), out(o.out);
  require_dir(data);
  const auto ids = read_index(data);
  make_dir(out);
  const speaker::EnrollmentEmbedder embedder(mc.n_mels, mc.embedding_dim, g.seed);
  std::optional<io::TensorArchive> external;
  if (!o.embeddings.empty()) {
    require_file(o.embeddings);
    external = io::read_archive(o.embeddings);
  }
  for (const auto& id : ids) {
    const auto wave = io::read_wav((data / "waves" / (id + ".wav")).string());
    require_file(data / "manifests" / (id + ".json"));
    const auto manifest = sim::manifest_from_json(io::read_json((data / "manifests" / (id + ".json")).string()));
    require_file(data / "transcripts" / (id + ".json"));
    const auto ref = sot::read_transcript((data / "transcripts" / (id + ".json")).string());
    if (wave.channels() < mc.channels) {
      throw std::invalid_argument(id + ": " + std::to_string(mc.channels) +
                                  " channels requested, recording has " +
                                  std::to_string(wave.channels()));
    }
    speaker::SpeakerProfileMatrix profiles;
    if (external) {
      try {
        profiles = speaker::build_profile_matrix(
            speaker::enrollments_from_tensors(external->tensors, manifest.profile_speakers));
      } catch (const std::invalid_argument& e) {
        throw io::DataError(o.embeddings + ": " + e.what());
      }
    } else {
      profiles = load_profiles(data / "enrollments", manifest.profile_speakers, embedder);
    }
    const auto ex = model::make_example(id, wave, mc, std::move(profiles), ref);
    io::TensorArchive a;
    a.tensors.emplace("features", ex.features);
    a.tensors.emplace("speaker_mel", ex.speaker_mel);
    a.tensors.emplace("profiles", ex.profiles.matrix);
    a.meta = {{"kind", "mcsa-features"},
              {"id", id},
              {"speaker_ids", ex.profiles.speaker_ids},
              {"reference", sot::to_json(ex.reference)},
              {"model", mc.to_json()}};
    io::write_archive((out / (id + kFeatureSuffix)).string(), a);
  }
  io::write_json((out / "index.json").string(), {{"ids", ids}});
  io::write_json((out / "config.json").string(),
                 {{"command", "featurize"}, {"seed", g.seed}, {"data", o.data},
                  {"embeddings", o.embeddings}, {"model", mc.to_json()}});
  std::cout << "featurized " << ids.size() << " mixtures ("
            << frontend::feature_kind_name(mc.features) << ", " << mc.channels << " channels)\n";
  return kExitOk;
}

// Frontend settings that fix the feature layout; a model must agree with
// the archive on all of them.
bool same_frontend(const model::ModelConfig& a, const model::ModelConfig& b) {
  return a.features == b.features && a.n_mels == b.n_mels && a.channels == b.channels &&
         a.window_ms == b.window_ms && a.hop_ms == b.hop_ms && a.sample_rate == b.sample_rate;
}

std::vector<model::Example> load_examples(const fs::path& dir, model::ModelConfig* frontend_cfg) {
  require_dir(dir);
  std::vector<model::Example> out;
  for (const auto& id : read_index(dir)) {
    const auto path = dir / (id + kFeatureSuffix);
    require_file(path);
    const auto a = io::read_archive(path.string());
    if (a.meta.value("kind", "") != "mcsa-features") throw io::DataError(path.string() + ": not a feature archive");
    const auto cfg = model::ModelConfig::from_json(a.meta.at("model"));
    if (out.empty()) {
      *frontend_cfg = cfg;
    } else if (!same_frontend(cfg, *frontend_cfg)) {
      throw io::DataError(path.string() + ": feature settings differ from the rest of the set");
    }
    model::Example ex;
    ex.id = a.meta.at("id").get<std::string>();
    ex.features = a.tensors.at("features");
    ex.speaker_mel = a.tensors.at("speaker_mel");
    ex.profiles.matrix = a.tensors.at("profiles");
    ex.profiles.speaker_ids = a.meta.at("speaker_ids").get<std::vector<std::string>>();
    ex.profiles.validate();
    ex.reference = sot::transcript_from_json(a.meta.at("reference"));
    out.push_back(std::move(ex));
  }
  if (out.empty()) throw io::DataError(dir.string() + ": no feature archives");
  return out;
}

// train ------------------------------------------------------------------

struct TrainOptions {
  std::string data;
  std::string out;
  std::optional<std::size_t> steps;
  std::optional<double> learning_rate;
  std::optional<std::string> optimizer;
  std::size_t log_every = 25;
};

int run_train(const GlobalOptions& g, const TrainOptions& o) {
  const json cfg = load_pipeline_config(g);
  auto mc = resolve_model(cfg, g);
  json train_json = model::TrainConfig{}.to_json();
  train_json.merge_patch(section(cfg, "train"));
  auto tc = model::TrainConfig::from_json(train_json);
  if (o.steps) tc.steps = *o.steps;
  if (o.learning_rate) tc.learning_rate = *o.learning_rate;
  if (o.optimizer) tc.optimizer = *o.optimizer;
  tc.validate();

  model::ModelConfig feature_cfg;
  const auto batch = load_examples(o.data, &feature_cfg);
  // The archives decide the feature layout; flags may only confirm it.
  if ((g.features && frontend::parse_feature_kind(*g.features) != feature_cfg.features) ||
      (g.channels && *g.channels != feature_cfg.channels)) {
    throw std::invalid_argument("--features/--channels disagree with the feature archives");
  }
  mc.features = feature_cfg.features;
  mc.n_mels = feature_cfg.n_mels;
  mc.channels = feature_cfg.channels;
  mc.window_ms = feature_cfg.window_ms;
  mc.hop_ms = feature_cfg.hop_ms;
  mc.sample_rate = feature_cfg.sample_rate;
  mc.embedding_dim = batch.front().profiles.embedding_dim();
  mc.seed = g.seed;
  mc.validate();

  std::vector<std::string> words;
  for (const auto& ex : batch)
    for (const auto& t : metrics::strip_separators(ex.reference.tokens)) words.push_back(t);
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());

  model::SaAsrModel net(mc, asr::Vocabulary::with_words(words));
  model::Trainer trainer(net, tc);
  const auto log = trainer.run(batch, [&](const model::StepLog& s) {
    if (o.log_every > 0 && (s.step % o.log_every == 0 || s.step + 1 == tc.steps)) {
      std::fprintf(stderr, "step %zu loss %.5f asr %.5f spk %.5f\n", s.step, s.total, s.asr_loss,
                   s.speaker_loss);
    }
    return true;
  });

  const fs::path out(o.out);
  make_dir(out);
  const json echo = {{"command", "train"}, {"seed", g.seed},        {"data", o.data},
                     {"model", mc.to_json()}, {"train", tc.to_json()}, {"vocab_size", net.vocabulary().size()}};
  write_text(out / "loss.csv", model::loss_csv(log));
  net.save((out / "model.ckpt").string(), echo);
  io::write_json((out / "config.json").string(), echo);
  std::cout << "trained " << log.size() << " steps on " << batch.size() << " mixtures: loss "
            << log.front().total << " -> " << log.back().total << "\n";
  return kExitOk;
}

// decode -----------------------------------------------------------------

struct DecodeOptions {
  std::string model;
  std::string data;
  std::string out;
  std::size_t max_len = 0;
};

int run_decode(const GlobalOptions& g, const DecodeOptions& o) {
  require_file(o.model);
  const auto net = model::SaAsrModel::load(o.model);
  model::ModelConfig feature_cfg;
  const auto examples = load_examples(o.data, &feature_cfg);
  if (!same_frontend(net.config(), feature_cfg) ||
      net.config().embedding_dim != examples.front().profiles.embedding_dim()) {
    throw std::invalid_argument("feature archives do not match the checkpoint's configuration");
  }
  if ((g.features && frontend::parse_feature_kind(*g.features) != feature_cfg.features) ||
      (g.channels && *g.channels != feature_cfg.channels)) {
    throw std::invalid_argument("--features/--channels disagree with the checkpoint");
  }
  const fs::path out(o.out);
  make_dir(out);
  for (const auto& ex : examples) {
    sot::write_transcript((out / (ex.id + ".json")).string(), net.decode(ex, o.max_len));
  }
  io::write_json((out / "config.json").string(),
                 {{"command", "decode"}, {"seed", g.seed}, {"model_path", o.model},
                  {"data", o.data}, {"max_len", o.max_len}, {"model", net.config().to_json()}});
  std::cout << "decoded " << examples.size() << " mixtures into " << out.string() << "\n";
  return kExitOk;
}

// score ------------------------------------------------------------------

struct ScoreOptions {
  std::string ref;
  std::string hyp;
  std::string out;
  std::string counting_csv;
  bool per_speaker_count = false;
  bool no_insdel = false;
};

int run_score(const GlobalOptions& g, const ScoreOptions& o) {
  const fs::path ref_dir(o.ref), hyp_dir(o.hyp);
  const auto ids = transcript_ids(ref_dir);
  require_dir(hyp_dir);
  if (ids.empty()) throw io::DataError(o.ref + ": no reference transcripts");
  std::vector<sot::SotTranscript> refs, hyps;
  for (const auto& id : ids) {
    require_file(hyp_dir / (id + ".json"));
    refs.push_back(sot::read_transcript((ref_dir / (id + ".json")).string()));
    hyps.push_back(sot::read_transcript((hyp_dir / (id + ".json")).string()));
  }
  metrics::SerConventions conv;
  conv.count_insertions_deletions = !o.no_insdel;
  const auto report = metrics::score_corpus(refs, hyps, conv);
  std::cout << report.to_table(o.per_speaker_count);
  if (!o.out.empty()) {
    json j = report.to_json(o.per_speaker_count);
    j["config"] = {{"command", "score"}, {"seed", g.seed}, {"ref", o.ref}, {"hyp", o.hyp},
                   {"per_speaker_count", o.per_speaker_count},
                   {"count_insertions_deletions", conv.count_insertions_deletions}};
    io::write_json(o.out, j);
  }
  if (!o.counting_csv.empty()) write_text(o.counting_csv, report.counting.to_csv());
  return kExitOk;
}

// segment / stats --------------------------------------------------------

std::vector<segmenter::WordAnnotation> read_words(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io::DataError("cannot open " + path);
  try {
    return segmenter::read_word_annotations(in);
  } catch (const std::invalid_argument& e) {
    throw io::DataError(path + ": " + e.what());
  }
}

struct SegmentOptions {
  std::vector<std::string> words;
  std::string out;
};

int run_segment(const GlobalOptions& g, const SegmentOptions& o) {
  const auto sc = resolve_segmentation(load_pipeline_config(g));
  std::ofstream out(o.out);
  if (!out) throw std::runtime_error("cannot write " + o.out);
  std::vector<segmenter::UtteranceGroup> all;
  for (const auto& path : o.words) {
    const auto groups = segmenter::segment_meeting(read_words(path), sc);
    for (const auto& grp : groups) {
      json j = segmenter::to_json(grp);
      j["meeting"] = fs::path(path).stem().string();
      out << j.dump() << "\n";
    }
    all.insert(all.end(), groups.begin(), groups.end());
  }
  io::write_json(o.out + ".config.json",
                 {{"command", "segment"}, {"seed", g.seed}, {"inputs", o.words},
                  {"segmentation", segmentation_json(sc)}});
  std::cout << segmenter::dataset_stats(all).to_table();
  return kExitOk;
}

struct StatsOptions {
  std::vector<std::string> segments;
  std::string out;
};

int run_stats(const GlobalOptions& g, const StatsOptions& o) {
  std::vector<segmenter::UtteranceGroup> groups;
  for (const auto& path : o.segments) {
    std::ifstream in(path);
    if (!in) throw io::DataError("cannot open " + path);
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        groups.push_back(segmenter::group_from_json(json::parse(line)));
      } catch (const std::exception& e) {
        throw io::DataError(path + ":" + std::to_string(n) + ": " + e.what());
      }
    }
  }
  const auto stats = segmenter::dataset_stats(groups);
  std::cout << stats.to_table();
  if (!o.out.empty()) {
    json j = stats.to_json();
    j["config"] = {{"command", "stats"}, {"seed", g.seed}, {"inputs", o.segments}};
    io::write_json(o.out, j);
  }
  return kExitOk;
}

}  // namespace
}  // namespace mcsa::cli

int main(int argc, char** argv) {
  using namespace mcsa::cli;
  CLI::App app{"Multi-channel speaker-attributed recognition pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--config", g.config_path, "Pipeline config JSON");
  app.add_option("--channels", g.channels, "Microphone channels")->check(CLI::Range(1, 4));
  app.add_option("--features", g.features, "Encoder input features")
      ->check(CLI::IsMember({"mel", "magphase"}));

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate reverberant multi-speaker mixtures");
  simulate->add_option("--out", sim.out, "Output dataset directory")->required();
  simulate->add_option("--count", sim.count, "Number of mixtures")->capture_default_str();
  simulate->add_option("--rt60", sim.rt60, "Fixed reverberation time in seconds");
  simulate->add_option("--max-order", sim.max_order, "Image-source reflection order");
  simulate->add_flag("--no-calibration", sim.no_calibration, "Use plain Sabine absorption");

  FeaturizeOptions feat;
  auto* featurize = app.add_subcommand("featurize", "Compute features and speaker profiles");
  featurize->add_option("--data", feat.data, "Simulated dataset directory")->required();
  featurize->add_option("--out", feat.out, "Feature directory")->required();
  featurize->add_option("--embeddings", feat.embeddings,
                        "Tensor archive of enrollment embeddings keyed by speaker id");

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train a model on a feature directory");
  train_cmd->add_option("--data", train.data, "Feature directory")->required();
  train_cmd->add_option("--out", train.out, "Output directory")->required();
  train_cmd->add_option("--steps", train.steps, "Optimizer steps");
  train_cmd->add_option("--lr", train.learning_rate, "Learning rate");
  train_cmd->add_option("--optimizer", train.optimizer, "adam or sgd")
      ->check(CLI::IsMember({"adam", "sgd"}));
  train_cmd->add_option("--log-every", train.log_every, "Loss logging interval (0: silent)")
      ->capture_default_str();

  DecodeOptions dec;
  auto* decode = app.add_subcommand("decode", "Decode serialized transcripts");
  decode->add_option("--model", dec.model, "Checkpoint")->required();
  decode->add_option("--data", dec.data, "Feature directory")->required();
  decode->add_option("--out", dec.out, "Hypothesis directory")->required();
  decode->add_option("--max-len", dec.max_len, "Token limit (0: 2T + 8)")->capture_default_str();

  ScoreOptions score;
  auto* score_cmd = app.add_subcommand("score", "Score hypotheses against references");
  score_cmd->add_option("--ref", score.ref, "Reference transcript directory")->required();
  score_cmd->add_option("--hyp", score.hyp, "Hypothesis transcript directory")->required();
  score_cmd->add_option("--out", score.out, "Report JSON");
  score_cmd->add_option("--counting-csv", score.counting_csv, "Speaker-counting matrix CSV");
  score_cmd->add_flag("--per-speaker-count", score.per_speaker_count,
                      "Group results by reference speaker count");
  score_cmd->add_flag("--no-insdel", score.no_insdel,
                      "Exclude insertions and deletions from speaker-attributed errors");

  SegmentOptions seg;
  auto* segment = app.add_subcommand("segment", "Cut meetings into utterance groups");
  segment->add_option("words", seg.words, "Word annotation JSONL files")->required();
  segment->add_option("--out", seg.out, "Utterance-group JSONL")->required();

  StatsOptions st;
  auto* stats = app.add_subcommand("stats", "Summarize utterance groups by speaker count");
  stats->add_option("segments", st.segments, "Utterance-group JSONL files")->required();
  stats->add_option("--out", st.out, "Statistics JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (simulate->parsed()) return run_simulate(g, sim);
    if (featurize->parsed()) return run_featurize(g, feat);
    if (train_cmd->parsed()) return run_train(g, train);
    if (decode->parsed()) return run_decode(g, dec);
    if (score_cmd->parsed()) return run_score(g, score);
    if (segment->parsed()) return run_segment(g, seg);
    if (stats->parsed()) return run_stats(g, st);
  } catch (const mcsa::io::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
