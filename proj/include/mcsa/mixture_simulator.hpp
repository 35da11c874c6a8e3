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

// Reverberant multi-speaker mixtures: shoebox room sampling, image-source
// room impulse responses, first-in-first-out delayed mixing, and the
// manifests that describe each mixture.

#ifndef MCSA_MIXTURE_SIMULATOR_HPP_
#define MCSA_MIXTURE_SIMULATOR_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcsa/signal_frontend.hpp"
#include "mcsa/sot.hpp"

namespace mcsa::sim {

using Point = std::array<double, 3>;

inline constexpr double kSpeedOfSound = 343.0;
inline constexpr double kDefaultAperture = 0.10;
inline constexpr int kMaxOrderCap = 120;

double distance(const Point& a, const Point& b);

struct RoomSpec {
  Point dims{};  // length, width, height (m)
  double rt60_s = 0.5;
  double absorption = 0.3;

  double volume() const { return dims[0] * dims[1] * dims[2]; }
  double surface() const;
  bool contains(const Point& p) const;
  // Throws on dimensions, RT60 or absorption outside the sampling ranges.
  void validate() const;
};

struct ArrayGeometry {
  std::vector<Point> mic_positions;
  double aperture_m = kDefaultAperture;

  std::size_t n_mics() const { return mic_positions.size(); }
  Point center() const;
  // Collinear, aperture matches the largest pairwise distance, center within
  // 0.5 m (x, y) of the room center, height in [0.6, 0.8].
  void validate(const RoomSpec& room) const;
};

struct SourcePlacement {
  Point position{};
  std::string speaker_id;

  void validate(const RoomSpec& room) const;  // >= 0.5 m from every wall
};

struct SamplingConfig {
  std::size_t n_mics = 4;
  double aperture_m = kDefaultAperture;
  std::optional<double> fixed_rt60_s;  // sampled per room when unset
};

struct RoomSample {
  RoomSpec room;
  ArrayGeometry array;
  std::vector<SourcePlacement> sources;
};

// Draws a room, an array and `n_sources` speaker positions. The random draws
// do not depend on cfg.n_mics, so one seed yields the same room, array
// center/orientation and sources for every microphone count.
RoomSample sample_room(std::mt19937_64& rng, std::size_t n_sources,
                       const SamplingConfig& cfg = {});

struct AbsorptionResult {
  double alpha = 0.0;
  bool clamped = false;  // Sabine value exceeded 1
};

// Inverted Sabine formula alpha = 0.161 V / (rt60 · S), clamped to (0, 1].
AbsorptionResult rt60_to_absorption(double rt60_s, const Point& dims);

struct ImageSource {
  Point position{};
  int order = 0;  // number of wall reflections
};

// All images with at most max_order reflections, direct path first.
std::vector<ImageSource> image_sources(const RoomSpec& room, const Point& source,
                                       int max_order);

// Smallest reflection order whose images include every image within
// c · rt60 of the source, capped at kMaxOrderCap.
int adaptive_max_order(const RoomSpec& room);

struct RirOptions {
  double sample_rate = 16000.0;
  int max_order = 0;
  int sinc_half_width = 16;  // taps each side of the fractional delay
};

// Sum over images of beta^order / (4 pi d) impulses at delay d / c · fs,
// beta = sqrt(1 - alpha), with Hann-windowed sinc fractional delays.
std::vector<double> image_source_rir(const RoomSpec& room, const Point& source,
                                     const Point& mic, const RirOptions& opt);

// Schroeder backward integration in dB, normalized to 0 at t = 0.
std::vector<double> schroeder_curve(const std::vector<double>& rir);

// Line fit to the decay between -5 and -25 dB, extrapolated to 60 dB.
double estimate_rt60(const std::vector<double>& rir, double sample_rate);

struct CalibrationResult {
  double alpha = 0.0;
  double measured_rt60_s = 0.0;
  int iterations = 0;
};

// Specular image sources in a shoebox decay more slowly than the diffuse
// field Sabine's formula assumes. Starting from the Sabine value, rescales
// -ln(1 - alpha) by measured / target RT60 of the simulated source-mic
// response until within `tolerance` (relative) or max_iterations.
CalibrationResult calibrate_absorption(const RoomSpec& room, const Point& source,
                                       const Point& mic, const RirOptions& opt,
                                       double tolerance = 0.02, int max_iterations = 8);

struct DelayedSource {
  std::vector<double> dry;
  std::size_t offset = 0;            // samples
  std::vector<std::vector<double>> rirs;  // one per microphone
};

// Each source convolved with its per-microphone RIRs, shifted by its offset
// and summed. Offsets must be strictly increasing.
frontend::MultichannelWave mix_with_delays(const std::vector<DelayedSource>& sources,
                                           double sample_rate);

// Start offsets: 0 for the first speaker, then each one uniform in
// (0, duration of the previous] after the previous start, in samples.
std::vector<std::size_t> sample_offsets(const std::vector<std::size_t>& durations,
                                        std::mt19937_64& rng);

// Toy speech used in place of a read-speech corpus: each word is a fixed
// sequence of formant pairs, each speaker a fundamental frequency and
// spectral tilt.
struct ToyVoice {
  std::string speaker_id;
  double f0_hz = 120.0;
  double tilt = 1.0;  // harmonic amplitude falls as k^-tilt
  double formant_scale = 1.0;
};

const std::vector<std::string>& toy_lexicon();
std::vector<ToyVoice> toy_speakers(std::size_t count, std::uint64_t seed);
std::vector<double> synthesize_words(const ToyVoice& voice,
                                     const std::vector<std::string>& words,
                                     double sample_rate, std::uint64_t seed);

struct ManifestUtterance {
  std::string speaker_id;
  std::vector<std::string> words;
  std::size_t offset_samples = 0;
  std::size_t length_samples = 0;
};

struct MixtureManifest {
  std::string id;
  RoomSpec room;
  ArrayGeometry array;
  std::vector<SourcePlacement> sources;
  std::vector<ManifestUtterance> utterances;
  std::vector<std::string> profile_speakers;  // pool of K enrolled speakers
  std::uint64_t rng_seed = 0;
  double sample_rate = 16000.0;
  int max_order = 0;

  std::size_t n_speakers() const { return utterances.size(); }
  // Utterances as seconds, for serialization.
  std::vector<sot::Utterance> sot_utterances() const;
  void validate() const;
};

nlohmann::json to_json(const MixtureManifest& m);
// Responses [source][mic] from the manifest's room, absorption and order.
std::vector<std::vector<std::vector<double>>> manifest_rirs(const MixtureManifest& m);
MixtureManifest manifest_from_json(const nlohmann::json& j);

struct SimulationConfig {
  std::size_t n_mics = 4;
  std::size_t min_speakers = 1;
  std::size_t max_speakers = 3;
  std::size_t speaker_pool = 20;    // distinct toy voices
  std::size_t profile_pool = 8;     // K enrolled speakers per mixture
  std::size_t enrollments_per_speaker = 2;
  std::size_t min_words = 3;
  std::size_t max_words = 6;
  std::size_t lexicon_size = 0;     // 0: whole toy lexicon
  std::optional<double> fixed_rt60_s;
  std::optional<int> max_order;     // adaptive when unset
  double sample_rate = 16000.0;
  // Refine the Sabine absorption so the simulated decay meets the RT60;
  // plain Sabine when false.
  bool calibrate_absorption = true;

  void validate() const;
  nlohmann::json to_json() const;
  static SimulationConfig from_json(const nlohmann::json& j);
};

// The fixed set of toy voices mixtures and enrollments draw from.
std::vector<ToyVoice> voice_pool(const SimulationConfig& cfg);

struct Mixture {
  MixtureManifest manifest;
  frontend::MultichannelWave wave;
  sot::SotTranscript transcript;
};

// Deterministic in (cfg, seed).
Mixture simulate_mixture(const SimulationConfig& cfg, const std::string& id,
                         std::uint64_t seed);

// Dry single-channel enrollment recordings of one speaker.
std::vector<frontend::MultichannelWave> enrollment_waves(const SimulationConfig& cfg,
                                                         const ToyVoice& voice,
                                                         std::uint64_t seed);

}  // namespace mcsa::sim

#endif  // MCSA_MIXTURE_SIMULATOR_HPP_
