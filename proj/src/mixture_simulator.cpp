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

#include "mcsa/mixture_simulator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <set>
#include <stdexcept>

#include "fft.hpp"

namespace mcsa::sim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWallMargin = 0.5;
constexpr double kMaxArrayOffset = 0.5;
constexpr double kMinSourceMicDistance = 0.5;
constexpr std::uint64_t kVoiceSeed = 0x5eed0001;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool in_range(double v, double lo, double hi) { return v >= lo && v <= hi; }

std::string fmt_point(const Point& p) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "(%.3f, %.3f, %.3f)", p[0], p[1], p[2]);
  return buf;
}

}  // namespace

double distance(const Point& a, const Point& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                   (a[2] - b[2]) * (a[2] - b[2]));
}

double RoomSpec::surface() const {
  return 2.0 * (dims[0] * dims[1] + dims[0] * dims[2] + dims[1] * dims[2]);
}

bool RoomSpec::contains(const Point& p) const {
  for (int i = 0; i < 3; ++i)
    if (!(p[i] > 0.0 && p[i] < dims[i])) return false;
  return true;
}

void RoomSpec::validate() const {
  if (!in_range(dims[0], 3.0, 8.0) || !in_range(dims[1], 3.0, 8.0)) {
    throw std::invalid_argument("room length/width outside [3, 8] m");
  }
  if (!in_range(dims[2], 2.4, 3.0)) throw std::invalid_argument("room height outside [2.4, 3] m");
  if (!in_range(rt60_s, 0.4, 1.0)) throw std::invalid_argument("RT60 outside [0.4, 1] s");
  if (!(absorption > 0.0 && absorption <= 1.0)) {
    throw std::invalid_argument("absorption outside (0, 1]");
  }
}

Point ArrayGeometry::center() const {
  Point c{0.0, 0.0, 0.0};
  for (const auto& p : mic_positions)
    for (int i = 0; i < 3; ++i) c[i] += p[i] / static_cast<double>(mic_positions.size());
  return c;
}

void ArrayGeometry::validate(const RoomSpec& room) const {
  if (n_mics() < 2 || n_mics() > 4) throw std::invalid_argument("array needs 2 to 4 mics");
  double widest = 0.0;
  std::size_t a = 0, b = 0;
  for (std::size_t i = 0; i < n_mics(); ++i) {
    for (std::size_t j = i + 1; j < n_mics(); ++j) {
      const double d = distance(mic_positions[i], mic_positions[j]);
      if (d > widest) {
        widest = d;
        a = i;
        b = j;
      }
    }
  }
  if (std::abs(widest - aperture_m) > 1e-9) {
    throw std::invalid_argument("array aperture does not match the widest mic pair");
  }
  // Every mic on the line through the two outermost ones.
  const Point& p = mic_positions[a];
  const Point& q = mic_positions[b];
  for (const auto& m : mic_positions) {
    const Point u{q[0] - p[0], q[1] - p[1], q[2] - p[2]};
    const Point v{m[0] - p[0], m[1] - p[1], m[2] - p[2]};
    const Point cross{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                      u[0] * v[1] - u[1] * v[0]};
    if (distance(cross, {0, 0, 0}) > 1e-9) throw std::invalid_argument("mics are not collinear");
  }
  const Point c = center();
  if (std::hypot(c[0] - room.dims[0] / 2, c[1] - room.dims[1] / 2) > kMaxArrayOffset + 1e-12) {
    throw std::invalid_argument("array center more than 0.5 m from the room center");
  }
  if (!in_range(c[2], 0.6, 0.8)) throw std::invalid_argument("array height outside [0.6, 0.8] m");
}

void SourcePlacement::validate(const RoomSpec& room) const {
  for (int i = 0; i < 3; ++i) {
    if (position[i] < kWallMargin || position[i] > room.dims[i] - kWallMargin) {
      throw std::invalid_argument("source " + speaker_id + " at " + fmt_point(position) +
                                  " is closer than 0.5 m to a wall");
    }
  }
}

RoomSample sample_room(std::mt19937_64& rng, std::size_t n_sources,
                       const SamplingConfig& cfg) {
  if (cfg.n_mics < 2 || cfg.n_mics > 4) throw std::invalid_argument("n_mics must be 2..4");
  RoomSample s;
  RoomSpec& room = s.room;
  room.dims = {uniform(rng, 3.0, 8.0), uniform(rng, 3.0, 8.0), uniform(rng, 2.4, 3.0)};
  const double drawn_rt60 = uniform(rng, 0.4, 1.0);
  room.rt60_s = cfg.fixed_rt60_s.value_or(drawn_rt60);
  const AbsorptionResult ab = rt60_to_absorption(room.rt60_s, room.dims);
  assert(!ab.clamped);
  room.absorption = ab.alpha;

  double dx = 0.0, dy = 0.0;
  do {
    dx = uniform(rng, -kMaxArrayOffset, kMaxArrayOffset);
    dy = uniform(rng, -kMaxArrayOffset, kMaxArrayOffset);
  } while (std::hypot(dx, dy) > kMaxArrayOffset);
  const Point center{room.dims[0] / 2 + dx, room.dims[1] / 2 + dy, uniform(rng, 0.6, 0.8)};
  const double azimuth = uniform(rng, 0.0, kPi);
  s.array.aperture_m = cfg.aperture_m;
  for (std::size_t m = 0; m < cfg.n_mics; ++m) {
    const double along =
        (static_cast<double>(m) / static_cast<double>(cfg.n_mics - 1) - 0.5) * cfg.aperture_m;
    s.array.mic_positions.push_back(
        {center[0] + along * std::cos(azimuth), center[1] + along * std::sin(azimuth), center[2]});
  }

  for (std::size_t k = 0; k < n_sources; ++k) {
    Point p;
    do {
      p = {uniform(rng, kWallMargin, room.dims[0] - kWallMargin),
           uniform(rng, kWallMargin, room.dims[1] - kWallMargin),
           uniform(rng, 1.2, 1.8)};  // seated or standing talker
    } while (distance(p, center) < kMinSourceMicDistance);
    s.sources.push_back({p, ""});
  }
  return s;
}

AbsorptionResult rt60_to_absorption(double rt60_s, const Point& dims) {
  if (!(rt60_s > 0.0)) throw std::invalid_argument("rt60 must be positive");
  const RoomSpec r{dims, rt60_s, 1.0};
  const double alpha = 0.161 * r.volume() / (rt60_s * r.surface());
  if (alpha > 1.0) return {1.0, true};
  return {alpha, false};
}

std::vector<ImageSource> image_sources(const RoomSpec& room, const Point& source,
                                       int max_order) {
  if (max_order < 0) throw std::invalid_argument("max_order must be >= 0");
  struct AxisImage {
    double coord;
    int order;
  };
  std::array<std::vector<AxisImage>, 3> axes;
  for (int a = 0; a < 3; ++a) {
    axes[a].push_back({source[a], 0});
    for (int n = -max_order; n <= max_order; ++n) {
      for (int p = 0; p <= 1; ++p) {
        if (n == 0 && p == 0) continue;
        const int order = std::abs(n - p) + std::abs(n);
        if (order > max_order) continue;
        axes[a].push_back({(1 - 2 * p) * source[a] + 2.0 * n * room.dims[a], order});
      }
    }
  }
  std::vector<ImageSource> out;
  for (const auto& x : axes[0])
    for (const auto& y : axes[1]) {
      if (x.order + y.order > max_order) continue;
      for (const auto& z : axes[2]) {
        const int order = x.order + y.order + z.order;
        if (order <= max_order) out.push_back({{x.coord, y.coord, z.coord}, order});
      }
    }
  return out;
}

int adaptive_max_order(const RoomSpec& room) {
  // Images with at most N reflections fill |x|/Lx + |y|/Ly + |z|/Lz <= N,
  // whose inscribed sphere has radius N / sqrt(sum 1/L^2).
  double inv = 0.0;
  for (double l : room.dims) inv += 1.0 / (l * l);
  const int n = static_cast<int>(std::ceil(kSpeedOfSound * room.rt60_s * std::sqrt(inv)));
  return std::clamp(n, 1, kMaxOrderCap);
}

namespace {

// Hann-windowed sinc sampled at kPhases fractional offsets per tap, read
// with linear interpolation between phases. Row 0 is an exact unit impulse.
class FractionalDelayTable {
 public:
  static constexpr int kPhases = 512;

  explicit FractionalDelayTable(int half_width)
      : w_(half_width), taps_(2 * half_width), rows_((kPhases + 1) * taps_, 0.0) {
    for (int p = 0; p <= kPhases; ++p) {
      const double frac = static_cast<double>(p) / kPhases;
      for (int t = 0; t < taps_; ++t) {
        const double x = static_cast<double>(t - w_ + 1) - frac;
        double v = 0.0;
        if (p == 0 || p == kPhases) {
          v = std::abs(x) < 0.5 ? 1.0 : 0.0;
        } else if (std::abs(x) < w_) {
          v = std::sin(kPi * x) / (kPi * x) * 0.5 * (1.0 + std::cos(kPi * x / w_));
        }
        rows_[p * taps_ + t] = v;
      }
    }
  }

  int half_width() const { return w_; }

  // Adds amp · kernel(n - delay) for the 2w taps around the delay.
  void add(std::vector<double>& h, double delay, double amp) const {
    const double base = std::floor(delay);
    const double pos = (delay - base) * kPhases;
    const int p = std::min(static_cast<int>(pos), kPhases - 1);
    const double mix = pos - p;
    const double* lo = &rows_[p * taps_];
    const double* hi = lo + taps_;
    const long first = static_cast<long>(base) - w_ + 1;
    for (int t = 0; t < taps_; ++t) {
      const long n = first + t;
      if (n < 0 || n >= static_cast<long>(h.size())) continue;
      h[n] += amp * (lo[t] + mix * (hi[t] - lo[t]));
    }
  }

 private:
  int w_;
  int taps_;
  std::vector<double> rows_;
};

const FractionalDelayTable& delay_table(int half_width) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<FractionalDelayTable>> tables;
  std::lock_guard<std::mutex> lock(mu);
  auto& t = tables[half_width];
  if (!t) t = std::make_unique<FractionalDelayTable>(half_width);
  return *t;
}

struct AxisImage {
  double offset;  // image coordinate minus microphone coordinate
  int order;
};

std::array<std::vector<AxisImage>, 3> axis_images(const RoomSpec& room, const Point& source,
                                                  const Point& mic, int max_order) {
  std::array<std::vector<AxisImage>, 3> axes;
  for (int a = 0; a < 3; ++a) {
    axes[a].push_back({source[a] - mic[a], 0});
    for (int n = -max_order; n <= max_order; ++n) {
      for (int p = 0; p <= 1; ++p) {
        if (n == 0 && p == 0) continue;
        const int order = std::abs(n - p) + std::abs(n);
        if (order > max_order) continue;
        axes[a].push_back({(1 - 2 * p) * source[a] + 2.0 * n * room.dims[a] - mic[a], order});
      }
    }
  }
  return axes;
}

template <typename Fn>
void for_each_image(const std::array<std::vector<AxisImage>, 3>& axes, int max_order, Fn&& fn) {
  for (const auto& x : axes[0]) {
    for (const auto& y : axes[1]) {
      if (x.order + y.order > max_order) continue;
      const double dxy = x.offset * x.offset + y.offset * y.offset;
      for (const auto& z : axes[2]) {
        const int order = x.order + y.order + z.order;
        if (order <= max_order) fn(std::sqrt(dxy + z.offset * z.offset), order);
      }
    }
  }
}

}  // namespace

std::vector<double> image_source_rir(const RoomSpec& room, const Point& source,
                                     const Point& mic, const RirOptions& opt) {
  if (!room.contains(source) || !room.contains(mic)) {
    throw std::invalid_argument("source and microphone must lie inside the room");
  }
  if (distance(source, mic) < 1e-6) {
    throw std::invalid_argument("source and microphone coincide at " + fmt_point(mic));
  }
  if (!(room.absorption > 0.0 && room.absorption <= 1.0)) {
    throw std::invalid_argument("absorption outside (0, 1]");
  }
  if (opt.max_order < 0) throw std::invalid_argument("max_order must be >= 0");
  if (opt.sinc_half_width < 1) throw std::invalid_argument("sinc_half_width must be >= 1");
  const double beta = std::sqrt(1.0 - room.absorption);
  // With fully absorbing walls only the direct path carries energy.
  const int max_order = beta == 0.0 ? 0 : opt.max_order;
  std::vector<double> gain(max_order + 1);
  for (int o = 0; o <= max_order; ++o) gain[o] = std::pow(beta, o);

  const auto axes = axis_images(room, source, mic, max_order);
  const double samples_per_m = opt.sample_rate / kSpeedOfSound;
  double farthest = 0.0;
  for_each_image(axes, max_order, [&](double d, int) { farthest = std::max(farthest, d); });

  const FractionalDelayTable& table = delay_table(opt.sinc_half_width);
  std::vector<double> h(
      static_cast<std::size_t>(std::floor(farthest * samples_per_m)) + opt.sinc_half_width + 1,
      0.0);
  for_each_image(axes, max_order, [&](double d, int order) {
    table.add(h, d * samples_per_m, gain[order] / (4.0 * kPi * d));
  });
  return h;
}

std::vector<double> schroeder_curve(const std::vector<double>& rir) {
  std::vector<double> edc(rir.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = rir.size(); i-- > 0;) {
    acc += rir[i] * rir[i];
    edc[i] = acc;
  }
  if (acc == 0.0) throw std::invalid_argument("schroeder_curve: zero impulse response");
  for (double& e : edc) e = e > 0.0 ? 10.0 * std::log10(e / acc) : -std::numeric_limits<double>::infinity();
  return edc;
}

double estimate_rt60(const std::vector<double>& rir, double sample_rate) {
  const std::vector<double> edc = schroeder_curve(rir);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < edc.size(); ++i) {
    if (edc[i] > -5.0) continue;
    if (edc[i] < -25.0) break;
    const double t = static_cast<double>(i) / sample_rate;
    sx += t;
    sy += edc[i];
    sxx += t * t;
    sxy += t * edc[i];
    ++n;
  }
  if (n < 2) throw std::invalid_argument("estimate_rt60: decay does not span -5 to -25 dB");
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (!(slope < 0.0)) throw std::invalid_argument("estimate_rt60: non-decaying response");
  return -60.0 / slope;
}

CalibrationResult calibrate_absorption(const RoomSpec& room, const Point& source,
                                       const Point& mic, const RirOptions& opt,
                                       double tolerance, int max_iterations) {
  RoomSpec r = room;
  const AbsorptionResult sabine = rt60_to_absorption(room.rt60_s, room.dims);
  r.absorption = sabine.alpha;
  CalibrationResult out;
  out.alpha = r.absorption;
  double best_error = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iterations; ++it) {
    const double measured = estimate_rt60(image_source_rir(r, source, mic, opt), opt.sample_rate);
    const double error = std::abs(measured / room.rt60_s - 1.0);
    ++out.iterations;
    if (error < best_error) {
      best_error = error;
      out.alpha = r.absorption;
      out.measured_rt60_s = measured;
    }
    if (error <= tolerance) break;
    // Decay time scales roughly as 1 / -ln(1 - alpha).
    const double a = -std::log1p(-r.absorption) * measured / room.rt60_s;
    r.absorption = std::clamp(-std::expm1(-a), 1e-4, 1.0);
  }
  return out;
}

frontend::MultichannelWave mix_with_delays(const std::vector<DelayedSource>& sources,
                                           double sample_rate) {
  if (sources.empty()) throw std::invalid_argument("mix_with_delays: no sources");
  const std::size_t mics = sources.front().rirs.size();
  if (mics == 0) throw std::invalid_argument("mix_with_delays: no microphones");
  std::size_t length = 0;
  for (std::size_t k = 0; k < sources.size(); ++k) {
    const auto& s = sources[k];
    if (s.rirs.size() != mics) {
      throw std::invalid_argument("mix_with_delays: source " + std::to_string(k) +
                                  " has a different microphone count");
    }
    if (k > 0 && s.offset <= sources[k - 1].offset) {
      throw std::invalid_argument("mix_with_delays: start offsets must be strictly increasing");
    }
    if (s.dry.empty()) throw std::invalid_argument("mix_with_delays: empty source signal");
    for (const auto& r : s.rirs) {
      if (r.empty()) throw std::invalid_argument("mix_with_delays: empty RIR");
      length = std::max(length, s.offset + s.dry.size() + r.size() - 1);
    }
  }
  frontend::MultichannelWave out;
  out.sample_rate = sample_rate;
  out.samples = Tensor({mics, length}, 0.0);
  for (const auto& s : sources) {
    for (std::size_t m = 0; m < mics; ++m) {
      const std::vector<double> wet = fft::convolve(s.dry, s.rirs[m]);
      for (std::size_t i = 0; i < wet.size(); ++i) out.samples[m * length + s.offset + i] += wet[i];
    }
  }
  return out;
}

std::vector<std::size_t> sample_offsets(const std::vector<std::size_t>& durations,
                                        std::mt19937_64& rng) {
  std::vector<std::size_t> offsets;
  for (std::size_t k = 0; k < durations.size(); ++k) {
    if (k == 0) {
      offsets.push_back(0);
      continue;
    }
    if (durations[k - 1] == 0) throw std::invalid_argument("sample_offsets: zero duration");
    std::uniform_int_distribution<std::size_t> delay(1, durations[k - 1]);
    offsets.push_back(offsets.back() + delay(rng));
  }
  return offsets;
}

const std::vector<std::string>& toy_lexicon() {
  static const std::vector<std::string> words = {
      "alpha",  "bravo",   "charlie", "delta", "echo",   "foxtrot", "golf",  "hotel",
      "india",  "juliet",  "kilo",    "lima",  "mike",   "november", "oscar", "papa",
      "quebec", "romeo",   "sierra",  "tango", "uniform", "victor", "whiskey", "xray",
      "yankee", "zulu",    "zero",    "one",   "two",    "three",   "four",  "five",
      "six",    "seven",   "eight",   "nine"};
  return words;
}

std::vector<ToyVoice> toy_speakers(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ToyVoice> out;
  for (std::size_t k = 0; k < count; ++k) {
    char id[32];
    std::snprintf(id, sizeof(id), "spk%02zu", k);
    // Spread fundamentals over the pool so neighbours stay distinguishable.
    const double f0 = 90.0 * std::pow(240.0 / 90.0, (k + uniform(rng, 0.0, 1.0)) /
                                                        static_cast<double>(count));
    out.push_back({id, f0, uniform(rng, 0.6, 1.4), uniform(rng, 0.85, 1.15)});
  }
  return out;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct FormantSegment {
  double f1, f2, dur_s;
};

std::vector<FormantSegment> word_segments(const std::string& word) {
  std::mt19937_64 rng(fnv1a(word));
  const int n = std::uniform_int_distribution<int>(2, 3)(rng);
  std::vector<FormantSegment> segs;
  for (int i = 0; i < n; ++i) {
    segs.push_back({uniform(rng, 300.0, 850.0), uniform(rng, 900.0, 2400.0),
                    uniform(rng, 0.08, 0.14)});
  }
  return segs;
}

}  // namespace

std::vector<double> synthesize_words(const ToyVoice& voice,
                                     const std::vector<std::string>& words,
                                     double sample_rate, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double f0 = voice.f0_hz * uniform(rng, 0.97, 1.03);
  const double gap_s = 0.06, ramp_s = 0.005, bandwidth = 120.0, nyquist_cap = 4000.0;
  const std::size_t n_harm = static_cast<std::size_t>(nyquist_cap / f0);
  std::vector<double> out;
  double phase = 0.0;
  for (const auto& word : words) {
    for (const auto& seg : word_segments(word)) {
      std::vector<double> amp(n_harm);
      for (std::size_t k = 1; k <= n_harm; ++k) {
        const double f = static_cast<double>(k) * f0;
        double res = 0.0;
        for (double fc : {seg.f1 * voice.formant_scale, seg.f2 * voice.formant_scale}) {
          res += 1.0 / (1.0 + ((f - fc) / bandwidth) * ((f - fc) / bandwidth));
        }
        amp[k - 1] = std::pow(static_cast<double>(k), -voice.tilt) * (0.05 + res);
      }
      const auto len = static_cast<std::size_t>(seg.dur_s * sample_rate);
      const auto ramp = static_cast<std::size_t>(ramp_s * sample_rate);
      for (std::size_t i = 0; i < len; ++i) {
        const double t = static_cast<double>(out.size()) / sample_rate;
        phase += 2.0 * kPi * f0 * (1.0 + 0.02 * std::sin(2.0 * kPi * 3.0 * t)) / sample_rate;
        double v = 0.0;
        for (std::size_t k = 0; k < n_harm; ++k) v += amp[k] * std::sin((k + 1) * phase);
        double env = 1.0;
        if (i < ramp) env = static_cast<double>(i) / ramp;
        if (len - i <= ramp) env = std::min(env, static_cast<double>(len - i) / ramp);
        out.push_back(0.3 * env * v);
      }
    }
    out.resize(out.size() + static_cast<std::size_t>(gap_s * sample_rate), 0.0);
  }
  return out;
}

std::vector<ToyVoice> voice_pool(const SimulationConfig& cfg) {
  return toy_speakers(cfg.speaker_pool, kVoiceSeed);
}

std::vector<sot::Utterance> MixtureManifest::sot_utterances() const {
  std::vector<sot::Utterance> out;
  for (const auto& u : utterances) {
    out.push_back({u.speaker_id, static_cast<double>(u.offset_samples) / sample_rate,
                   static_cast<double>(u.offset_samples + u.length_samples) / sample_rate,
                   u.words});
  }
  return out;
}

void MixtureManifest::validate() const {
  room.validate();
  array.validate(room);
  if (sources.size() != utterances.size()) {
    throw std::invalid_argument("manifest " + id + ": one source per utterance expected");
  }
  for (const auto& s : sources) s.validate(room);
  if (utterances.empty() || utterances.size() > 3) {
    throw std::invalid_argument("manifest " + id + ": 1 to 3 speakers expected");
  }
  std::set<std::string> seen;
  for (std::size_t k = 0; k < utterances.size(); ++k) {
    const auto& u = utterances[k];
    if (!seen.insert(u.speaker_id).second) {
      throw std::invalid_argument("manifest " + id + ": speaker " + u.speaker_id + " repeated");
    }
    if (k > 0 && u.offset_samples <= utterances[k - 1].offset_samples) {
      throw std::invalid_argument("manifest " + id + ": start offsets not strictly increasing");
    }
    if (std::find(profile_speakers.begin(), profile_speakers.end(), u.speaker_id) ==
        profile_speakers.end()) {
      throw std::invalid_argument("manifest " + id + ": speaker " + u.speaker_id +
                                  " missing from the profile pool");
    }
  }
}

nlohmann::json to_json(const MixtureManifest& m) {
  nlohmann::json sources = nlohmann::json::array();
  for (const auto& s : m.sources) sources.push_back({{"speaker", s.speaker_id}, {"position", s.position}});
  nlohmann::json utts = nlohmann::json::array();
  for (const auto& u : m.utterances) {
    utts.push_back({{"speaker", u.speaker_id},
                    {"words", u.words},
                    {"offset_samples", u.offset_samples},
                    {"length_samples", u.length_samples}});
  }
  return {{"id", m.id},
          {"room", {{"dims", m.room.dims}, {"rt60_s", m.room.rt60_s}, {"absorption", m.room.absorption}}},
          {"array", {{"mic_positions", m.array.mic_positions}, {"aperture_m", m.array.aperture_m}}},
          {"sources", sources},
          {"utterances", utts},
          {"n_speakers", m.n_speakers()},
          {"profile_speakers", m.profile_speakers},
          {"rng_seed", m.rng_seed},
          {"sample_rate", m.sample_rate},
          {"max_order", m.max_order}};
}

MixtureManifest manifest_from_json(const nlohmann::json& j) {
  MixtureManifest m;
  m.id = j.at("id").get<std::string>();
  const auto& r = j.at("room");
  m.room = {r.at("dims").get<Point>(), r.at("rt60_s").get<double>(), r.at("absorption").get<double>()};
  m.array.mic_positions = j.at("array").at("mic_positions").get<std::vector<Point>>();
  m.array.aperture_m = j.at("array").at("aperture_m").get<double>();
  for (const auto& s : j.at("sources")) {
    m.sources.push_back({s.at("position").get<Point>(), s.at("speaker").get<std::string>()});
  }
  for (const auto& u : j.at("utterances")) {
    m.utterances.push_back({u.at("speaker").get<std::string>(),
                            u.at("words").get<std::vector<std::string>>(),
                            u.at("offset_samples").get<std::size_t>(),
                            u.at("length_samples").get<std::size_t>()});
  }
  m.profile_speakers = j.at("profile_speakers").get<std::vector<std::string>>();
  m.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  m.sample_rate = j.at("sample_rate").get<double>();
  m.max_order = j.at("max_order").get<int>();
  return m;
}

void SimulationConfig::validate() const {
  if (n_mics < 2 || n_mics > 4) throw std::invalid_argument("n_mics must be 2..4");
  if (min_speakers < 1 || max_speakers > 3 || min_speakers > max_speakers) {
    throw std::invalid_argument("speaker counts must satisfy 1 <= min <= max <= 3");
  }
  if (profile_pool < max_speakers || speaker_pool < profile_pool) {
    throw std::invalid_argument("need max_speakers <= profile_pool <= speaker_pool");
  }
  if (min_words < 1 || min_words > max_words) throw std::invalid_argument("bad word counts");
  if (lexicon_size > toy_lexicon().size()) {
    throw std::invalid_argument("lexicon_size exceeds the toy lexicon (" +
                                std::to_string(toy_lexicon().size()) + ")");
  }
  if (fixed_rt60_s && !in_range(*fixed_rt60_s, 0.4, 1.0)) {
    throw std::invalid_argument("fixed RT60 outside [0.4, 1] s");
  }
  if (max_order && *max_order < 0) throw std::invalid_argument("max_order must be >= 0");
  if (enrollments_per_speaker < 1) throw std::invalid_argument("need at least one enrollment");
}

nlohmann::json SimulationConfig::to_json() const {
  nlohmann::json j = {{"n_mics", n_mics},
                      {"min_speakers", min_speakers},
                      {"max_speakers", max_speakers},
                      {"speaker_pool", speaker_pool},
                      {"profile_pool", profile_pool},
                      {"enrollments_per_speaker", enrollments_per_speaker},
                      {"min_words", min_words},
                      {"max_words", max_words},
                      {"lexicon_size", lexicon_size},
                      {"sample_rate", sample_rate},
                      {"calibrate_absorption", calibrate_absorption}};
  j["fixed_rt60_s"] = fixed_rt60_s ? nlohmann::json(*fixed_rt60_s) : nlohmann::json(nullptr);
  j["max_order"] = max_order ? nlohmann::json(*max_order) : nlohmann::json(nullptr);
  return j;
}

SimulationConfig SimulationConfig::from_json(const nlohmann::json& j) {
  SimulationConfig c;
  c.n_mics = j.value("n_mics", c.n_mics);
  c.min_speakers = j.value("min_speakers", c.min_speakers);
  c.max_speakers = j.value("max_speakers", c.max_speakers);
  c.speaker_pool = j.value("speaker_pool", c.speaker_pool);
  c.profile_pool = j.value("profile_pool", c.profile_pool);
  c.enrollments_per_speaker = j.value("enrollments_per_speaker", c.enrollments_per_speaker);
  c.min_words = j.value("min_words", c.min_words);
  c.max_words = j.value("max_words", c.max_words);
  c.lexicon_size = j.value("lexicon_size", c.lexicon_size);
  c.sample_rate = j.value("sample_rate", c.sample_rate);
  c.calibrate_absorption = j.value("calibrate_absorption", c.calibrate_absorption);
  if (j.contains("fixed_rt60_s") && !j["fixed_rt60_s"].is_null()) {
    c.fixed_rt60_s = j["fixed_rt60_s"].get<double>();
  }
  if (j.contains("max_order") && !j["max_order"].is_null()) c.max_order = j["max_order"].get<int>();
  return c;
}

std::vector<std::vector<std::vector<double>>> manifest_rirs(const MixtureManifest& m) {
  RirOptions opt;
  opt.sample_rate = m.sample_rate;
  opt.max_order = m.max_order;
  std::vector<std::vector<std::vector<double>>> out;
  for (const auto& src : m.sources) {
    auto& per_mic = out.emplace_back();
    for (const auto& mic : m.array.mic_positions) {
      per_mic.push_back(image_source_rir(m.room, src.position, mic, opt));
    }
  }
  return out;
}

Mixture simulate_mixture(const SimulationConfig& cfg, const std::string& id,
                         std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  const auto voices = voice_pool(cfg);
  const std::size_t lex = cfg.lexicon_size == 0 ? toy_lexicon().size() : cfg.lexicon_size;

  const std::size_t n_spk =
      std::uniform_int_distribution<std::size_t>(cfg.min_speakers, cfg.max_speakers)(rng);
  std::vector<std::size_t> order(voices.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  MixtureManifest m;
  m.id = id;
  m.rng_seed = seed;
  m.sample_rate = cfg.sample_rate;
  for (std::size_t i = 0; i < cfg.profile_pool; ++i) m.profile_speakers.push_back(voices[order[i]].speaker_id);
  std::sort(m.profile_speakers.begin(), m.profile_speakers.end());

  std::vector<std::vector<double>> dry;
  std::vector<std::size_t> lengths;
  std::uniform_int_distribution<std::size_t> n_words(cfg.min_words, cfg.max_words);
  std::uniform_int_distribution<std::size_t> pick(0, lex - 1);
  for (std::size_t k = 0; k < n_spk; ++k) {
    ManifestUtterance u;
    u.speaker_id = voices[order[k]].speaker_id;
    const std::size_t n = n_words(rng);
    for (std::size_t w = 0; w < n; ++w) u.words.push_back(toy_lexicon()[pick(rng)]);
    dry.push_back(synthesize_words(voices[order[k]], u.words, cfg.sample_rate, rng()));
    u.length_samples = dry.back().size();
    lengths.push_back(u.length_samples);
    m.utterances.push_back(std::move(u));
  }
  const auto offsets = sample_offsets(lengths, rng);
  for (std::size_t k = 0; k < n_spk; ++k) m.utterances[k].offset_samples = offsets[k];

  SamplingConfig sc;
  sc.n_mics = cfg.n_mics;
  sc.fixed_rt60_s = cfg.fixed_rt60_s;
  RoomSample rs = sample_room(rng, n_spk, sc);
  for (std::size_t k = 0; k < n_spk; ++k) rs.sources[k].speaker_id = m.utterances[k].speaker_id;
  m.room = rs.room;
  m.array = rs.array;
  m.sources = rs.sources;
  m.max_order = cfg.max_order.value_or(adaptive_max_order(m.room));

  RirOptions opt;
  opt.sample_rate = cfg.sample_rate;
  opt.max_order = m.max_order;
  if (cfg.calibrate_absorption) {
    m.room.absorption =
        calibrate_absorption(m.room, m.sources[0].position, m.array.mic_positions[0], opt).alpha;
  }
  m.validate();
  auto rirs = manifest_rirs(m);
  std::vector<DelayedSource> delayed;
  for (std::size_t k = 0; k < n_spk; ++k) {
    delayed.push_back({std::move(dry[k]), offsets[k], std::move(rirs[k])});
  }
  Mixture out;
  out.wave = mix_with_delays(delayed, cfg.sample_rate);
  out.transcript = sot::serialize_fifo(m.sot_utterances());
  out.manifest = std::move(m);
  return out;
}

std::vector<frontend::MultichannelWave> enrollment_waves(const SimulationConfig& cfg,
                                                         const ToyVoice& voice,
                                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ fnv1a(voice.speaker_id));
  const std::size_t lex = cfg.lexicon_size == 0 ? toy_lexicon().size() : cfg.lexicon_size;
  std::uniform_int_distribution<std::size_t> pick(0, lex - 1);
  std::vector<frontend::MultichannelWave> out;
  for (std::size_t e = 0; e < cfg.enrollments_per_speaker; ++e) {
    std::vector<std::string> words;
    for (int w = 0; w < 6; ++w) words.push_back(toy_lexicon()[pick(rng)]);
    std::vector<double> s = synthesize_words(voice, words, cfg.sample_rate, rng());
    frontend::MultichannelWave wave;
    wave.sample_rate = cfg.sample_rate;
    const std::size_t n = s.size();
    wave.samples = Tensor({1, n}, std::move(s));
    out.push_back(std::move(wave));
  }
  return out;
}

}  // namespace mcsa::sim
