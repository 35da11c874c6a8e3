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

#include "mcsa/ami_segmenter.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mcsa::segmenter {

void WordAnnotation::validate() const {
  if (!(end_s > start_s)) {
    throw std::invalid_argument("word '" + word + "' ends before it starts");
  }
  if (speaker_id.empty()) throw std::invalid_argument("word '" + word + "' has no speaker");
}

void SegmentationConfig::validate() const {
  if (!(chunk_s > 0.0) || !(hop_s > 0.0) || !(overlap_margin_s >= 0.0)) {
    throw std::invalid_argument("segmentation: chunk and hop must be positive");
  }
  if (hop_s > chunk_s) throw std::invalid_argument("segmentation: hop exceeds chunk");
  if (max_iterations < 1) throw std::invalid_argument("segmentation: max_iterations < 1");
}

namespace {

bool by_start(const WordAnnotation& a, const WordAnnotation& b) {
  if (a.start_s != b.start_s) return a.start_s < b.start_s;
  if (a.end_s != b.end_s) return a.end_s < b.end_s;
  return a.speaker_id < b.speaker_id;
}

bool strictly_inside(double t, double lo, double hi) { return lo < t && t < hi; }

}  // namespace

std::vector<Interval> find_overlap_regions(std::vector<WordAnnotation> words) {
  std::sort(words.begin(), words.end(), by_start);
  // Per-speaker activity first, so a speaker's own overlapping words count once.
  std::map<std::string, std::vector<Interval>> active;
  for (const auto& w : words) {
    auto& v = active[w.speaker_id];
    if (!v.empty() && w.start_s <= v.back().end_s) {
      v.back().end_s = std::max(v.back().end_s, w.end_s);
    } else {
      v.push_back({w.start_s, w.end_s});
    }
  }
  std::vector<std::pair<double, int>> events;
  for (const auto& [spk, v] : active) {
    for (const auto& iv : v) {
      events.emplace_back(iv.start_s, +1);
      events.emplace_back(iv.end_s, -1);
    }
  }
  // Ends sort before starts at equal times.
  std::sort(events.begin(), events.end());
  std::vector<Interval> out;
  int level = 0;
  double open = 0.0;
  for (const auto& [t, delta] : events) {
    const int prev = level;
    level += delta;
    if (prev < 2 && level >= 2) open = t;
    if (prev >= 2 && level < 2 && t > open) {
      // A hand-over at one instant keeps the region open.
      if (!out.empty() && out.back().end_s == open) {
        out.back().end_s = t;
      } else {
        out.push_back({open, t});
      }
    }
  }
  return out;
}

double adjust_start(double t, const std::vector<Interval>& overlaps,
                    const std::vector<WordAnnotation>& words,
                    const SegmentationConfig& cfg, double meeting_start) {
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const double before = t;
    for (const auto& r : overlaps) {
      if (strictly_inside(t, r.start_s, r.end_s)) {
        t = std::max(meeting_start, r.start_s - cfg.overlap_margin_s);
        break;
      }
    }
    double snap = t;
    for (const auto& w : words) {
      if (strictly_inside(t, w.start_s, w.end_s)) snap = std::min(snap, w.start_s);
    }
    t = snap;
    if (t == before) return t;
  }
  bool clean = true;
  for (const auto& r : overlaps) clean = clean && !strictly_inside(t, r.start_s, r.end_s);
  for (const auto& w : words) clean = clean && !strictly_inside(t, w.start_s, w.end_s);
  return clean ? t : meeting_start;
}

double adjust_end(double t, const std::vector<Interval>& overlaps,
                  const std::vector<WordAnnotation>& words,
                  const SegmentationConfig& cfg, double meeting_end) {
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const double before = t;
    for (const auto& r : overlaps) {
      if (strictly_inside(t, r.start_s, r.end_s)) {
        t = std::min(meeting_end, r.end_s + cfg.overlap_margin_s);
        break;
      }
    }
    double snap = t;
    for (const auto& w : words) {
      if (strictly_inside(t, w.start_s, w.end_s)) snap = std::max(snap, w.end_s);
    }
    t = snap;
    if (t == before) return t;
  }
  bool clean = true;
  for (const auto& r : overlaps) clean = clean && !strictly_inside(t, r.start_s, r.end_s);
  for (const auto& w : words) clean = clean && !strictly_inside(t, w.start_s, w.end_s);
  return clean ? t : meeting_end;
}

std::vector<UtteranceGroup> segment_meeting(std::vector<WordAnnotation> words,
                                            const SegmentationConfig& cfg) {
  cfg.validate();
  if (words.empty()) return {};
  for (const auto& w : words) w.validate();
  std::sort(words.begin(), words.end(), by_start);
  const auto overlaps = find_overlap_regions(words);

  double meeting_start = 0.0, meeting_end = 0.0;
  for (const auto& w : words) {
    meeting_start = std::min(meeting_start, w.start_s);
    meeting_end = std::max(meeting_end, w.end_s);
  }

  std::vector<UtteranceGroup> groups;
  std::set<std::vector<std::size_t>> seen;
  for (std::size_t k = 0;; ++k) {
    const double raw_start = static_cast<double>(k) * cfg.hop_s;
    if (raw_start >= meeting_end) break;
    const double s = adjust_start(raw_start, overlaps, words, cfg, meeting_start);
    const double e = adjust_end(std::min(raw_start + cfg.chunk_s, meeting_end), overlaps, words,
                                cfg, meeting_end);
    UtteranceGroup g;
    g.start_s = s;
    g.end_s = e;
    std::vector<std::size_t> members;
    std::set<std::string> speakers;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (words[i].start_s >= s && words[i].end_s <= e) {
        members.push_back(i);
        g.words.push_back(words[i]);
        speakers.insert(words[i].speaker_id);
      }
    }
    if (members.empty() || !seen.insert(members).second) continue;
    g.n_speakers = speakers.size();
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<sot::Utterance> group_utterances(const UtteranceGroup& g) {
  std::vector<sot::Utterance> out;
  std::map<std::string, std::size_t> index;
  for (const auto& w : g.words) {
    auto it = index.find(w.speaker_id);
    if (it == index.end()) {
      it = index.emplace(w.speaker_id, out.size()).first;
      out.push_back({w.speaker_id, w.start_s, w.end_s, {}});
    }
    auto& u = out[it->second];
    u.words.push_back(w.word);
    u.end_s = std::max(u.end_s, w.end_s);
  }
  return out;
}

sot::SotTranscript group_transcript(const UtteranceGroup& g) {
  // Annotated words of different speakers can start at the same instant.
  return sot::serialize_fifo(group_utterances(g), sot::TieBreak::kSpeakerId);
}

double StatsBucket::average_duration_s() const {
  return segments == 0 ? 0.0 : total_duration_s / static_cast<double>(segments);
}

DatasetStats dataset_stats(const std::vector<UtteranceGroup>& groups) {
  DatasetStats s;
  for (const auto& g : groups) {
    for (StatsBucket* b : {&s.by_speakers[g.n_speakers], &s.total}) {
      ++b->segments;
      b->total_duration_s += g.duration_s();
      b->words += g.words.size();
    }
  }
  return s;
}

namespace {
nlohmann::json bucket_json(const StatsBucket& b) {
  return {{"segments", b.segments},
          {"avg_duration_s", b.average_duration_s()},
          {"total_duration_h", b.total_duration_h()},
          {"words", b.words}};
}
}  // namespace

nlohmann::json DatasetStats::to_json() const {
  nlohmann::json rows = nlohmann::json::object();
  for (const auto& [n, b] : by_speakers) rows[std::to_string(n)] = bucket_json(b);
  return {{"by_speakers", rows}, {"total", bucket_json(total)}};
}

std::string DatasetStats::to_table() const {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-10s %10s %14s %16s %10s\n", "#speakers", "#segments",
                "avg dur (s)", "total dur (h)", "#words");
  os << buf;
  auto row = [&](const std::string& name, const StatsBucket& b) {
    std::snprintf(buf, sizeof(buf), "%-10s %10zu %14.2f %16.2f %10zu\n", name.c_str(),
                  b.segments, b.average_duration_s(), b.total_duration_h(), b.words);
    os << buf;
  };
  for (const auto& [n, b] : by_speakers) row(std::to_string(n), b);
  row("total", total);
  return os.str();
}

std::vector<WordAnnotation> read_word_annotations(std::istream& in) {
  std::vector<WordAnnotation> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      WordAnnotation w{j.at("word").get<std::string>(), j.at("speaker").get<std::string>(),
                       j.at("start_s").get<double>(), j.at("end_s").get<double>()};
      w.validate();
      out.push_back(std::move(w));
    } catch (const std::exception& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

nlohmann::json to_json(const UtteranceGroup& g) {
  nlohmann::json words = nlohmann::json::array();
  for (const auto& w : g.words) {
    words.push_back(
        {{"word", w.word}, {"speaker", w.speaker_id}, {"start_s", w.start_s}, {"end_s", w.end_s}});
  }
  return {{"start_s", g.start_s},
          {"end_s", g.end_s},
          {"n_speakers", g.n_speakers},
          {"words", words},
          {"transcript", sot::to_json(group_transcript(g))}};
}

UtteranceGroup group_from_json(const nlohmann::json& j) {
  UtteranceGroup g;
  g.start_s = j.at("start_s").get<double>();
  g.end_s = j.at("end_s").get<double>();
  g.n_speakers = j.at("n_speakers").get<std::size_t>();
  for (const auto& w : j.at("words")) {
    WordAnnotation a{w.at("word").get<std::string>(), w.at("speaker").get<std::string>(),
                     w.at("start_s").get<double>(), w.at("end_s").get<double>()};
    a.validate();
    g.words.push_back(std::move(a));
  }
  if (!(g.end_s >= g.start_s)) throw std::invalid_argument("group ends before it starts");
  return g;
}

}  // namespace mcsa::segmenter
