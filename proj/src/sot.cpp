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

#include "mcsa/sot.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

namespace mcsa::sot {

void Utterance::validate() const {
  if (!(end_s > start_s)) {
    throw std::invalid_argument("utterance of " + speaker_id +
                                ": end must be after start");
  }
  if (words.empty()) {
    throw std::invalid_argument("utterance of " + speaker_id + " has no words");
  }
}

void SotTranscript::validate() const {
  if (tokens.size() != token_speakers.size()) {
    throw std::invalid_argument("transcript: " + std::to_string(tokens.size()) +
                                " tokens but " +
                                std::to_string(token_speakers.size()) +
                                " speaker labels");
  }
  const auto sentences = deserialize(*this);
  for (std::size_t i = 1; i < sentences.size(); ++i) {
    if (sentences[i].speaker_id == sentences[i - 1].speaker_id) {
      throw std::invalid_argument("transcript: consecutive segments share speaker " +
                                  sentences[i].speaker_id);
    }
  }
  // Every token of a segment, including its closing separator, carries the
  // segment's speaker.
  std::size_t seg = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (token_speakers[i] != sentences[seg].speaker_id) {
      throw std::invalid_argument("transcript: token " + std::to_string(i) +
                                  " labelled " + token_speakers[i] +
                                  " inside a segment of " +
                                  sentences[seg].speaker_id);
    }
    if (tokens[i] == kSpeakerChange) ++seg;
  }
}

SotTranscript serialize_fifo(std::vector<Utterance> utterances, TieBreak ties) {
  for (const auto& u : utterances) u.validate();
  std::map<std::string, double> first_start;
  for (const auto& u : utterances) {
    auto it = first_start.find(u.speaker_id);
    if (it == first_start.end()) {
      first_start.emplace(u.speaker_id, u.start_s);
    } else {
      it->second = std::min(it->second, u.start_s);
    }
  }
  std::vector<std::pair<double, std::string>> order;
  for (const auto& [spk, t] : first_start) order.emplace_back(t, spk);
  std::sort(order.begin(), order.end());
  for (std::size_t i = 1; i < order.size() && ties == TieBreak::kReject; ++i) {
    if (order[i].first == order[i - 1].first) {
      throw std::invalid_argument("serialize_fifo: speakers " +
                                  order[i - 1].second + " and " +
                                  order[i].second + " share start time " +
                                  std::to_string(order[i].first));
    }
  }
  std::stable_sort(utterances.begin(), utterances.end(),
                   [](const Utterance& a, const Utterance& b) {
                     return a.start_s < b.start_s;
                   });

  SotTranscript out;
  for (std::size_t s = 0; s < order.size(); ++s) {
    const std::string& spk = order[s].second;
    if (s > 0) {
      // The separator closes the previous speaker's sentence.
      out.tokens.push_back(kSpeakerChange);
      out.token_speakers.push_back(order[s - 1].second);
    }
    for (const auto& u : utterances) {
      if (u.speaker_id != spk) continue;
      for (const auto& w : u.words) {
        out.tokens.push_back(w);
        out.token_speakers.push_back(spk);
      }
    }
  }
  out.utterances = std::move(utterances);
  return out;
}

std::vector<Sentence> deserialize(const SotTranscript& t) {
  if (t.tokens.size() != t.token_speakers.size()) {
    throw std::invalid_argument("deserialize: label-length mismatch");
  }
  std::vector<Sentence> out;
  if (t.tokens.empty()) return out;
  if (t.tokens.front() == kSpeakerChange) {
    throw std::invalid_argument("deserialize: leading <sc>");
  }
  if (t.tokens.back() == kSpeakerChange) {
    throw std::invalid_argument("deserialize: trailing <sc>");
  }
  Sentence cur;
  for (std::size_t i = 0; i < t.tokens.size(); ++i) {
    if (t.tokens[i] == kSpeakerChange) {
      if (cur.words.empty()) throw std::invalid_argument("deserialize: double <sc>");
      out.push_back(std::move(cur));
      cur = Sentence{};
      continue;
    }
    if (cur.words.empty()) cur.speaker_id = t.token_speakers[i];
    cur.words.push_back(t.tokens[i]);
  }
  out.push_back(std::move(cur));
  return out;
}

std::size_t speaker_count(std::span<const std::string> tokens) {
  if (tokens.empty()) return 0;
  return 1 + static_cast<std::size_t>(
                 std::count(tokens.begin(), tokens.end(), kSpeakerChange));
}

nlohmann::json to_json(const Utterance& u) {
  return {{"speaker", u.speaker_id},
          {"start_s", u.start_s},
          {"end_s", u.end_s},
          {"words", u.words}};
}

Utterance utterance_from_json(const nlohmann::json& j) {
  Utterance u;
  u.speaker_id = j.at("speaker").get<std::string>();
  u.start_s = j.at("start_s").get<double>();
  u.end_s = j.at("end_s").get<double>();
  u.words = j.at("words").get<std::vector<std::string>>();
  return u;
}

nlohmann::json to_json(const SotTranscript& t) {
  nlohmann::json utts = nlohmann::json::array();
  for (const auto& u : t.utterances) utts.push_back(to_json(u));
  return {{"tokens", t.tokens}, {"speakers", t.token_speakers}, {"utterances", utts}};
}

SotTranscript transcript_from_json(const nlohmann::json& j) {
  SotTranscript t;
  t.tokens = j.at("tokens").get<std::vector<std::string>>();
  t.token_speakers = j.at("speakers").get<std::vector<std::string>>();
  if (j.contains("utterances")) {
    for (const auto& u : j.at("utterances")) {
      t.utterances.push_back(utterance_from_json(u));
    }
  }
  if (t.tokens.size() != t.token_speakers.size()) {
    throw std::invalid_argument("transcript JSON: tokens/speakers length mismatch");
  }
  return t;
}

void write_transcript(const std::string& path, const SotTranscript& t) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << to_json(t).dump(2) << "\n";
}

SotTranscript read_transcript(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return transcript_from_json(nlohmann::json::parse(is));
}

}  // namespace mcsa::sot
