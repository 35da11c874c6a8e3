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

// Serialized multi-speaker transcripts: every speaker's words concatenated in
// order of first onset, consecutive speakers separated by "<sc>".

#ifndef MCSA_SOT_HPP_
#define MCSA_SOT_HPP_

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace mcsa::sot {

inline const std::string kSpeakerChange = "<sc>";

struct Utterance {
  std::string speaker_id;
  double start_s = 0.0;
  double end_s = 0.0;
  std::vector<std::string> words;

  void validate() const;
};

struct SotTranscript {
  std::vector<std::string> tokens;
  // One label per token; a "<sc>" carries the speaker it terminates.
  std::vector<std::string> token_speakers;
  // Source utterances, when known (kept for the JSON round trip).
  std::vector<Utterance> utterances;

  // Checks the reference-transcript invariants: equal lengths, no leading,
  // trailing or doubled separator, one speaker per segment, and distinct
  // speakers in consecutive segments.
  void validate() const;
};

struct Sentence {
  std::string speaker_id;
  std::vector<std::string> words;
};

enum class TieBreak {
  kReject,      // throw std::invalid_argument
  kSpeakerId,   // lexicographic speaker id
};

// Orders speakers by first start time, concatenates each speaker's
// utterances in time order and inserts "<sc>" between speakers. Speakers
// sharing a first start time are handled per `ties`.
SotTranscript serialize_fifo(std::vector<Utterance> utterances,
                             TieBreak ties = TieBreak::kReject);

// Splits on "<sc>". Throws std::invalid_argument on a leading, trailing or
// doubled separator or on a label-length mismatch.
std::vector<Sentence> deserialize(const SotTranscript& t);

// (# of "<sc>") + 1, or 0 for an empty sequence.
std::size_t speaker_count(std::span<const std::string> tokens);

nlohmann::json to_json(const SotTranscript& t);
SotTranscript transcript_from_json(const nlohmann::json& j);
void write_transcript(const std::string& path, const SotTranscript& t);
SotTranscript read_transcript(const std::string& path);

nlohmann::json to_json(const Utterance& u);
Utterance utterance_from_json(const nlohmann::json& j);

}  // namespace mcsa::sot

#endif  // MCSA_SOT_HPP_
