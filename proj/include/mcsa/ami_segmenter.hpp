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

// Meeting segmentation into utterance groups: fixed chunk/hop windows whose
// boundaries are pushed out of speaker-overlap regions and word interiors.

#ifndef MCSA_AMI_SEGMENTER_HPP_
#define MCSA_AMI_SEGMENTER_HPP_

#include <istream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcsa/sot.hpp"

namespace mcsa::segmenter {

struct WordAnnotation {
  std::string word;
  std::string speaker_id;
  double start_s = 0.0;
  double end_s = 0.0;

  void validate() const;
};

struct SegmentationConfig {
  double chunk_s = 5.0;
  double hop_s = 5.0;
  double overlap_margin_s = 2.0;
  int max_iterations = 10;

  void validate() const;
};

struct Interval {
  double start_s = 0.0;
  double end_s = 0.0;
};

struct UtteranceGroup {
  double start_s = 0.0;
  double end_s = 0.0;
  std::vector<WordAnnotation> words;  // sorted by start
  std::size_t n_speakers = 0;

  double duration_s() const { return end_s - start_s; }
};

// Maximal intervals where words of two or more distinct speakers are active
// at once. Touching words (one ends where the other starts) do not overlap.
std::vector<Interval> find_overlap_regions(std::vector<WordAnnotation> words);

// Boundary adjustment for one window. Starts move earlier, ends later:
// inside an overlap region -> margin beyond the region edge; inside a word ->
// that word's start or end. Repeated up to cfg.max_iterations rounds; a
// boundary still unresolved after that is moved to the meeting edge.
double adjust_start(double t, const std::vector<Interval>& overlaps,
                    const std::vector<WordAnnotation>& words,
                    const SegmentationConfig& cfg, double meeting_start);
double adjust_end(double t, const std::vector<Interval>& overlaps,
                  const std::vector<WordAnnotation>& words,
                  const SegmentationConfig& cfg, double meeting_end);

// Windows [k·hop, k·hop + chunk) for k = 0, 1, ... while k·hop is before the
// last word end, the end clipped to that last word end, adjusted as above.
// Groups without words are dropped and groups with identical word sets are
// kept once.
std::vector<UtteranceGroup> segment_meeting(std::vector<WordAnnotation> words,
                                            const SegmentationConfig& cfg);

// One utterance per speaker holding that speaker's words in time order.
std::vector<sot::Utterance> group_utterances(const UtteranceGroup& g);
sot::SotTranscript group_transcript(const UtteranceGroup& g);

struct StatsBucket {
  std::size_t segments = 0;
  double total_duration_s = 0.0;
  std::size_t words = 0;

  double average_duration_s() const;
  double total_duration_h() const { return total_duration_s / 3600.0; }
};

struct DatasetStats {
  std::map<std::size_t, StatsBucket> by_speakers;
  StatsBucket total;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

DatasetStats dataset_stats(const std::vector<UtteranceGroup>& groups);

// One JSON object per line: {"word", "speaker", "start_s", "end_s"}.
std::vector<WordAnnotation> read_word_annotations(std::istream& in);

nlohmann::json to_json(const UtteranceGroup& g);
UtteranceGroup group_from_json(const nlohmann::json& j);

}  // namespace mcsa::segmenter

#endif  // MCSA_AMI_SEGMENTER_HPP_
