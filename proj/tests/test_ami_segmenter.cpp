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

#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "mcsa/ami_segmenter.hpp"
#include "meetings.hpp"

namespace mcsa::segmenter {
namespace {

// Cells of 10 ms covered by two or more speakers, merged into runs.
std::vector<Interval> grid_overlaps(const std::vector<WordAnnotation>& words) {
  long last = 0;
  for (const auto& w : words) last = std::max(last, std::lround(w.end_s * 100));
  std::vector<Interval> out;
  bool open = false;
  for (long c = 0; c <= last; ++c) {
    std::set<std::string> active;
    for (const auto& w : words)
      if (std::lround(w.start_s * 100) <= c && std::lround(w.end_s * 100) >= c + 1) active.insert(w.speaker_id);
    const bool hit = active.size() >= 2;
    if (hit && !open) out.push_back({c / 100.0, 0.0});
    if (!hit && open) out.back().end_s = c / 100.0;
    open = hit;
  }
  return out;
}

bool strictly_inside(double t, double lo, double hi) { return lo < t && t < hi; }

TEST_CASE("overlap regions agree with the 10 ms grid") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const auto words = testing::random_meeting(rng, 1 + trial % 4, 30.0);
    const auto got = find_overlap_regions(words);
    const auto want = grid_overlaps(words);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].start_s == doctest::Approx(want[i].start_s).epsilon(1e-12));
      CHECK(got[i].end_s == doctest::Approx(want[i].end_s).epsilon(1e-12));
    }
  }
}

TEST_CASE("overlap edge cases") {
  // Touching words of different speakers do not overlap.
  CHECK(find_overlap_regions({{"a", "A", 0.0, 1.0}, {"b", "B", 1.0, 2.0}}).empty());
  // One speaker overlapping itself is not an overlap.
  CHECK(find_overlap_regions({{"a", "A", 0.0, 1.0}, {"b", "A", 0.5, 2.0}}).empty());
  // A hand-over under a third speaker is one region.
  const auto r = find_overlap_regions(
      {{"a", "A", 0.0, 1.0}, {"b", "B", 1.0, 2.0}, {"c", "C", 0.5, 1.5}});
  REQUIRE(r.size() == 1);
  CHECK(r[0].start_s == 0.5);
  CHECK(r[0].end_s == 1.5);
}

TEST_CASE("boundary adjustment rules") {
  const SegmentationConfig cfg;
  const std::vector<WordAnnotation> words = {
      {"a", "A", 1.0, 2.0}, {"b", "A", 6.0, 7.0}, {"c", "B", 6.5, 8.0}, {"d", "A", 20.0, 21.0}};
  const auto ov = find_overlap_regions(words);
  REQUIRE(ov.size() == 1);
  // Inside a word: start snaps to the word start, end to the word end.
  CHECK(adjust_start(1.5, ov, words, cfg, 0.0) == 1.0);
  CHECK(adjust_end(1.5, ov, words, cfg, 21.0) == 2.0);
  // Inside an overlap: margin outside the region, then word snapping.
  CHECK(adjust_start(6.8, ov, words, cfg, 0.0) == doctest::Approx(4.5));
  CHECK(adjust_end(6.8, ov, words, cfg, 21.0) == doctest::Approx(9.0));
  // Already clean boundaries stay.
  CHECK(adjust_start(3.0, ov, words, cfg, 0.0) == 3.0);
  CHECK(adjust_end(10.0, ov, words, cfg, 21.0) == 10.0);
  // Margins clamp at the meeting edges.
  const std::vector<WordAnnotation> early = {{"a", "A", 0.5, 1.5}, {"b", "B", 1.0, 2.0}};
  const auto ov2 = find_overlap_regions(early);
  CHECK(adjust_start(1.2, ov2, early, cfg, 0.0) == 0.0);
  CHECK(adjust_end(1.2, ov2, early, cfg, 2.0) == 2.0);
}

TEST_CASE("unresolved boundaries fall back to the meeting edge") {
  // A chain of staggered overlaps: each margin move lands in the next region.
  std::vector<WordAnnotation> words;
  for (int i = 0; i < 12; ++i) {
    const double t = 2.0 * i;
    words.push_back({"x", "A", t, t + 1.5});
    words.push_back({"y", "B", t + 1.0, t + 2.2});
  }
  const auto ov = find_overlap_regions(words);
  SegmentationConfig cfg;
  cfg.overlap_margin_s = 0.1;
  cfg.max_iterations = 2;
  CHECK(adjust_start(20.3, ov, words, cfg, 0.0) == 0.0);
  CHECK(adjust_end(3.3, ov, words, cfg, 24.2) == doctest::Approx(24.2));
  cfg.max_iterations = 100;
  const double s = adjust_start(20.3, ov, words, cfg, 0.0);
  for (const auto& w : words) CHECK_FALSE(strictly_inside(s, w.start_s, w.end_s));
}

TEST_CASE("segmented groups satisfy the boundary invariants") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const auto words = testing::random_meeting(rng, 1 + trial % 4, 120.0);
    const auto ov = find_overlap_regions(words);
    double meeting_end = 0.0;
    for (const auto& w : words) meeting_end = std::max(meeting_end, w.end_s);
    const auto groups = segment_meeting(words, {});
    REQUIRE_FALSE(groups.empty());
    std::set<std::vector<std::string>> keys;
    std::set<std::string> covered;
    for (const auto& g : groups) {
      CHECK(g.start_s < g.end_s);
      CHECK(g.start_s >= 0.0);
      CHECK(g.end_s <= meeting_end + 1e-12);
      for (const auto& r : ov) {
        CHECK_FALSE(strictly_inside(g.start_s, r.start_s, r.end_s));
        CHECK_FALSE(strictly_inside(g.end_s, r.start_s, r.end_s));
      }
      std::vector<std::string> key;
      std::set<std::string> speakers;
      for (const auto& w : words) {
        CHECK_FALSE(strictly_inside(g.start_s, w.start_s, w.end_s));
        CHECK_FALSE(strictly_inside(g.end_s, w.start_s, w.end_s));
      }
      REQUIRE_FALSE(g.words.empty());
      for (std::size_t i = 0; i < g.words.size(); ++i) {
        const auto& w = g.words[i];
        CHECK(w.start_s >= g.start_s);
        CHECK(w.end_s <= g.end_s);
        if (i > 0) CHECK(g.words[i - 1].start_s <= w.start_s);
        speakers.insert(w.speaker_id);
        const std::string id = w.speaker_id + "/" + w.word;
        key.push_back(id);
        covered.insert(id);
      }
      // Every word inside the window is in the group.
      std::size_t inside = 0;
      for (const auto& w : words) inside += (w.start_s >= g.start_s && w.end_s <= g.end_s);
      CHECK(inside == g.words.size());
      CHECK(g.n_speakers == speakers.size());
      CHECK(keys.insert(key).second);
      const auto t = group_transcript(g);
      CHECK(sot::speaker_count(t.tokens) == g.n_speakers);
      CHECK_NOTHROW(t.validate());
    }
    // Windows only grow, so every word lands in some group.
    CHECK(covered.size() == words.size());
  }
}

TEST_CASE("group utterances and transcript") {
  UtteranceGroup g;
  g.start_s = 0.0;
  g.end_s = 5.0;
  g.words = {{"hi", "B", 0.2, 0.5}, {"yo", "A", 0.4, 0.7}, {"there", "B", 0.8, 1.0}, {"x", "C", 0.2, 0.3}};
  g.n_speakers = 3;
  const auto utts = group_utterances(g);
  REQUIRE(utts.size() == 3);
  CHECK(utts[0].speaker_id == "B");
  CHECK(utts[0].words == std::vector<std::string>{"hi", "there"});
  CHECK(utts[0].end_s == 1.0);
  // B and C tie at 0.2 and are ordered by id.
  const auto t = group_transcript(g);
  CHECK(t.tokens == std::vector<std::string>{"hi", "there", "<sc>", "x", "<sc>", "yo"});
}

TEST_CASE("dataset statistics") {
  std::vector<UtteranceGroup> groups(3);
  groups[0] = {0.0, 4.0, {{"a", "A", 0, 1}}, 1};
  groups[1] = {0.0, 6.0, {{"a", "A", 0, 1}, {"b", "B", 1, 2}}, 2};
  groups[2] = {0.0, 8.0, {{"a", "A", 0, 1}}, 1};
  const auto s = dataset_stats(groups);
  CHECK(s.total.segments == 3);
  CHECK(s.total.words == 4);
  CHECK(s.total.total_duration_s == 18.0);
  CHECK(s.by_speakers.at(1).average_duration_s() == 6.0);
  CHECK(s.by_speakers.at(2).segments == 1);
  CHECK(s.total.total_duration_h() == doctest::Approx(18.0 / 3600.0));
  CHECK(s.to_json().contains("total"));
  CHECK(s.to_table().find("total") != std::string::npos);
}

TEST_CASE("word annotation input") {
  std::istringstream ok(
      "{\"word\": \"hi\", \"speaker\": \"A\", \"start_s\": 0.1, \"end_s\": 0.4}\n"
      "\n"
      "{\"word\": \"yo\", \"speaker\": \"B\", \"start_s\": 0.3, \"end_s\": 0.6}\n");
  const auto words = read_word_annotations(ok);
  REQUIRE(words.size() == 2);
  CHECK(words[1].speaker_id == "B");
  std::istringstream reversed("{\"word\": \"hi\", \"speaker\": \"A\", \"start_s\": 0.5, \"end_s\": 0.4}\n");
  CHECK_THROWS(read_word_annotations(reversed));
  std::istringstream junk("not json\n");
  CHECK_THROWS(read_word_annotations(junk));
  SegmentationConfig bad;
  bad.hop_s = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("group JSON round trip") {
  std::mt19937_64 rng(31);
  const auto groups = segment_meeting(testing::random_meeting(rng, 3, 30.0), {});
  REQUIRE(!groups.empty());
  for (const auto& g : groups) {
    const auto back = group_from_json(to_json(g));
    CHECK(back.start_s == g.start_s);
    CHECK(back.end_s == g.end_s);
    CHECK(back.n_speakers == g.n_speakers);
    REQUIRE(back.words.size() == g.words.size());
    CHECK(group_transcript(back).tokens == group_transcript(g).tokens);
  }
  auto broken = to_json(groups[0]);
  broken.erase("words");
  CHECK_THROWS(group_from_json(broken));
}

}  // namespace
}  // namespace mcsa::segmenter
