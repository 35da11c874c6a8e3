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

#include <fstream>
#include <map>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "mcsa/metrics.hpp"
#include "oracles.hpp"

namespace mcsa::metrics {
namespace {

using Words = std::vector<std::string>;

Words random_words(std::mt19937_64& rng, std::size_t max_len, int alphabet) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> sym(0, alphabet - 1);
  Words w(len(rng));
  for (auto& s : w) s = std::string(1, static_cast<char>('a' + sym(rng)));
  return w;
}

sot::SotTranscript transcript(const nlohmann::json& tokens, const nlohmann::json& speakers) {
  return {tokens.get<Words>(), speakers.get<Words>(), {}};
}

TEST_CASE("alignment cost equals the edit distance and the ops are consistent") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 2000; ++trial) {
    const Words ref = random_words(rng, 8, 3), hyp = random_words(rng, 8, 3);
    const auto r = align(ref, hyp);
    CHECK(r.errors() == oracle::levenshtein(ref, hyp));
    CHECK(r.ref_length == ref.size());
    std::size_t next_ref = 0, next_hyp = 0, m = 0, s = 0, in = 0, de = 0;
    for (const auto& p : r.ops) {
      switch (p.op) {
        case EditOp::kMatch:
        case EditOp::kSubstitution:
          REQUIRE(p.ref_index.has_value());
          REQUIRE(p.hyp_index.has_value());
          CHECK(*p.ref_index == next_ref++);
          CHECK(*p.hyp_index == next_hyp++);
          CHECK((ref[*p.ref_index] == hyp[*p.hyp_index]) == (p.op == EditOp::kMatch));
          (p.op == EditOp::kMatch ? m : s)++;
          break;
        case EditOp::kDeletion:
          REQUIRE(p.ref_index.has_value());
          CHECK_FALSE(p.hyp_index.has_value());
          CHECK(*p.ref_index == next_ref++);
          ++de;
          break;
        case EditOp::kInsertion:
          REQUIRE(p.hyp_index.has_value());
          CHECK_FALSE(p.ref_index.has_value());
          CHECK(*p.hyp_index == next_hyp++);
          ++in;
          break;
      }
    }
    CHECK(next_ref == ref.size());
    CHECK(next_hyp == hyp.size());
    CHECK(m == r.matches);
    CHECK(s == r.substitutions);
    CHECK(in == r.insertions);
    CHECK(de == r.deletions);
  }
}

TEST_CASE("edit distance is a metric") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const Words a = random_words(rng, 7, 3), b = random_words(rng, 7, 3), c = random_words(rng, 7, 3);
    const auto ab = align(a, b).errors(), bc = align(b, c).errors(), ac = align(a, c).errors();
    CHECK(ac <= ab + bc);
    CHECK(ab == align(b, a).errors());
    CHECK(align(a, a).errors() == 0);
  }
}

TEST_CASE("tie preference") {
  const auto sub = align({"a"}, {"b"});
  REQUIRE(sub.ops.size() == 1);
  CHECK(sub.ops[0].op == EditOp::kSubstitution);
  const auto swap = align({"a", "b", "c"}, {"b", "a", "c"});
  CHECK(swap.substitutions == 2);
  CHECK(swap.insertions + swap.deletions == 0);
}

TEST_CASE("golden cases") {
  std::ifstream in(std::string(MCSA_TEST_DATA_DIR) + "/metrics_golden.json");
  REQUIRE(in.good());
  const auto golden = nlohmann::json::parse(in);
  const auto& cases = golden["cases"];
  REQUIRE(cases.size() == 12);
  std::vector<sot::SotTranscript> refs, hyps;
  for (const auto& c : cases) {
    INFO(c["name"].get<std::string>());
    const auto ref = transcript(c["ref"], c["ref_spk"]);
    const auto hyp = transcript(c["hyp"], c["hyp_spk"]);
    CHECK(wer(ref.tokens, hyp.tokens) == doctest::Approx(c["wer"].get<double>()).epsilon(1e-12));
    CHECK(t_ser(ref, hyp) == doctest::Approx(c["t_ser"].get<double>()).epsilon(1e-12));
    CHECK(t_ser(ref, hyp, {false}) ==
          doctest::Approx(c["t_ser_no_insdel"].get<double>()).epsilon(1e-12));
    CHECK(s_ser(ref, hyp) == doctest::Approx(c["s_ser"].get<double>()).epsilon(1e-12));
    CHECK(sot::speaker_count(ref.tokens) == c["ref_count"].get<std::size_t>());
    CHECK(sot::speaker_count(hyp.tokens) == c["hyp_count"].get<std::size_t>());
    refs.push_back(ref);
    hyps.push_back(hyp);
  }
  const auto report = score_corpus(refs, hyps);
  const auto& corpus = golden["corpus"];
  CHECK(report.overall.ref_words == corpus["ref_words"].get<std::size_t>());
  CHECK(report.overall.word_errors == corpus["word_errors"].get<std::size_t>());
  CHECK(report.overall.speaker_token_errors == corpus["speaker_token_errors"].get<std::size_t>());
  CHECK(report.overall.ref_sentences == corpus["ref_sentences"].get<std::size_t>());
  CHECK(report.overall.sentence_errors == corpus["sentence_errors"].get<std::size_t>());
  CHECK(report.overall.wer() == doctest::Approx(corpus["wer"].get<double>()).epsilon(1e-12));
  CHECK(report.overall.t_ser() == doctest::Approx(corpus["t_ser"].get<double>()).epsilon(1e-12));
  CHECK(report.overall.s_ser() == doctest::Approx(corpus["s_ser"].get<double>()).epsilon(1e-12));
  const auto& counting = golden["counting"];
  for (std::size_t r = 0; r < kCountRows; ++r) {
    for (std::size_t c = 0; c < kCountColumns; ++c)
      CHECK(report.counting.counts[r][c] == counting["counts"][r][c].get<std::size_t>());
    CHECK(report.counting.accuracy[r] ==
          doctest::Approx(counting["accuracy"][r].get<double>()).epsilon(1e-12));
  }
}

TEST_CASE("speaker error rates ignore speaker names") {
  std::mt19937_64 rng(3);
  const Words names = {"A", "B", "C"};
  std::uniform_int_distribution<int> pick(0, 2);
  for (int trial = 0; trial < 300; ++trial) {
    sot::SotTranscript ref, hyp;
    for (auto* t : {&ref, &hyp}) {
      t->tokens = random_words(rng, 8, 4);
      if (t == &ref && t->tokens.empty()) t->tokens = {"a"};
      for (std::size_t i = 0; i < t->tokens.size(); ++i) t->token_speakers.push_back(names[pick(rng)]);
    }
    const std::map<std::string, std::string> rename = {{"A", "zed"}, {"B", "yan"}, {"C", "xu"}};
    auto relabel = [&](sot::SotTranscript t) {
      for (auto& s : t.token_speakers) s = rename.at(s);
      return t;
    };
    CHECK(t_ser(ref, hyp) == doctest::Approx(t_ser(relabel(ref), relabel(hyp))));
    CHECK(s_ser(ref, hyp) == doctest::Approx(s_ser(relabel(ref), relabel(hyp))));
    CHECK(t_ser(ref, ref) == 0.0);
    CHECK(s_ser(ref, ref) == 0.0);
  }
}

TEST_CASE("WER ignores separators and rejects an empty reference") {
  CHECK(wer({"a", "<sc>", "b"}, {"a", "b"}) == 0.0);
  CHECK(strip_separators({"<sc>", "a", "<sc>"}) == Words{"a"});
  CHECK_THROWS_AS(wer({}, {"a"}), std::invalid_argument);
  CHECK_THROWS_AS(wer({"<sc>"}, {"a"}), std::invalid_argument);
}

TEST_CASE("majority speaker breaks ties by first occurrence") {
  CHECK(majority_speaker({"B", "A", "A"}) == "A");
  CHECK(majority_speaker({"B", "A", "A", "B"}) == "B");
  CHECK(majority_speaker({"C"}) == "C");
}

TEST_CASE("counting table recount") {
  CHECK(count_column(0) == 0);
  CHECK(count_column(1) == 0);
  CHECK(count_column(4) == 3);
  CHECK(count_column(5) == 4);
  CHECK(count_column(9) == 4);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> r(0, 5), h(0, 7);
  std::vector<std::size_t> refs(400), hyps(400);
  for (std::size_t i = 0; i < 400; ++i) {
    refs[i] = r(rng);
    hyps[i] = h(rng);
  }
  const auto table = speaker_counting_accuracy(refs, hyps);
  std::size_t skipped = 0;
  std::array<std::array<std::size_t, 5>, 4> want{};
  for (std::size_t i = 0; i < 400; ++i) {
    if (refs[i] < 1 || refs[i] > 4) {
      ++skipped;
      continue;
    }
    const std::size_t col = hyps[i] == 0 ? 0 : std::min<std::size_t>(hyps[i], 5) - 1;
    ++want[refs[i] - 1][col];
  }
  CHECK(table.skipped == skipped);
  for (std::size_t row = 0; row < 4; ++row) {
    std::size_t total = 0;
    double pct = 0.0;
    for (std::size_t col = 0; col < 5; ++col) {
      CHECK(table.counts[row][col] == want[row][col]);
      total += want[row][col];
      pct += table.percent[row][col];
    }
    CHECK(table.row_totals[row] == total);
    if (total > 0) {
      CHECK(pct == doctest::Approx(100.0));
      CHECK(table.accuracy[row] == doctest::Approx(100.0 * want[row][row] / total));
    }
  }
  CHECK_THROWS_AS(speaker_counting_accuracy({1, 2}, {1}), std::invalid_argument);
  const auto j = table.to_json();
  REQUIRE(j["rows"].size() == 4);
  CHECK(j["rows"][1]["counts"][1].get<std::size_t>() == table.counts[1][1]);
  CHECK(table.to_csv().find('\n') != std::string::npos);
}

TEST_CASE("corpus totals are sums of pair counts") {
  const std::vector<sot::SotTranscript> refs = {
      {{"a", "b"}, {"A", "A"}, {}},
      {{"a", "<sc>", "b"}, {"A", "A", "B"}, {}},
      {{"c", "<sc>", "d", "e"}, {"A", "A", "B", "B"}, {}},
  };
  const std::vector<sot::SotTranscript> hyps = {
      {{"a", "b"}, {"A", "A"}, {}},
      {{"a", "b"}, {"A", "B"}, {}},
      {{"c", "<sc>", "x", "<sc>", "e"}, {"A", "A", "B", "B", "C"}, {}},
  };
  const auto report = score_corpus(refs, hyps);
  ScoreTotals sum;
  for (std::size_t i = 0; i < 3; ++i) sum.add(score_pair(refs[i], hyps[i]));
  CHECK(report.overall.ref_words == sum.ref_words);
  CHECK(report.overall.word_errors == sum.word_errors);
  CHECK(report.overall.speaker_token_errors == sum.speaker_token_errors);
  CHECK(report.overall.sentence_errors == sum.sentence_errors);
  CHECK(report.overall.utterances == 3);
  CHECK(report.overall.wer() == doctest::Approx(100.0 * 1 / 7));
  REQUIRE(report.by_speaker_count.count(1) == 1);
  REQUIRE(report.by_speaker_count.count(2) == 1);
  CHECK(report.by_speaker_count.at(2).utterances == 2);
  CHECK(report.counting.counts[0][0] == 1);
  CHECK(report.counting.counts[1][0] == 1);
  CHECK(report.counting.counts[1][2] == 1);
  const auto j = report.to_json(true);
  CHECK(j.contains("by_speaker_count"));
  CHECK(j["by_speaker_count"].contains("2-speaker"));
  CHECK_FALSE(report.to_json(false).contains("by_speaker_count"));
  CHECK(report.to_table(true).find("combined") != std::string::npos);
  CHECK_THROWS_AS(score_corpus(refs, {hyps[0]}), std::invalid_argument);
}

}  // namespace
}  // namespace mcsa::metrics
