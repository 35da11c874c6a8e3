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

// Word error rate, token- and sentence-level speaker error rates, and
// speaker-counting confusion tables.

#ifndef MCSA_METRICS_HPP_
#define MCSA_METRICS_HPP_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcsa/sot.hpp"

namespace mcsa::metrics {

enum class EditOp { kMatch, kSubstitution, kInsertion, kDeletion };

struct AlignedPair {
  EditOp op;
  std::optional<std::size_t> ref_index;
  std::optional<std::size_t> hyp_index;
};

struct AlignmentResult {
  std::vector<AlignedPair> ops;
  std::size_t matches = 0;
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t ref_length = 0;

  std::size_t errors() const { return substitutions + insertions + deletions; }
};

// Minimum edit distance alignment with unit costs. Ties in the backtrace
// prefer match, then substitution, then deletion, then insertion.
AlignmentResult align(const std::vector<std::string>& ref,
                      const std::vector<std::string>& hyp);

// Removes "<sc>" tokens.
std::vector<std::string> strip_separators(const std::vector<std::string>& tokens);

// 100·(S + I + D) / N_ref over separator-stripped sequences. Throws on an
// empty reference.
double wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

struct SerConventions {
  // Count inserted and deleted words as speaker errors in T-SER.
  bool count_insertions_deletions = true;
};

// Token-level speaker error rate: words are aligned with separators removed;
// matched and substituted pairs with different speaker labels are errors,
// as are insertions and deletions. Divided by the reference word count.
double t_ser(const sot::SotTranscript& ref, const sot::SotTranscript& hyp,
             const SerConventions& conv = {});

// Speaker of a sentence: most frequent label, ties to the label seen first.
std::string majority_speaker(const std::vector<std::string>& labels);

// Sentence-level speaker error rate: each sentence (split on "<sc>") gets its
// majority speaker; sentences are paired by order; mismatched pairs plus
// unpaired sentences on either side, over the reference sentence count.
double s_ser(const sot::SotTranscript& ref, const sot::SotTranscript& hyp);

inline constexpr std::size_t kCountRows = 4;     // reference 1..4
inline constexpr std::size_t kCountColumns = 5;  // estimate 1, 2, 3, 4, >4

struct CountingTable {
  // counts[r][c]: reference r+1 speakers, estimate column c.
  std::array<std::array<std::size_t, kCountColumns>, kCountRows> counts{};
  std::array<std::array<double, kCountColumns>, kCountRows> percent{};
  std::array<std::size_t, kCountRows> row_totals{};
  std::array<double, kCountRows> accuracy{};  // diagonal, %
  std::size_t skipped = 0;  // references outside 1..4

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Column of an estimated count: 1..4 map to 0..3, larger to 4. An estimate of
// zero speakers (empty output) is placed in column 0.
std::size_t count_column(std::size_t estimated);

CountingTable speaker_counting_accuracy(const std::vector<std::size_t>& ref_counts,
                                        const std::vector<std::size_t>& hyp_counts);

struct ScoreTotals {
  std::size_t ref_words = 0;
  std::size_t word_errors = 0;
  std::size_t speaker_token_errors = 0;
  std::size_t ref_sentences = 0;
  std::size_t sentence_errors = 0;
  std::size_t utterances = 0;

  void add(const ScoreTotals& o);
  double wer() const;
  double t_ser() const;
  double s_ser() const;
  nlohmann::json to_json() const;
};

// Raw error counts for one reference/hypothesis pair.
ScoreTotals score_pair(const sot::SotTranscript& ref, const sot::SotTranscript& hyp,
                       const SerConventions& conv = {});

struct ScoreReport {
  ScoreTotals overall;
  std::map<std::size_t, ScoreTotals> by_speaker_count;  // reference count
  CountingTable counting;

  nlohmann::json to_json(bool per_speaker_count) const;
  std::string to_table(bool per_speaker_count) const;
};

ScoreReport score_corpus(const std::vector<sot::SotTranscript>& refs,
                         const std::vector<sot::SotTranscript>& hyps,
                         const SerConventions& conv = {});

}  // namespace mcsa::metrics

#endif  // MCSA_METRICS_HPP_
