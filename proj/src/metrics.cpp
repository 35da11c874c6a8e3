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

#include "mcsa/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mcsa::metrics {

AlignmentResult align(const std::vector<std::string>& ref,
                      const std::vector<std::string>& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::size_t> cost((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& {
    return cost[i * (m + 1) + j];
  };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  AlignmentResult r;
  r.ref_length = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && at(i, j) == at(i - 1, j - 1)) {
      r.ops.push_back({EditOp::kMatch, i - 1, j - 1});
      ++r.matches;
      --i;
      --j;
    } else if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + 1) {
      r.ops.push_back({EditOp::kSubstitution, i - 1, j - 1});
      ++r.substitutions;
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      r.ops.push_back({EditOp::kDeletion, i - 1, std::nullopt});
      ++r.deletions;
      --i;
    } else {
      r.ops.push_back({EditOp::kInsertion, std::nullopt, j - 1});
      ++r.insertions;
      --j;
    }
  }
  std::reverse(r.ops.begin(), r.ops.end());
  return r;
}

std::vector<std::string> strip_separators(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens)
    if (t != sot::kSpeakerChange) out.push_back(t);
  return out;
}

double wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  const auto r = strip_separators(ref);
  if (r.empty()) throw std::invalid_argument("wer: empty reference");
  return 100.0 * static_cast<double>(align(r, strip_separators(hyp)).errors()) /
         static_cast<double>(r.size());
}

namespace {

struct LabelledWords {
  std::vector<std::string> words;
  std::vector<std::string> speakers;
};

LabelledWords words_of(const sot::SotTranscript& t) {
  if (t.tokens.size() != t.token_speakers.size()) {
    throw std::invalid_argument("transcript has " + std::to_string(t.tokens.size()) +
                                " tokens but " + std::to_string(t.token_speakers.size()) +
                                " labels");
  }
  LabelledWords out;
  for (std::size_t i = 0; i < t.tokens.size(); ++i) {
    if (t.tokens[i] == sot::kSpeakerChange) continue;
    out.words.push_back(t.tokens[i]);
    out.speakers.push_back(t.token_speakers[i]);
  }
  return out;
}

std::size_t speaker_token_errors(const LabelledWords& ref, const LabelledWords& hyp,
                                 const SerConventions& conv) {
  const AlignmentResult a = align(ref.words, hyp.words);
  std::size_t errors = 0;
  for (const auto& p : a.ops) {
    switch (p.op) {
      case EditOp::kMatch:
      case EditOp::kSubstitution:
        if (ref.speakers[*p.ref_index] != hyp.speakers[*p.hyp_index]) ++errors;
        break;
      case EditOp::kInsertion:
      case EditOp::kDeletion:
        if (conv.count_insertions_deletions) ++errors;
        break;
    }
  }
  return errors;
}

// Sentences split on "<sc>" without the strictness of sot::deserialize, so
// malformed hypotheses (leading or doubled separators) still score.
std::vector<std::vector<std::string>> sentence_labels(const sot::SotTranscript& t) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> cur;
  for (std::size_t i = 0; i < t.tokens.size(); ++i) {
    if (t.tokens[i] == sot::kSpeakerChange) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    cur.push_back(t.token_speakers.at(i));
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::size_t sentence_errors(const sot::SotTranscript& ref, const sot::SotTranscript& hyp,
                            std::size_t* ref_sentences) {
  const auto r = sentence_labels(ref);
  const auto h = sentence_labels(hyp);
  *ref_sentences = r.size();
  const std::size_t paired = std::min(r.size(), h.size());
  std::size_t errors = std::max(r.size(), h.size()) - paired;
  for (std::size_t i = 0; i < paired; ++i) {
    if (majority_speaker(r[i]) != majority_speaker(h[i])) ++errors;
  }
  return errors;
}

}  // namespace

double t_ser(const sot::SotTranscript& ref, const sot::SotTranscript& hyp,
             const SerConventions& conv) {
  const auto r = words_of(ref);
  if (r.words.empty()) throw std::invalid_argument("t_ser: empty reference");
  return 100.0 * static_cast<double>(speaker_token_errors(r, words_of(hyp), conv)) /
         static_cast<double>(r.words.size());
}

std::string majority_speaker(const std::vector<std::string>& labels) {
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labels) ++counts[l];
  std::string best;
  std::size_t best_count = 0;
  for (const auto& l : labels) {  // first occurrence wins ties
    if (counts[l] > best_count) {
      best = l;
      best_count = counts[l];
    }
  }
  return best;
}

double s_ser(const sot::SotTranscript& ref, const sot::SotTranscript& hyp) {
  std::size_t n_ref = 0;
  const std::size_t errors = sentence_errors(ref, hyp, &n_ref);
  if (n_ref == 0) throw std::invalid_argument("s_ser: empty reference");
  return 100.0 * static_cast<double>(errors) / static_cast<double>(n_ref);
}

std::size_t count_column(std::size_t estimated) {
  if (estimated == 0) return 0;
  return std::min<std::size_t>(estimated, kCountColumns) - 1;
}

CountingTable speaker_counting_accuracy(const std::vector<std::size_t>& ref_counts,
                                        const std::vector<std::size_t>& hyp_counts) {
  if (ref_counts.size() != hyp_counts.size()) {
    throw std::invalid_argument("speaker_counting_accuracy: size mismatch");
  }
  CountingTable t;
  for (std::size_t i = 0; i < ref_counts.size(); ++i) {
    if (ref_counts[i] < 1 || ref_counts[i] > kCountRows) {
      ++t.skipped;
      continue;
    }
    const std::size_t r = ref_counts[i] - 1;
    ++t.counts[r][count_column(hyp_counts[i])];
    ++t.row_totals[r];
  }
  for (std::size_t r = 0; r < kCountRows; ++r) {
    for (std::size_t c = 0; c < kCountColumns; ++c) {
      t.percent[r][c] = t.row_totals[r] == 0
                            ? 0.0
                            : 100.0 * static_cast<double>(t.counts[r][c]) /
                                  static_cast<double>(t.row_totals[r]);
    }
    t.accuracy[r] = t.percent[r][r];
  }
  return t;
}

nlohmann::json CountingTable::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < kCountRows; ++r) {
    rows.push_back({{"reference_speakers", r + 1},
                    {"segments", row_totals[r]},
                    {"counts", counts[r]},
                    {"percent", percent[r]},
                    {"accuracy", accuracy[r]}});
  }
  return {{"columns", {"1", "2", "3", "4", ">4"}}, {"rows", rows}, {"skipped", skipped}};
}

std::string CountingTable::to_csv() const {
  std::ostringstream os;
  os << "reference_speakers,1,2,3,4,>4\n";
  for (std::size_t r = 0; r < kCountRows; ++r) {
    os << r + 1;
    for (std::size_t c = 0; c < kCountColumns; ++c) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), ",%.2f", percent[r][c]);
      os << buf;
    }
    os << "\n";
  }
  return os.str();
}

void ScoreTotals::add(const ScoreTotals& o) {
  ref_words += o.ref_words;
  word_errors += o.word_errors;
  speaker_token_errors += o.speaker_token_errors;
  ref_sentences += o.ref_sentences;
  sentence_errors += o.sentence_errors;
  utterances += o.utterances;
}

namespace {
double pct(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

double ScoreTotals::wer() const { return pct(word_errors, ref_words); }
double ScoreTotals::t_ser() const { return pct(speaker_token_errors, ref_words); }
double ScoreTotals::s_ser() const { return pct(sentence_errors, ref_sentences); }

nlohmann::json ScoreTotals::to_json() const {
  return {{"wer", wer()},
          {"s_ser", s_ser()},
          {"t_ser", t_ser()},
          {"utterances", utterances},
          {"ref_words", ref_words},
          {"word_errors", word_errors},
          {"speaker_token_errors", speaker_token_errors},
          {"ref_sentences", ref_sentences},
          {"sentence_errors", sentence_errors}};
}

ScoreTotals score_pair(const sot::SotTranscript& ref, const sot::SotTranscript& hyp,
                       const SerConventions& conv) {
  const auto r = words_of(ref);
  const auto h = words_of(hyp);
  ScoreTotals s;
  s.utterances = 1;
  s.ref_words = r.words.size();
  s.word_errors = align(r.words, h.words).errors();
  s.speaker_token_errors = speaker_token_errors(r, h, conv);
  s.sentence_errors = sentence_errors(ref, hyp, &s.ref_sentences);
  return s;
}

ScoreReport score_corpus(const std::vector<sot::SotTranscript>& refs,
                         const std::vector<sot::SotTranscript>& hyps,
                         const SerConventions& conv) {
  if (refs.size() != hyps.size()) {
    throw std::invalid_argument("score_corpus: " + std::to_string(refs.size()) +
                                " references but " + std::to_string(hyps.size()) +
                                " hypotheses");
  }
  ScoreReport rep;
  std::vector<std::size_t> ref_counts, hyp_counts;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const ScoreTotals s = score_pair(refs[i], hyps[i], conv);
    rep.overall.add(s);
    const std::size_t n_spk = sot::speaker_count(refs[i].tokens);
    rep.by_speaker_count[n_spk].add(s);
    ref_counts.push_back(n_spk);
    hyp_counts.push_back(sot::speaker_count(hyps[i].tokens));
  }
  rep.counting = speaker_counting_accuracy(ref_counts, hyp_counts);
  return rep;
}

nlohmann::json ScoreReport::to_json(bool per_speaker_count) const {
  nlohmann::json j = {{"overall", overall.to_json()},
                      {"speaker_counting", counting.to_json()}};
  if (per_speaker_count) {
    nlohmann::json groups = nlohmann::json::object();
    for (const auto& [n, s] : by_speaker_count) {
      groups[std::to_string(n) + "-speaker"] = s.to_json();
    }
    j["by_speaker_count"] = groups;
  }
  return j;
}

std::string ScoreReport::to_table(bool per_speaker_count) const {
  std::ostringstream os;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-16s %8s %8s %8s %6s\n", "group", "WER", "S-SER",
                "T-SER", "#utt");
  os << buf;
  auto row = [&](const std::string& name, const ScoreTotals& s) {
    std::snprintf(buf, sizeof(buf), "%-16s %8.2f %8.2f %8.2f %6zu\n", name.c_str(),
                  s.wer(), s.s_ser(), s.t_ser(), s.utterances);
    os << buf;
  };
  if (per_speaker_count) {
    for (const auto& [n, s] : by_speaker_count) {
      row(std::to_string(n) + "-speaker", s);
    }
  }
  row("combined", overall);
  return os.str();
}

}  // namespace mcsa::metrics
