// Copyright 2026 The tokpipe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Downstream evaluation: CoNLL / GermEval readers, span F1, mean per-class
// F1, and best-of-n run selection.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tokpipe::eval {

enum class Level : std::uint8_t { kOuter = 0, kInner = 1 };

struct SpanAnnotation {
  std::size_t start = 0;  // inclusive token index
  std::size_t end = 0;    // exclusive
  std::string label;
  Level level = Level::kOuter;

  auto operator<=>(const SpanAnnotation&) const = default;
};

struct TaggedSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> outer_tags;
  std::vector<std::string> inner_tags;  // empty for single-level data
};

struct ParsedCorpus {
  std::vector<TaggedSentence> sentences;
  // I-X tags promoted to B-X because no B-X/I-X of class X preceded them.
  std::size_t repairs = 0;
};

// True for "O" and "B-<class>" / "I-<class>" with a non-empty class.
bool is_valid_tag(std::string_view tag);

// Promotes orphan I-X tags to B-X in place. Returns the number of repairs.
std::size_t repair_bio(std::vector<std::string>& tags);

// CoNLL column format: whitespace-separated columns with the tag last, blank
// lines between sentences, -DOCSTART- lines skipped.
ParsedCorpus parse_conll(std::istream& in, const std::string& source = "<stream>");
ParsedCorpus parse_conll(const std::filesystem::path& path);

// GermEval 2014 TSV: "index<TAB>token<TAB>outer<TAB>inner", '#' comments,
// blank lines between sentences.
ParsedCorpus parse_germeval(std::istream& in, const std::string& source = "<stream>");
ParsedCorpus parse_germeval(const std::filesystem::path& path);

// Spans of a well-formed BIO sequence, ordered by start.
std::vector<SpanAnnotation> extract_spans(const std::vector<std::string>& tags,
                                          Level level = Level::kOuter);

// Inverse of extract_spans for non-overlapping spans.
std::vector<std::string> render_bio(const std::vector<SpanAnnotation>& spans,
                                    std::size_t length);

struct PrfScore {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  // Precision is 1 without predictions, recall is 1 without gold items,
  // and f1 is 0 when both are 0.
  static PrfScore from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn);
};

// Micro-averaged exact span match over (sentence, start, end, label).
// Throws InvalidArgument naming the first misaligned sentence.
PrfScore ner_f1(const std::vector<TaggedSentence>& gold,
                const std::vector<TaggedSentence>& pred);

struct GermEvalReport {
  PrfScore pooled;  // both levels, level part of the match key
  PrfScore outer;
  PrfScore inner;
  double level_average_f1 = 0.0;  // (outer.f1 + inner.f1) / 2
};

GermEvalReport germeval_report(const std::vector<TaggedSentence>& gold,
                               const std::vector<TaggedSentence>& pred);

// The pooled score of germeval_report.
PrfScore germeval_f1(const std::vector<TaggedSentence>& gold,
                     const std::vector<TaggedSentence>& pred);

struct ClassScore {
  std::string label;
  PrfScore score;
  bool present = true;  // occurs in gold or predictions
};

struct ClassificationReport {
  std::vector<ClassScore> classes;
  double mean_f1 = 0.0;
};

// Unweighted mean of one-vs-rest F1 over `classes`. A class absent from both
// gold and predictions scores 0, or is left out of the mean when
// exclude_absent is set.
ClassificationReport mean_class_f1(const std::vector<std::string>& gold,
                                   const std::vector<std::string>& pred,
                                   const std::vector<std::string>& classes,
                                   bool exclude_absent = false);

struct RunRecord {
  std::uint64_t run_id = 0;
  double validation_score = 0.0;
  double test_score = 0.0;
};

// Highest validation score, ties to the lowest run_id. The reported number
// is the winner's test_score.
const RunRecord& select_best_run(const std::vector<RunRecord>& runs);

// "run_id,val,test" lines; an optional header line is skipped.
std::vector<RunRecord> parse_runs_csv(std::istream& in, const std::string& source = "<stream>");

// One label per line, blank lines ignored.
std::vector<std::string> read_labels(const std::filesystem::path& path);

}  // namespace tokpipe::eval
