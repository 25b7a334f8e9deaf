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


#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "tokpipe/error.h"
#include "tokpipe/eval.h"

namespace tokpipe::eval {
namespace {

using Tags = std::vector<std::string>;

TaggedSentence sentence(Tags outer, Tags inner = {}) {
  TaggedSentence s;
  s.tokens.assign(outer.size(), "w");
  s.outer_tags = std::move(outer);
  s.inner_tags = std::move(inner);
  return s;
}

ParsedCorpus conll(const std::string& text) {
  std::istringstream in(text);
  return parse_conll(in, "test.conll");
}

ParsedCorpus germeval(const std::string& text) {
  std::istringstream in(text);
  return parse_germeval(in, "test.tsv");
}

TEST(Tags, Validity) {
  EXPECT_TRUE(is_valid_tag("O"));
  EXPECT_TRUE(is_valid_tag("B-PER"));
  EXPECT_TRUE(is_valid_tag("I-LOCderiv"));
  EXPECT_FALSE(is_valid_tag("B-"));
  EXPECT_FALSE(is_valid_tag("X-PER"));
  EXPECT_FALSE(is_valid_tag("o"));
  EXPECT_FALSE(is_valid_tag("BPER"));
}

TEST(Conll, OneSentence) {
  const auto c = conll("Angela B-PER\nMerkel I-PER\n\n");
  ASSERT_EQ(c.sentences.size(), 1u);
  EXPECT_EQ(c.sentences[0].tokens, (Tags{"Angela", "Merkel"}));
  EXPECT_EQ(c.sentences[0].outer_tags, (Tags{"B-PER", "I-PER"}));
  EXPECT_EQ(c.repairs, 0u);
}

TEST(Conll, EmptyAndDocstart) {
  EXPECT_TRUE(conll("").sentences.empty());
  const auto c = conll("-DOCSTART- -X- O O\n\nEU NNP B-ORG\nrejects VBZ O\n\n\nGerman JJ B-MISC");
  ASSERT_EQ(c.sentences.size(), 2u);
  EXPECT_EQ(c.sentences[0].outer_tags, (Tags{"B-ORG", "O"}));
  EXPECT_EQ(c.sentences[1].tokens, (Tags{"German"}));
}

TEST(Conll, RepairsOrphanInside) {
  const auto c = conll("Merkel I-PER\nsagt O\nBerlin I-LOC\nMitte I-LOC\nParis I-PER\n");
  EXPECT_EQ(c.sentences[0].outer_tags, (Tags{"B-PER", "O", "B-LOC", "I-LOC", "B-PER"}));
  EXPECT_EQ(c.repairs, 3u);
}

TEST(Conll, BadTagNamesLine) {
  try {
    conll("a O\nb B-PER\nc Q-PER\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("test.conll"), std::string::npos);
  }
}

TEST(GermEval, FourColumns) {
  const auto g = germeval("# sentence 1\n1\tMann\tB-PER\tO\n2\tmännlich\tB-LOCderiv\tB-PERpart\n\n");
  ASSERT_EQ(g.sentences.size(), 1u);
  EXPECT_EQ(g.sentences[0].outer_tags, (Tags{"B-PER", "B-LOCderiv"}));
  EXPECT_EQ(g.sentences[0].inner_tags, (Tags{"O", "B-PERpart"}));
  const auto spans = extract_spans(g.sentences[0].outer_tags);
  EXPECT_EQ(spans[1].label, "LOCderiv");
}

TEST(GermEval, ColumnCountError) {
  try {
    germeval("1\tMann\tB-PER\tO\n2\tx\tO\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Spans, Extraction) {
  EXPECT_EQ(extract_spans({"B-PER", "I-PER", "O"}),
            (std::vector<SpanAnnotation>{{0, 2, "PER", Level::kOuter}}));
  EXPECT_TRUE(extract_spans({"O", "O"}).empty());
  EXPECT_EQ(extract_spans({"B-PER", "B-PER"}),
            (std::vector<SpanAnnotation>{{0, 1, "PER", Level::kOuter}, {1, 2, "PER", Level::kOuter}}));
  // A class change inside ends the span.
  EXPECT_EQ(extract_spans({"B-PER", "I-LOC"}, Level::kInner),
            (std::vector<SpanAnnotation>{{0, 1, "PER", Level::kInner}, {1, 2, "LOC", Level::kInner}}));
}

TEST(Spans, RenderIsInverse) {
  const Tags tags = {"B-PER", "I-PER", "O", "B-LOC", "B-LOC", "I-LOC"};
  EXPECT_EQ(render_bio(extract_spans(tags), tags.size()), tags);
}

TEST(NerF1, HandCases) {
  const auto gold = sentence({"B-PER", "I-PER", "O", "B-LOC"});
  const auto half = ner_f1({gold}, {sentence({"B-PER", "I-PER", "O", "O"})});
  EXPECT_EQ(half.tp, 1u);
  EXPECT_EQ(half.fp, 0u);
  EXPECT_EQ(half.fn, 1u);
  EXPECT_DOUBLE_EQ(half.precision, 1.0);
  EXPECT_DOUBLE_EQ(half.recall, 0.5);
  EXPECT_NEAR(half.f1, 2.0 / 3.0, 1e-12);

  EXPECT_DOUBLE_EQ(ner_f1({gold}, {gold}).f1, 1.0);

  const auto wrong = ner_f1({sentence({"B-PER", "I-PER"})}, {sentence({"B-LOC", "I-LOC"})});
  EXPECT_EQ(wrong.tp, 0u);
  EXPECT_EQ(wrong.fp, 1u);
  EXPECT_EQ(wrong.fn, 1u);
  EXPECT_EQ(wrong.f1, 0.0);
}

TEST(NerF1, EmptyConventions) {
  const auto none = ner_f1({sentence({"O"})}, {sentence({"O"})});
  EXPECT_EQ(none.precision, 1.0);
  EXPECT_EQ(none.recall, 1.0);
  EXPECT_EQ(none.f1, 1.0);
  const auto p = PrfScore::from_counts(0, 0, 3);
  EXPECT_EQ(p.precision, 1.0);
  EXPECT_EQ(p.recall, 0.0);
  EXPECT_EQ(p.f1, 0.0);
}

TEST(NerF1, MisalignmentNamesSentence) {
  try {
    ner_f1({sentence({"O"}), sentence({"O", "O"})}, {sentence({"O"}), sentence({"O"})});
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("sentence 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ner_f1({sentence({"O"})}, {}), InvalidArgument);
}

TEST(GermEvalF1, HandCases) {
  const auto gold = sentence({"B-PER"}, {"O"});
  EXPECT_DOUBLE_EQ(germeval_f1({gold}, {gold}).f1, 1.0);

  const auto extra = germeval_f1({gold}, {sentence({"B-PER"}, {"B-LOC"})});
  EXPECT_EQ(extra.tp, 1u);
  EXPECT_EQ(extra.fp, 1u);
  EXPECT_EQ(extra.fn, 0u);
  EXPECT_DOUBLE_EQ(extra.precision, 0.5);
  EXPECT_DOUBLE_EQ(extra.recall, 1.0);
  EXPECT_NEAR(extra.f1, 2.0 / 3.0, 1e-12);

  const auto level = germeval_f1({sentence({"O"}, {"B-LOC"})}, {sentence({"B-LOC"}, {"O"})});
  EXPECT_EQ(level.tp, 0u);
  EXPECT_EQ(level.fp, 1u);
  EXPECT_EQ(level.fn, 1u);
}

TEST(GermEvalF1, LevelAverage) {
  const auto gold = sentence({"B-PER", "O"}, {"O", "B-LOC"});
  const auto pred = sentence({"B-PER", "O"}, {"O", "O"});
  const auto r = germeval_report({gold}, {pred});
  EXPECT_DOUBLE_EQ(r.outer.f1, 1.0);
  EXPECT_DOUBLE_EQ(r.inner.f1, 0.0);
  EXPECT_DOUBLE_EQ(r.level_average_f1, 0.5);
  EXPECT_NEAR(r.pooled.f1, 2.0 / 3.0, 1e-12);
}

TEST(MeanClassF1, HandCases) {
  const auto r = mean_class_f1({"A", "A", "B"}, {"A", "B", "B"}, {"A", "B"});
  ASSERT_EQ(r.classes.size(), 2u);
  EXPECT_EQ(r.classes[0].score.tp, 1u);
  EXPECT_EQ(r.classes[0].score.fp, 0u);
  EXPECT_EQ(r.classes[0].score.fn, 1u);
  EXPECT_EQ(r.classes[1].score.tp, 1u);
  EXPECT_EQ(r.classes[1].score.fp, 1u);
  EXPECT_EQ(r.classes[1].score.fn, 0u);
  EXPECT_NEAR(r.mean_f1, 2.0 / 3.0, 1e-12);

  EXPECT_DOUBLE_EQ(mean_class_f1({"A", "B"}, {"A", "B"}, {"A", "B"}).mean_f1, 1.0);

  const auto degenerate =
      mean_class_f1({"pos", "pos", "neg", "neg"}, {"pos", "pos", "pos", "pos"}, {"pos", "neg"});
  EXPECT_NEAR(degenerate.classes[0].score.f1, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(degenerate.classes[1].score.f1, 0.0);
  EXPECT_NEAR(degenerate.mean_f1, 1.0 / 3.0, 1e-12);
}

TEST(MeanClassF1, AbsentClasses) {
  const auto with = mean_class_f1({"A"}, {"A"}, {"A", "Z"});
  EXPECT_FALSE(with.classes[1].present);
  EXPECT_DOUBLE_EQ(with.mean_f1, 0.5);
  EXPECT_DOUBLE_EQ(mean_class_f1({"A"}, {"A"}, {"A", "Z"}, true).mean_f1, 1.0);
  EXPECT_THROW(mean_class_f1({"A"}, {"A", "B"}, {"A"}), InvalidArgument);
  EXPECT_THROW(mean_class_f1({"A"}, {"Q"}, {"A"}), InvalidArgument);
}

TEST(SelectBestRun, Rules) {
  const std::vector<RunRecord> two = {{0, 0.80, 0.75}, {1, 0.90, 0.70}};
  EXPECT_EQ(select_best_run(two).test_score, 0.70);
  const std::vector<RunRecord> one = {{3, 0.1, 0.2}};
  EXPECT_EQ(select_best_run(one).run_id, 3u);
  const std::vector<RunRecord> tie = {{1, 0.9, 0.9}, {0, 0.9, 0.8}};
  EXPECT_EQ(select_best_run(tie).run_id, 0u);
  EXPECT_EQ(select_best_run(tie).test_score, 0.8);
  EXPECT_THROW(select_best_run({}), InvalidArgument);
}

TEST(RunsCsv, Parse) {
  std::istringstream in("run_id,val,test\n0,0.8,0.75\n1,0.9,0.7\n");
  const auto runs = parse_runs_csv(in);
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_EQ(runs[1].run_id, 1u);
  EXPECT_EQ(runs[1].validation_score, 0.9);
  std::istringstream bad("0,0.8\n");
  EXPECT_THROW(parse_runs_csv(bad), ParseError);
  std::istringstream range("0,1.5,0.2\n");
  EXPECT_THROW(parse_runs_csv(range), ParseError);
}

}  // namespace
}  // namespace tokpipe::eval
