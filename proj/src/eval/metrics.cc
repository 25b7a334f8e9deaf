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

#include <algorithm>
#include <iterator>
#include <unordered_map>

#include "tokpipe/error.h"
#include "tokpipe/eval.h"

namespace tokpipe::eval {

namespace {

struct Counts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  Counts& operator+=(const Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

Counts compare(const std::vector<SpanAnnotation>& gold, const std::vector<SpanAnnotation>& pred) {
  std::vector<SpanAnnotation> g = gold;
  std::vector<SpanAnnotation> p = pred;
  std::sort(g.begin(), g.end());
  std::sort(p.begin(), p.end());
  std::vector<SpanAnnotation> common;
  std::set_intersection(g.begin(), g.end(), p.begin(), p.end(), std::back_inserter(common));
  return {common.size(), p.size() - common.size(), g.size() - common.size()};
}

void check_aligned(const std::vector<TaggedSentence>& gold, const std::vector<TaggedSentence>& pred,
                   bool two_levels) {
  if (gold.size() != pred.size()) {
    throw InvalidArgument("gold has " + std::to_string(gold.size()) + " sentences, predictions " +
                          std::to_string(pred.size()) + "; first unmatched sentence index " +
                          std::to_string(std::min(gold.size(), pred.size())));
  }
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const std::size_t n = gold[i].outer_tags.size();
    if (pred[i].outer_tags.size() != n) {
      throw InvalidArgument("sentence " + std::to_string(i) + ": gold has " + std::to_string(n) +
                            " tokens, predictions " + std::to_string(pred[i].outer_tags.size()));
    }
    if (two_levels && (gold[i].inner_tags.size() != n || pred[i].inner_tags.size() != n)) {
      throw InvalidArgument("sentence " + std::to_string(i) + ": inner tag level missing");
    }
  }
}

}  // namespace

PrfScore PrfScore::from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
  PrfScore s;
  s.tp = tp;
  s.fp = fp;
  s.fn = fn;
  s.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  s.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double sum = s.precision + s.recall;
  s.f1 = sum > 0.0 ? 2.0 * (s.precision * s.recall) / sum : 0.0;
  return s;
}

std::vector<SpanAnnotation> extract_spans(const std::vector<std::string>& tags, Level level) {
  std::vector<SpanAnnotation> spans;
  std::optional<SpanAnnotation> open;
  auto close = [&](std::size_t end) {
    if (!open) return;
    open->end = end;
    spans.push_back(std::move(*open));
    open.reset();
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const std::string& tag = tags[i];
    if (tag == "O") {
      close(i);
      continue;
    }
    const std::string_view cls = std::string_view(tag).substr(2);
    if (tag[0] == 'B' || !open || open->label != cls) {
      close(i);
      open = SpanAnnotation{i, i + 1, std::string(cls), level};
    }
  }
  close(tags.size());
  return spans;
}

std::vector<std::string> render_bio(const std::vector<SpanAnnotation>& spans, std::size_t length) {
  std::vector<std::string> tags(length, "O");
  for (const SpanAnnotation& s : spans) {
    if (s.start >= s.end || s.end > length) throw InvalidArgument("span outside the sentence");
    tags[s.start] = "B-" + s.label;
    for (std::size_t i = s.start + 1; i < s.end; ++i) tags[i] = "I-" + s.label;
  }
  return tags;
}

PrfScore ner_f1(const std::vector<TaggedSentence>& gold, const std::vector<TaggedSentence>& pred) {
  check_aligned(gold, pred, false);
  Counts total;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    total += compare(extract_spans(gold[i].outer_tags), extract_spans(pred[i].outer_tags));
  }
  return PrfScore::from_counts(total.tp, total.fp, total.fn);
}

GermEvalReport germeval_report(const std::vector<TaggedSentence>& gold,
                               const std::vector<TaggedSentence>& pred) {
  check_aligned(gold, pred, true);
  Counts outer;
  Counts inner;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    outer += compare(extract_spans(gold[i].outer_tags, Level::kOuter),
                     extract_spans(pred[i].outer_tags, Level::kOuter));
    inner += compare(extract_spans(gold[i].inner_tags, Level::kInner),
                     extract_spans(pred[i].inner_tags, Level::kInner));
  }
  // Spans carry their level, so pooling the counts keeps level in the key.
  Counts pooled = outer;
  pooled += inner;

  GermEvalReport report;
  report.pooled = PrfScore::from_counts(pooled.tp, pooled.fp, pooled.fn);
  report.outer = PrfScore::from_counts(outer.tp, outer.fp, outer.fn);
  report.inner = PrfScore::from_counts(inner.tp, inner.fp, inner.fn);
  report.level_average_f1 = (report.outer.f1 + report.inner.f1) / 2.0;
  return report;
}

PrfScore germeval_f1(const std::vector<TaggedSentence>& gold,
                     const std::vector<TaggedSentence>& pred) {
  return germeval_report(gold, pred).pooled;
}

ClassificationReport mean_class_f1(const std::vector<std::string>& gold,
                                   const std::vector<std::string>& pred,
                                   const std::vector<std::string>& classes, bool exclude_absent) {
  if (gold.empty()) throw InvalidArgument("no labels to score");
  if (gold.size() != pred.size()) {
    throw InvalidArgument("gold has " + std::to_string(gold.size()) + " labels, predictions " +
                          std::to_string(pred.size()));
  }
  if (classes.empty()) throw InvalidArgument("class set is empty");

  std::unordered_map<std::string, std::size_t> index;
  for (const std::string& c : classes) index.emplace(c, index.size());
  auto lookup = [&](const std::string& label, const char* side, std::size_t i) {
    const auto it = index.find(label);
    if (it == index.end()) {
      throw InvalidArgument(std::string(side) + " label '" + label + "' at item " +
                            std::to_string(i) + " is not a known class");
    }
    return it->second;
  };

  std::vector<Counts> counts(index.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const std::size_t g = lookup(gold[i], "gold", i);
    const std::size_t p = lookup(pred[i], "predicted", i);
    if (g == p) {
      ++counts[g].tp;
    } else {
      ++counts[p].fp;
      ++counts[g].fn;
    }
  }

  ClassificationReport report;
  double sum = 0.0;
  std::size_t scored = 0;
  std::vector<bool> emitted(index.size(), false);
  for (const std::string& c : classes) {
    const std::size_t k = index.at(c);
    if (emitted[k]) continue;
    emitted[k] = true;
    const Counts& n = counts[k];
    ClassScore cs;
    cs.label = c;
    cs.present = n.tp + n.fp + n.fn > 0;
    cs.score = PrfScore::from_counts(n.tp, n.fp, n.fn);
    if (!cs.present) {
      cs.score.f1 = 0.0;
      if (exclude_absent) {
        report.classes.push_back(std::move(cs));
        continue;
      }
    }
    sum += cs.score.f1;
    ++scored;
    report.classes.push_back(std::move(cs));
  }
  report.mean_f1 = scored > 0 ? sum / static_cast<double>(scored) : 0.0;
  return report;
}

const RunRecord& select_best_run(const std::vector<RunRecord>& runs) {
  if (runs.empty()) throw InvalidArgument("no runs to select from");
  const RunRecord* best = &runs.front();
  for (const RunRecord& r : runs) {
    if (r.validation_score > best->validation_score ||
        (r.validation_score == best->validation_score && r.run_id < best->run_id)) {
      best = &r;
    }
  }
  return *best;
}

}  // namespace tokpipe::eval
