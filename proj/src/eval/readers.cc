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

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tokpipe/error.h"
#include "tokpipe/eval.h"

namespace tokpipe::eval {

namespace {

std::string_view class_of(std::string_view tag) { return tag.substr(2); }

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  return in;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

std::string checked_tag(std::string_view tag, const std::string& source, std::size_t line_no) {
  if (!is_valid_tag(tag)) {
    throw ParseError(source, line_no, "malformed tag '" + std::string(tag) + "'");
  }
  return std::string(tag);
}

void finish_sentence(TaggedSentence& sentence, ParsedCorpus& corpus) {
  if (sentence.tokens.empty()) return;
  corpus.repairs += repair_bio(sentence.outer_tags);
  corpus.repairs += repair_bio(sentence.inner_tags);
  corpus.sentences.push_back(std::move(sentence));
  sentence = TaggedSentence{};
}

}  // namespace

bool is_valid_tag(std::string_view tag) {
  if (tag == "O") return true;
  return tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-';
}

std::size_t repair_bio(std::vector<std::string>& tags) {
  std::size_t repairs = 0;
  std::string_view open_class;
  bool open = false;
  for (std::string& tag : tags) {
    if (tag == "O") {
      open = false;
      continue;
    }
    if (tag[0] == 'I' && !(open && class_of(tag) == open_class)) {
      tag[0] = 'B';
      ++repairs;
    }
    open = true;
    open_class = class_of(tag);
  }
  return repairs;
}

ParsedCorpus parse_conll(std::istream& in, const std::string& source) {
  ParsedCorpus corpus;
  TaggedSentence sentence;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) {
      finish_sentence(sentence, corpus);
      continue;
    }
    const auto fields = split_ws(line);
    if (fields.front() == "-DOCSTART-") {
      finish_sentence(sentence, corpus);
      continue;
    }
    if (fields.size() < 2) {
      throw ParseError(source, line_no, "expected a token and a tag column");
    }
    sentence.tokens.emplace_back(fields.front());
    sentence.outer_tags.push_back(checked_tag(fields.back(), source, line_no));
  }
  finish_sentence(sentence, corpus);
  return corpus;
}

ParsedCorpus parse_conll(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_conll(in, path.string());
}

ParsedCorpus parse_germeval(std::istream& in, const std::string& source) {
  ParsedCorpus corpus;
  TaggedSentence sentence;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) {
      finish_sentence(sentence, corpus);
      continue;
    }
    if (line.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw ParseError(source, line_no,
                       "expected 4 tab-separated columns, got " + std::to_string(fields.size()));
    }
    sentence.tokens.emplace_back(fields[1]);
    sentence.outer_tags.push_back(checked_tag(fields[2], source, line_no));
    sentence.inner_tags.push_back(checked_tag(fields[3], source, line_no));
  }
  finish_sentence(sentence, corpus);
  return corpus;
}

ParsedCorpus parse_germeval(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_germeval(in, path.string());
}

std::vector<RunRecord> parse_runs_csv(std::istream& in, const std::string& source) {
  std::vector<RunRecord> runs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 3) throw ParseError(source, line_no, "expected run_id,val,test");

    RunRecord r;
    const auto& id = fields[0];
    const auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), r.run_id);
    if (ec != std::errc() || ptr != id.data() + id.size()) {
      if (runs.empty() && line_no == 1) continue;  // header
      throw ParseError(source, line_no, "run_id '" + id + "' is not an integer");
    }
    try {
      std::size_t used = 0;
      r.validation_score = std::stod(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("trailing");
      r.test_score = std::stod(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      throw ParseError(source, line_no, "scores must be numbers");
    }
    for (double s : {r.validation_score, r.test_score}) {
      if (!(s >= 0.0 && s <= 1.0)) throw ParseError(source, line_no, "scores must lie in [0, 1]");
    }
    runs.push_back(r);
  }
  return runs;
}

std::vector<std::string> read_labels(const std::filesystem::path& path) {
  auto in = open(path);
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    labels.push_back(line.substr(first, last - first + 1));
  }
  return labels;
}

}  // namespace tokpipe::eval
