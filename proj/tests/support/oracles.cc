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


#include "oracles.h"

#include <map>
#include <set>

namespace tokpipe::testing {

namespace {

std::string utf8(char32_t cp) {
  std::string s;
  if (cp < 0x80) {
    s += static_cast<char>(cp);
  } else {
    s += static_cast<char>(0xC0 | (cp >> 6));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return s;
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }
bool is_other(char c) { return !is_alpha(c) && !is_digit(c) && !is_space(c); }

std::vector<std::string> symbols_of(const std::string& bytes) {
  std::vector<std::string> out;
  for (unsigned char b : bytes) out.push_back(oracle_symbol(b));
  return out;
}

void apply(std::vector<std::string>& word, const Pair& merge) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i + 1 < word.size() && word[i] == merge.first && word[i + 1] == merge.second) {
      out.push_back(merge.first + merge.second);
      ++i;
    } else {
      out.push_back(word[i]);
    }
  }
  word = std::move(out);
}

}  // namespace

std::string oracle_symbol(unsigned char byte) {
  if (byte >= 0x21 && byte <= 0x7E) return std::string(1, static_cast<char>(byte));
  char32_t next = 0x100;
  for (unsigned b = 0; b < 256; ++b) {
    if (b >= 0x21 && b <= 0x7E) continue;
    if (b == byte) return utf8(next);
    ++next;
  }
  return {};
}

std::string oracle_map(const std::string& bytes) {
  std::string out;
  for (unsigned char b : bytes) out += oracle_symbol(b);
  return out;
}

std::vector<std::string> oracle_ascii_pre_split(const std::string& t) {
  static const char* kContractions[] = {"'s", "'t", "'re", "'ve", "'m", "'ll", "'d"};
  std::vector<std::string> out;
  const std::size_t n = t.size();
  std::size_t i = 0;
  auto run = [&](std::size_t from, bool (*cls)(char)) {
    while (from < n && cls(t[from])) ++from;
    return from;
  };
  while (i < n) {
    bool matched = false;
    for (const char* c : kContractions) {
      const std::string s(c);
      if (t.compare(i, s.size(), s) == 0) {
        out.push_back(s);
        i += s.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    const std::size_t j = t[i] == ' ' ? i + 1 : i;
    bool taken = false;
    for (auto cls : {is_alpha, is_digit, is_other}) {
      if (j < n && cls(t[j])) {
        const std::size_t k = run(j, cls);
        out.push_back(t.substr(i, k - i));
        i = k;
        taken = true;
        break;
      }
    }
    if (taken) continue;
    // Whitespace: leave the last space for the next word unless at the end.
    const std::size_t k = run(i, is_space);
    const std::size_t stop = (k < n && k - i > 1) ? k - 1 : k;
    out.push_back(t.substr(i, stop - i));
    i = stop;
  }
  return out;
}

std::vector<Pair> oracle_train(const std::vector<std::string>& documents, std::size_t num_merges,
                               const std::vector<std::string>& special_tokens) {
  std::vector<std::vector<std::string>> words;
  for (const auto& doc : documents) {
    for (const auto& piece : oracle_ascii_pre_split(doc)) words.push_back(symbols_of(piece));
  }
  std::set<std::string> tokens(special_tokens.begin(), special_tokens.end());
  for (unsigned b = 0; b < 256; ++b) tokens.insert(oracle_symbol(static_cast<unsigned char>(b)));

  std::vector<Pair> merges;
  while (merges.size() < num_merges) {
    std::map<Pair, std::size_t> counts;  // ordered: first max wins ties
    for (const auto& w : words) {
      for (std::size_t i = 0; i + 1 < w.size(); ++i) ++counts[{w[i], w[i + 1]}];
    }
    const Pair* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [pair, count] : counts) {
      if (tokens.count(pair.first + pair.second)) continue;
      if (count > best_count) {
        best = &pair;
        best_count = count;
      }
    }
    if (best == nullptr || best_count < 2) break;
    const Pair merge = *best;
    merges.push_back(merge);
    tokens.insert(merge.first + merge.second);
    for (auto& w : words) apply(w, merge);
  }
  return merges;
}

std::vector<std::string> oracle_encode(const std::vector<Pair>& merges,
                                       const std::vector<std::string>& pieces) {
  std::vector<std::string> out;
  for (const auto& piece : pieces) {
    std::vector<std::string> word = symbols_of(piece);
    for (const auto& m : merges) apply(word, m);
    out.insert(out.end(), word.begin(), word.end());
  }
  return out;
}

}  // namespace tokpipe::testing
