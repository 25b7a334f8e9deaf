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

#include "tokpipe/bpe.h"
#include "tokpipe/utf8.h"

namespace tokpipe::bpe {

namespace {

enum class CharClass : std::uint8_t { kLetter, kNumber, kSpace, kOther };

struct Char {
  std::size_t offset;  // byte offset in the text
  char32_t codepoint;  // U+FFFD for ill-formed units
  CharClass cls;
};

CharClass classify(const utf8::Decoded& d) {
  if (!d.valid) return CharClass::kOther;
  if (utf8::is_letter(d.codepoint)) return CharClass::kLetter;
  if (utf8::is_number(d.codepoint)) return CharClass::kNumber;
  if (utf8::is_whitespace(d.codepoint)) return CharClass::kSpace;
  return CharClass::kOther;
}

std::vector<Char> scan(std::string_view text) {
  std::vector<Char> chars;
  chars.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const utf8::Decoded d = utf8::decode(text, pos);
    chars.push_back({pos, d.codepoint, classify(d)});
    pos += d.length;
  }
  return chars;
}

// Length in chars of a contraction starting at i, or 0.
std::size_t contraction(const std::vector<Char>& c, std::size_t i) {
  if (c[i].codepoint != U'\'') return 0;
  auto at = [&](std::size_t k, char32_t want) {
    return i + k < c.size() && c[i + k].codepoint == want;
  };
  if (at(1, U's') || at(1, U't') || at(1, U'm') || at(1, U'd')) return 2;
  if ((at(1, U'r') && at(2, U'e')) || (at(1, U'v') && at(2, U'e')) ||
      (at(1, U'l') && at(2, U'l'))) {
    return 3;
  }
  return 0;
}

}  // namespace

void for_each_piece(std::string_view text,
                    const std::function<void(std::string_view)>& fn) {
  const std::vector<Char> c = scan(text);
  const std::size_t n = c.size();
  auto offset = [&](std::size_t i) { return i < n ? c[i].offset : text.size(); };
  auto run_end = [&](std::size_t i, CharClass cls) {
    while (i < n && c[i].cls == cls) ++i;
    return i;
  };

  std::size_t i = 0;
  while (i < n) {
    std::size_t end = 0;
    if (const std::size_t k = contraction(c, i)) {
      end = i + k;
    } else {
      // " ?X+" for letters, numbers and other symbols.
      const bool lead_space = c[i].codepoint == U' ' && i + 1 < n &&
                              c[i + 1].cls != CharClass::kSpace;
      const std::size_t body = lead_space ? i + 1 : i;
      if (c[body].cls != CharClass::kSpace) {
        end = run_end(body, c[body].cls);
      } else {
        const std::size_t ws_end = run_end(i, CharClass::kSpace);
        if (ws_end == n || ws_end - i == 1) {
          end = ws_end;  // \s+ to the end, or a lone space before \S
        } else {
          end = ws_end - 1;  // \s+(?!\S): leave one for the next token
        }
      }
    }
    fn(text.substr(offset(i), offset(end) - offset(i)));
    i = end;
  }
}

std::vector<std::string_view> pre_split(std::string_view text) {
  std::vector<std::string_view> pieces;
  for_each_piece(text, [&](std::string_view p) { pieces.push_back(p); });
  return pieces;
}

}  // namespace tokpipe::bpe
