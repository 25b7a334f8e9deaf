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

// UTF-8 scanning helpers and Unicode character classes.
//
// Decoding follows the "maximal subpart" convention: an ill-formed sequence
// consumes the longest prefix that could have started a valid sequence, or
// one byte. Each consumed ill-formed unit is reported as invalid and, in
// lossy mode, becomes one U+FFFD.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace tokpipe::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

struct Decoded {
  char32_t codepoint = 0;  // kReplacement when !valid
  std::size_t length = 0;  // bytes consumed, >= 1
  bool valid = false;
};

// Decodes the sequence starting at `pos`. Requires pos < text.size().
Decoded decode(std::string_view text, std::size_t pos);

// Byte offset of the first ill-formed sequence, if any.
std::optional<std::size_t> find_invalid(std::string_view text);

// Copy of `text` with each ill-formed unit replaced by U+FFFD.
std::string replace_invalid(std::string_view text,
                            std::size_t* replaced = nullptr);

void append(std::string& out, char32_t codepoint);

// Unicode White_Space property.
bool is_whitespace(char32_t c);
// General category L*.
bool is_letter(char32_t c);
// General category N*.
bool is_number(char32_t c);

}  // namespace tokpipe::utf8
