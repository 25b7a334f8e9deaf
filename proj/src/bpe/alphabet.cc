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

ByteAlphabet::ByteAlphabet() {
  char32_t next = 0x100;
  for (int b = 0; b < 256; ++b) {
    forward_[b] = (b >= 0x21 && b <= 0x7E) ? static_cast<char32_t>(b) : next++;
    utf8::append(symbols_[b], forward_[b]);
  }
}

const ByteAlphabet& ByteAlphabet::get() {
  static const ByteAlphabet kAlphabet;
  return kAlphabet;
}

std::optional<std::uint8_t> ByteAlphabet::reverse(char32_t codepoint) const {
  if (codepoint >= 0x21 && codepoint <= 0x7E) return static_cast<std::uint8_t>(codepoint);
  // 0x00-0x20 -> U+0100-U+0120, 0x7F-0xFF -> U+0121-U+01A1.
  if (codepoint >= 0x100 && codepoint <= 0x120) {
    return static_cast<std::uint8_t>(codepoint - 0x100);
  }
  if (codepoint >= 0x121 && codepoint <= 0x1A1) {
    return static_cast<std::uint8_t>(codepoint - 0x121 + 0x7F);
  }
  return std::nullopt;
}

std::string ByteAlphabet::encode(std::string_view bytes) const {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (char c : bytes) out += symbols_[static_cast<std::uint8_t>(c)];
  return out;
}

std::optional<std::string> ByteAlphabet::decode(std::string_view mapped) const {
  std::string out;
  out.reserve(mapped.size());
  std::size_t pos = 0;
  while (pos < mapped.size()) {
    const utf8::Decoded d = utf8::decode(mapped, pos);
    if (!d.valid) return std::nullopt;
    const auto byte = reverse(d.codepoint);
    if (!byte) return std::nullopt;
    out.push_back(static_cast<char>(*byte));
    pos += d.length;
  }
  return out;
}

}  // namespace tokpipe::bpe
