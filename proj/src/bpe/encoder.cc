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

#include <queue>

#include "tokpipe/bpe.h"
#include "tokpipe/error.h"

namespace tokpipe::bpe {

namespace {

struct Symbol {
  TokenId id;
  std::int32_t prev;
  std::int32_t next;
  bool alive;
};

struct Candidate {
  std::uint32_t rank;
  std::int32_t pos;
  TokenId result;

  // Min-heap on (rank, pos): equal ranks apply left to right.
  bool operator>(const Candidate& other) const {
    return rank != other.rank ? rank > other.rank : pos > other.pos;
  }
};

void encode_piece(const Vocabulary& vocab, std::string_view piece,
                  std::vector<TokenId>& out) {
  if (piece.size() == 1) {
    out.push_back(vocab.byte_id(static_cast<std::uint8_t>(piece[0])));
    return;
  }
  const auto n = static_cast<std::int32_t>(piece.size());
  std::vector<Symbol> symbols(piece.size());
  for (std::int32_t i = 0; i < n; ++i) {
    symbols[i] = {vocab.byte_id(static_cast<std::uint8_t>(piece[i])), i - 1,
                  i + 1 < n ? i + 1 : -1, true};
  }

  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> heap;
  auto consider = [&](std::int32_t pos) {
    const std::int32_t next = symbols[pos].next;
    if (next < 0) return;
    if (const auto m = vocab.merge(symbols[pos].id, symbols[next].id)) {
      heap.push({m->rank, pos, m->id});
    }
  };
  for (std::int32_t i = 0; i + 1 < n; ++i) consider(i);

  while (!heap.empty()) {
    const Candidate c = heap.top();
    heap.pop();
    Symbol& left = symbols[c.pos];
    if (!left.alive || left.next < 0) continue;
    Symbol& right = symbols[left.next];
    // Merge results are unique per pair, so a matching result means the
    // candidate still describes the current pair.
    const auto m = vocab.merge(left.id, right.id);
    if (!m || m->id != c.result) continue;

    left.id = c.result;
    right.alive = false;
    left.next = right.next;
    if (right.next >= 0) symbols[right.next].prev = c.pos;
    if (left.prev >= 0) consider(left.prev);
    consider(c.pos);
  }

  for (std::int32_t i = 0; i >= 0; i = symbols[i].next) out.push_back(symbols[i].id);
}

}  // namespace

void encode_append(const Vocabulary& vocab, std::string_view text,
                   std::vector<TokenId>& out) {
  for_each_piece(text, [&](std::string_view piece) { encode_piece(vocab, piece, out); });
}

std::vector<TokenId> encode(const Vocabulary& vocab, std::string_view text) {
  std::vector<TokenId> out;
  encode_append(vocab, text, out);
  return out;
}

std::string decode(const Vocabulary& vocab, std::span<const TokenId> ids,
                   const DecodeOptions& options) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const TokenId id = ids[i];
    if (id >= vocab.size()) {
      throw InvalidArgument("token id " + std::to_string(id) + " at position " +
                            std::to_string(i) + " is outside the vocabulary of " +
                            std::to_string(vocab.size()) + " tokens");
    }
    if (vocab.is_special(id)) {
      if (options.special_passthrough) out += vocab.token(id);
      continue;
    }
    out += vocab.token_bytes(id);
  }
  return out;
}

}  // namespace tokpipe::bpe
