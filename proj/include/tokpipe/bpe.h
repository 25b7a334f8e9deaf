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

// Byte-level byte-pair encoding.
//
// Tokens live in "alphabet space": every raw byte is mapped to one printable
// codepoint (see ByteAlphabet) and a token string is the UTF-8 encoding of
// its mapped codepoints. This keeps vocab.json and merges.txt printable and
// whitespace-free, while encode() covers arbitrary byte strings.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tokpipe/corpus.h"

namespace tokpipe::bpe {

using TokenId = std::uint32_t;

// Bijection between the 256 byte values and printable codepoints. Printable
// ASCII (0x21-0x7E) maps to itself; every other byte maps, in ascending byte
// order, to consecutive codepoints starting at U+0100.
class ByteAlphabet {
 public:
  static const ByteAlphabet& get();

  char32_t forward(std::uint8_t byte) const { return forward_[byte]; }
  std::optional<std::uint8_t> reverse(char32_t codepoint) const;

  // UTF-8 encoding of forward(byte).
  const std::string& symbol(std::uint8_t byte) const { return symbols_[byte]; }

  // Maps raw bytes into alphabet space.
  std::string encode(std::string_view bytes) const;
  // Inverse of encode(). Fails on codepoints outside the alphabet.
  std::optional<std::string> decode(std::string_view mapped) const;

 private:
  ByteAlphabet();

  std::array<char32_t, 256> forward_{};
  std::array<std::string, 256> symbols_;
};

// Splits text into pieces with the GPT-2 pattern
//
//   's|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+
//
// evaluated over codepoints. Ill-formed UTF-8 units count as symbols (the
// [^\s\p{L}\p{N}] class). The pieces concatenate to the input.
std::vector<std::string_view> pre_split(std::string_view text);

void for_each_piece(std::string_view text,
                    const std::function<void(std::string_view)>& fn);

struct MergeRule {
  std::string left;
  std::string right;
  std::uint32_t rank = 0;

  bool operator==(const MergeRule&) const = default;
};

// Special tokens in role order.
enum class SpecialRole : std::size_t { kBegin = 0, kEnd, kPad, kUnknown, kMask };

inline const std::vector<std::string>& default_special_tokens() {
  static const std::vector<std::string> kTokens = {"<s>", "</s>", "<pad>", "<unk>",
                                                   "<mask>"};
  return kTokens;
}

// Immutable once built; safe to share across threads.
class Vocabulary {
 public:
  // Canonical layout: byte symbols get ids 0-255 in byte order, merge
  // results follow in rank order, special tokens come last.
  static Vocabulary from_merges(
      const std::vector<std::pair<std::string, std::string>>& merges,
      const std::vector<std::string>& special_tokens = default_special_tokens());

  // Arbitrary dense id assignment, as read from vocab.json. Tokens that are
  // neither byte symbols nor merge results are the special tokens, ordered
  // by id.
  static Vocabulary from_parts(
      const std::vector<std::string>& tokens_by_id,
      const std::vector<std::pair<std::string, std::string>>& merges);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<TokenId> id(std::string_view token) const;

  const std::vector<MergeRule>& merges() const { return merges_; }
  const std::vector<TokenId>& special_ids() const { return special_ids_; }
  std::vector<std::string> special_tokens() const;
  bool is_special(TokenId id) const { return id < is_special_.size() && is_special_[id]; }
  // Throws InvalidArgument when the vocabulary has no token for `role`.
  TokenId special_id(SpecialRole role) const;

  TokenId byte_id(std::uint8_t byte) const { return byte_ids_[byte]; }

  // Raw bytes a token stands for; empty for special tokens.
  const std::string& token_bytes(TokenId id) const { return token_bytes_.at(id); }

  struct MergeTarget {
    std::uint32_t rank;
    TokenId id;
  };
  std::optional<MergeTarget> merge(TokenId left, TokenId right) const;

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_ && merges_ == other.merges_;
  }

 private:
  Vocabulary() = default;
  void index_merges(const std::vector<std::pair<std::string, std::string>>& merges,
                    bool assign_ids);
  void finish();

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> token_to_id_;
  std::vector<MergeRule> merges_;
  std::unordered_map<std::uint64_t, MergeTarget> merge_index_;
  std::array<TokenId, 256> byte_ids_{};
  std::vector<TokenId> special_ids_;
  std::vector<bool> is_special_;
  std::vector<std::string> token_bytes_;
};

struct TrainOptions {
  std::size_t num_merges = 52000 - 256 - 5;
  std::vector<std::string> special_tokens = default_special_tokens();
  unsigned threads = 1;
};

// Merge count that yields `vocab_size` tokens in total.
std::size_t merges_for_vocab_size(std::size_t vocab_size, std::size_t num_special);

// Greedy BPE. Each step merges the most frequent adjacent pair (ties: the
// lexicographically smallest left, then right token string). Pairs whose
// concatenation is already a token, special tokens included, are never
// merged. Training stops early once the best pair occurs fewer than twice.
Vocabulary train_vocab(DocumentStream& corpus, const TrainOptions& options);

// Same, from pre-split piece counts in raw byte space.
Vocabulary train_vocab(const std::unordered_map<std::string, std::uint64_t>& piece_counts,
                       const TrainOptions& options);

// Pre-split piece counts of a corpus. Throws InvalidArgument when the corpus
// has no documents.
std::unordered_map<std::string, std::uint64_t> count_pieces(DocumentStream& corpus,
                                                            unsigned threads = 1);

// Applies lowest-rank merges until none applies. Never fails: every byte
// has a token.
void encode_append(const Vocabulary& vocab, std::string_view text,
                   std::vector<TokenId>& out);
std::vector<TokenId> encode(const Vocabulary& vocab, std::string_view text);

struct DecodeOptions {
  // Render special tokens as their own strings instead of dropping them.
  bool special_passthrough = false;
};

// Throws InvalidArgument naming the id and its position for ids outside the
// vocabulary.
std::string decode(const Vocabulary& vocab, std::span<const TokenId> ids,
                   const DecodeOptions& options = {});

// vocab.json: one JSON object, token -> id, in id order, no trailing newline.
std::string vocab_json(const Vocabulary& vocab);
// merges.txt: "#version: 1" then "left right" per merge in rank order.
std::string merges_txt(const Vocabulary& vocab);

Vocabulary parse_vocab(std::string_view vocab_json_text, std::string_view merges_text);

void save_vocab(const Vocabulary& vocab, const std::filesystem::path& dir);
Vocabulary load_vocab(const std::filesystem::path& dir);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

// fnv1a64 of the vocab.json bytes.
std::uint64_t fingerprint(const Vocabulary& vocab);

}  // namespace tokpipe::bpe
