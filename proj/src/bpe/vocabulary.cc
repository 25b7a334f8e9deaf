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

#include <string>

#include "tokpipe/bpe.h"
#include "tokpipe/error.h"

namespace tokpipe::bpe {

namespace {

constexpr std::uint64_t pair_key(TokenId left, TokenId right) {
  return (static_cast<std::uint64_t>(left) << 32) | right;
}

}  // namespace

Vocabulary Vocabulary::from_merges(
    const std::vector<std::pair<std::string, std::string>>& merges,
    const std::vector<std::string>& special_tokens) {
  const ByteAlphabet& alphabet = ByteAlphabet::get();
  Vocabulary v;
  v.tokens_.reserve(256 + merges.size() + special_tokens.size());
  for (int b = 0; b < 256; ++b) {
    const auto byte = static_cast<std::uint8_t>(b);
    v.byte_ids_[byte] = static_cast<TokenId>(b);
    v.tokens_.push_back(alphabet.symbol(byte));
    v.token_to_id_.emplace(v.tokens_.back(), static_cast<TokenId>(b));
  }
  v.index_merges(merges, /*assign_ids=*/true);
  for (const std::string& special : special_tokens) {
    const auto id = static_cast<TokenId>(v.tokens_.size());
    if (!v.token_to_id_.emplace(special, id).second) {
      throw InvalidArgument("special token '" + special + "' duplicates another token");
    }
    v.tokens_.push_back(special);
    v.special_ids_.push_back(id);
  }
  v.finish();
  return v;
}

Vocabulary Vocabulary::from_parts(
    const std::vector<std::string>& tokens_by_id,
    const std::vector<std::pair<std::string, std::string>>& merges) {
  const ByteAlphabet& alphabet = ByteAlphabet::get();
  Vocabulary v;
  v.tokens_ = tokens_by_id;
  for (std::size_t id = 0; id < v.tokens_.size(); ++id) {
    if (!v.token_to_id_.emplace(v.tokens_[id], static_cast<TokenId>(id)).second) {
      throw InvalidArgument("token '" + v.tokens_[id] + "' appears twice");
    }
  }
  for (int b = 0; b < 256; ++b) {
    const auto byte = static_cast<std::uint8_t>(b);
    const auto it = v.token_to_id_.find(alphabet.symbol(byte));
    if (it == v.token_to_id_.end()) {
      throw InvalidArgument("vocabulary lacks the symbol for byte " + std::to_string(b));
    }
    v.byte_ids_[byte] = it->second;
  }
  v.index_merges(merges, /*assign_ids=*/false);

  std::vector<bool> structural(v.tokens_.size(), false);
  for (TokenId id : v.byte_ids_) structural[id] = true;
  for (const auto& [key, target] : v.merge_index_) structural[target.id] = true;
  for (std::size_t id = 0; id < structural.size(); ++id) {
    if (!structural[id]) v.special_ids_.push_back(static_cast<TokenId>(id));
  }
  v.finish();
  return v;
}

// Registers merges in rank order. Each side must be a byte symbol or the
// result of an earlier merge, and each result must be a new token.
void Vocabulary::index_merges(
    const std::vector<std::pair<std::string, std::string>>& merges, bool assign_ids) {
  std::vector<bool> produced(tokens_.size(), false);
  for (TokenId id : byte_ids_) produced[id] = true;
  merges_.reserve(merges.size());
  merge_index_.reserve(merges.size());

  for (std::size_t rank = 0; rank < merges.size(); ++rank) {
    const auto& [left, right] = merges[rank];
    const std::string where = "merge " + std::to_string(rank) + " (" + left + " " + right + ")";
    auto find_side = [&](const std::string& side) {
      const auto it = token_to_id_.find(side);
      if (it == token_to_id_.end()) {
        throw InvalidArgument(where + ": unknown token '" + side + "'");
      }
      if (it->second >= produced.size() || !produced[it->second]) {
        throw InvalidArgument(where + ": token '" + side +
                              "' is not produced by an earlier merge");
      }
      return it->second;
    };
    const TokenId left_id = find_side(left);
    const TokenId right_id = find_side(right);
    const std::string joined = left + right;

    TokenId result;
    if (assign_ids) {
      result = static_cast<TokenId>(tokens_.size());
      if (!token_to_id_.emplace(joined, result).second) {
        throw InvalidArgument(where + ": result '" + joined + "' is already a token");
      }
      tokens_.push_back(joined);
    } else {
      const auto it = token_to_id_.find(joined);
      if (it == token_to_id_.end()) {
        throw InvalidArgument(where + ": result '" + joined + "' is not in the vocabulary");
      }
      result = it->second;
    }
    if (result < produced.size() && produced[result]) {
      throw InvalidArgument(where + ": result '" + joined + "' is produced twice");
    }
    if (!merge_index_
             .emplace(pair_key(left_id, right_id),
                      MergeTarget{static_cast<std::uint32_t>(rank), result})
             .second) {
      throw InvalidArgument(where + ": duplicate pair");
    }
    if (produced.size() <= result) produced.resize(result + 1, false);
    produced[result] = true;
    merges_.push_back({left, right, static_cast<std::uint32_t>(rank)});
  }
}

void Vocabulary::finish() {
  const ByteAlphabet& alphabet = ByteAlphabet::get();
  is_special_.assign(tokens_.size(), false);
  for (TokenId id : special_ids_) is_special_[id] = true;
  token_bytes_.resize(tokens_.size());
  for (std::size_t id = 0; id < tokens_.size(); ++id) {
    if (is_special_[id]) continue;
    auto raw = alphabet.decode(tokens_[id]);
    if (!raw) {
      throw InvalidArgument("token '" + tokens_[id] + "' is outside the byte alphabet");
    }
    token_bytes_[id] = std::move(*raw);
  }
}

std::optional<TokenId> Vocabulary::id(std::string_view token) const {
  const auto it = token_to_id_.find(std::string(token));
  if (it == token_to_id_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Vocabulary::special_tokens() const {
  std::vector<std::string> out;
  out.reserve(special_ids_.size());
  for (TokenId id : special_ids_) out.push_back(tokens_[id]);
  return out;
}

TokenId Vocabulary::special_id(SpecialRole role) const {
  const auto index = static_cast<std::size_t>(role);
  if (index >= special_ids_.size()) {
    throw InvalidArgument("vocabulary has no special token at role index " +
                          std::to_string(index));
  }
  return special_ids_[index];
}

std::optional<Vocabulary::MergeTarget> Vocabulary::merge(TokenId left,
                                                         TokenId right) const {
  const auto it = merge_index_.find(pair_key(left, right));
  if (it == merge_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t merges_for_vocab_size(std::size_t vocab_size, std::size_t num_special) {
  if (vocab_size < 256 + num_special) {
    throw InvalidArgument("vocabulary size " + std::to_string(vocab_size) +
                          " is below the 256 byte symbols plus " +
                          std::to_string(num_special) + " special tokens");
  }
  return vocab_size - 256 - num_special;
}

}  // namespace tokpipe::bpe
