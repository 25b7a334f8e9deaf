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

// Pre-training schedule arithmetic and masked-LM example construction.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "tokpipe/bpe.h"

namespace tokpipe::pretrain {

using bpe::TokenId;

// Linear warmup from 0 to peak_lr, then polynomial decay to end_lr.
struct ScheduleConfig {
  std::uint64_t warmup_steps = 10'000;
  std::uint64_t total_steps = 100'000;
  double peak_lr = 4.0e-4;
  double decay_power = 1.0;
  double end_lr = 0.0;

  // Throws InvalidArgument unless 0 < warmup < total, peak > end >= 0 and
  // decay_power >= 1.
  void validate() const;
};

// Steps past total_steps clamp to end_lr and log a warning.
double learning_rate(std::uint64_t step, const ScheduleConfig& config);

struct BatchPlan {
  std::uint64_t sequences_per_batch = 8'192;
  std::uint64_t sequence_length = 512;
  std::uint64_t total_steps = 100'000;
};

struct TrainingBudget {
  std::uint64_t tokens_per_step = 0;
  std::uint64_t total_tokens = 0;
  std::optional<double> epochs;  // passes over the corpus, when its size is given
};

TrainingBudget training_budget(const BatchPlan& plan,
                               std::optional<std::uint64_t> corpus_tokens = std::nullopt);

enum class PackingMode {
  kCrossDocuments,    // fill every block, documents may straddle blocks
  kRespectDocuments,  // start each document in a fresh block when it fits
};

// Fixed-length blocks in one flat buffer. used[i] counts the non-pad ids
// at the front of block i; the rest of the block is padding.
struct PackedBlocks {
  std::size_t length = 0;
  std::vector<TokenId> ids;
  std::vector<std::size_t> used;

  std::size_t size() const { return used.size(); }
  std::span<const TokenId> block(std::size_t i) const {
    return std::span<const TokenId>(ids).subspan(i * length, length);
  }
  std::size_t pad_count() const;
};

// `separator` marks document ends in `ids`; only kRespectDocuments reads it.
PackedBlocks pack_sequences(std::span<const TokenId> ids, std::size_t length, TokenId pad_id,
                            PackingMode mode = PackingMode::kCrossDocuments,
                            TokenId separator = 0);

// The id stream with padding dropped.
std::vector<TokenId> unpack(const PackedBlocks& blocks);

struct MaskingConfig {
  double mask_rate = 0.15;
  double mask_token_share = 0.8;
  double random_token_share = 0.1;
  double keep_share = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct MaskingVocab {
  std::size_t vocab_size = 0;
  std::vector<TokenId> special_ids;  // never corrupted, never drawn as random
  TokenId mask_id = 0;

  static MaskingVocab from(const bpe::Vocabulary& vocab);
};

enum class Corruption : std::uint8_t { kNone = 0, kMask = 1, kRandom = 2, kKeep = 3 };

inline constexpr TokenId kIgnoreTarget = 0xFFFFFFFFu;

struct MaskedExample {
  std::vector<TokenId> input_ids;
  std::vector<TokenId> target_ids;  // original id where corrupted, else kIgnoreTarget
  std::vector<Corruption> kinds;

  std::size_t corrupted() const;
};

// Corrupts each non-special position with probability mask_rate; a
// corrupted position becomes the mask id, a uniformly drawn non-special id,
// or stays unchanged, by the configured shares. The draw depends only on
// (block, config.seed, call_counter).
MaskedExample apply_masking(std::span<const TokenId> block, const MaskingVocab& vocab,
                            const MaskingConfig& config, std::uint64_t call_counter);

// Dynamic masking: every call draws a fresh pattern.
class DynamicMasker {
 public:
  DynamicMasker(MaskingVocab vocab, MaskingConfig config);

  MaskedExample next(std::span<const TokenId> block) {
    return apply_masking(block, vocab_, config_, calls_++);
  }
  std::uint64_t calls() const { return calls_; }

 private:
  MaskingVocab vocab_;
  MaskingConfig config_;
  std::uint64_t calls_ = 0;
};

// Masked-example stream, integers little-endian:
//
//   "GOTM" | u16 version (1) | u64 vocabulary fingerprint | u32 sequence
//   length L | u64 example count, then per example three sections of L
//   uint32 each: input ids, target ids, corruption kinds.
inline constexpr std::uint16_t kExamplesVersion = 1;
inline constexpr std::size_t kExamplesHeaderSize = 26;

struct ExamplesSummary {
  std::uint64_t examples = 0;
  std::uint64_t corrupted = 0;
  std::uint64_t positions = 0;
};

// Packs a binarized dataset into blocks of `sequence_length` and masks block
// i with call counter i. Throws InvalidArgument when the dataset was made
// with a different vocabulary.
ExamplesSummary write_masked_examples(const std::filesystem::path& dataset,
                                      const bpe::Vocabulary& vocab,
                                      std::size_t sequence_length, const MaskingConfig& config,
                                      std::ostream& out);

struct ExamplesFile {
  std::uint64_t fingerprint = 0;
  std::size_t sequence_length = 0;
  std::vector<MaskedExample> examples;
};

ExamplesFile read_masked_examples(std::istream& in);

}  // namespace tokpipe::pretrain
