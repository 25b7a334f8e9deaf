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

#include "tokpipe/pretrain.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>

#include "tokpipe/binarize.h"
#include "tokpipe/error.h"
#include "tokpipe/random.h"

namespace tokpipe::pretrain {

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>(static_cast<std::uint8_t>(value >> (8 * i)));
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes{};
  in.read(bytes.data(), bytes.size());
  if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
    throw ParseError(0, "masked-example stream truncated");
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<std::uint8_t>(bytes[i])) << (8 * i);
  }
  return value;
}

}  // namespace

void ScheduleConfig::validate() const {
  if (!(warmup_steps > 0 && warmup_steps < total_steps)) {
    throw InvalidArgument("schedule needs 0 < warmup_steps < total_steps");
  }
  if (!(end_lr >= 0.0 && peak_lr > end_lr)) {
    throw InvalidArgument("schedule needs peak_lr > end_lr >= 0");
  }
  if (!(decay_power >= 1.0)) throw InvalidArgument("decay_power must be >= 1");
}

double learning_rate(std::uint64_t step, const ScheduleConfig& config) {
  config.validate();
  if (step > config.total_steps) {
    spdlog::warn("step {} is past the last scheduled step {}; using end_lr", step,
                 config.total_steps);
    return config.end_lr;
  }
  if (step <= config.warmup_steps) {
    return static_cast<double>(step) / static_cast<double>(config.warmup_steps) * config.peak_lr;
  }
  const double remaining = static_cast<double>(config.total_steps - step) /
                           static_cast<double>(config.total_steps - config.warmup_steps);
  const double factor = config.decay_power == 1.0 ? remaining : std::pow(remaining, config.decay_power);
  return config.end_lr + (config.peak_lr - config.end_lr) * factor;
}

TrainingBudget training_budget(const BatchPlan& plan, std::optional<std::uint64_t> corpus_tokens) {
  if (plan.sequences_per_batch == 0 || plan.sequence_length == 0 || plan.total_steps == 0) {
    throw InvalidArgument("batch plan fields must be positive");
  }
  TrainingBudget budget;
  budget.tokens_per_step = plan.sequences_per_batch * plan.sequence_length;
  budget.total_tokens = budget.tokens_per_step * plan.total_steps;
  if (corpus_tokens && *corpus_tokens > 0) {
    budget.epochs = static_cast<double>(budget.total_tokens) / static_cast<double>(*corpus_tokens);
  }
  return budget;
}

std::size_t PackedBlocks::pad_count() const {
  std::size_t pads = 0;
  for (std::size_t u : used) pads += length - u;
  return pads;
}

PackedBlocks pack_sequences(std::span<const TokenId> ids, std::size_t length, TokenId pad_id,
                            PackingMode mode, TokenId separator) {
  if (length < 2) throw InvalidArgument("sequence length must be at least 2");
  PackedBlocks out;
  out.length = length;
  auto close_block = [&] {
    const std::size_t filled = out.ids.size() - out.size() * length;
    out.used.push_back(filled);
    out.ids.resize(out.size() * length, pad_id);
  };
  auto current_fill = [&] { return out.ids.size() - out.size() * length; };

  if (mode == PackingMode::kCrossDocuments) {
    for (TokenId id : ids) {
      out.ids.push_back(id);
      if (current_fill() == length) close_block();
    }
  } else {
    std::size_t doc_start = 0;
    for (std::size_t i = 0; i <= ids.size(); ++i) {
      if (i < ids.size() && ids[i] != separator) continue;
      const std::size_t doc_end = std::min(i + 1, ids.size());
      const std::size_t doc_len = doc_end - doc_start;
      if (doc_len == 0) break;
      // Move to a fresh block if the document fits there but not here.
      if (current_fill() > 0 && current_fill() + doc_len > length && doc_len <= length) {
        close_block();
      }
      for (std::size_t k = doc_start; k < doc_end; ++k) {
        out.ids.push_back(ids[k]);
        if (current_fill() == length) close_block();
      }
      doc_start = doc_end;
    }
  }
  if (current_fill() > 0) close_block();
  return out;
}

std::vector<TokenId> unpack(const PackedBlocks& blocks) {
  std::vector<TokenId> out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto block = blocks.block(i);
    out.insert(out.end(), block.begin(), block.begin() + static_cast<std::ptrdiff_t>(blocks.used[i]));
  }
  return out;
}

void MaskingConfig::validate() const {
  if (!(mask_rate > 0.0 && mask_rate < 1.0)) throw InvalidArgument("mask_rate must lie in (0, 1)");
  if (mask_token_share < 0.0 || random_token_share < 0.0 || keep_share < 0.0 ||
      std::abs(mask_token_share + random_token_share + keep_share - 1.0) > 1e-9) {
    throw InvalidArgument("mask/random/keep shares must be non-negative and sum to 1");
  }
}

MaskingVocab MaskingVocab::from(const bpe::Vocabulary& vocab) {
  MaskingVocab m;
  m.vocab_size = vocab.size();
  m.special_ids = vocab.special_ids();
  std::sort(m.special_ids.begin(), m.special_ids.end());
  m.mask_id = vocab.special_id(bpe::SpecialRole::kMask);
  return m;
}

std::size_t MaskedExample::corrupted() const {
  return static_cast<std::size_t>(
      std::count_if(kinds.begin(), kinds.end(), [](Corruption k) { return k != Corruption::kNone; }));
}

MaskedExample apply_masking(std::span<const TokenId> block, const MaskingVocab& vocab,
                            const MaskingConfig& config, std::uint64_t call_counter) {
  config.validate();
  const auto& specials = vocab.special_ids;
  if (!std::binary_search(specials.begin(), specials.end(), vocab.mask_id)) {
    throw InvalidArgument("mask id must be one of the special ids");
  }
  if (vocab.vocab_size <= specials.size()) {
    throw InvalidArgument("vocabulary has no non-special token to draw");
  }
  auto is_special = [&](TokenId id) { return std::binary_search(specials.begin(), specials.end(), id); };

  Rng rng(derive_seed(config.seed, call_counter));
  MaskedExample ex;
  ex.input_ids.assign(block.begin(), block.end());
  ex.target_ids.assign(block.size(), kIgnoreTarget);
  ex.kinds.assign(block.size(), Corruption::kNone);

  for (std::size_t i = 0; i < block.size(); ++i) {
    if (is_special(block[i])) continue;
    if (uniform01(rng) >= config.mask_rate) continue;
    ex.target_ids[i] = block[i];
    const double u = uniform01(rng);
    if (u < config.mask_token_share) {
      ex.kinds[i] = Corruption::kMask;
      ex.input_ids[i] = vocab.mask_id;
    } else if (u < config.mask_token_share + config.random_token_share) {
      ex.kinds[i] = Corruption::kRandom;
      TokenId drawn;
      do {
        drawn = static_cast<TokenId>(uniform_below(rng, vocab.vocab_size));
      } while (is_special(drawn));
      ex.input_ids[i] = drawn;
    } else {
      ex.kinds[i] = Corruption::kKeep;
    }
  }
  return ex;
}

DynamicMasker::DynamicMasker(MaskingVocab vocab, MaskingConfig config)
    : vocab_(std::move(vocab)), config_(config) {
  std::sort(vocab_.special_ids.begin(), vocab_.special_ids.end());
  config_.validate();
}

ExamplesSummary write_masked_examples(const std::filesystem::path& dataset,
                                      const bpe::Vocabulary& vocab,
                                      std::size_t sequence_length, const MaskingConfig& config,
                                      std::ostream& out) {
  if (sequence_length < 2) throw InvalidArgument("sequence length must be at least 2");
  config.validate();
  DatasetReader reader(dataset);
  const std::uint64_t fp = bpe::fingerprint(vocab);
  if (reader.header().fingerprint != fp) {
    throw InvalidArgument(dataset.string() + " was binarized with a different vocabulary");
  }
  const MaskingVocab mvocab = MaskingVocab::from(vocab);
  const TokenId pad = vocab.special_id(bpe::SpecialRole::kPad);
  const std::uint64_t count = reader.header().token_count;
  const std::uint64_t examples = (count + sequence_length - 1) / sequence_length;

  out.write("GOTM", 4);
  put_le<std::uint16_t>(out, kExamplesVersion);
  put_le<std::uint64_t>(out, fp);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(sequence_length));
  put_le<std::uint64_t>(out, examples);

  ExamplesSummary summary;
  std::vector<TokenId> block;
  for (std::uint64_t i = 0; i < examples; ++i) {
    block.clear();
    reader.read(block, sequence_length);
    block.resize(sequence_length, pad);
    const MaskedExample ex = apply_masking(block, mvocab, config, i);
    for (TokenId id : ex.input_ids) put_le<std::uint32_t>(out, id);
    for (TokenId id : ex.target_ids) put_le<std::uint32_t>(out, id);
    for (Corruption k : ex.kinds) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(k));
    ++summary.examples;
    summary.corrupted += ex.corrupted();
    summary.positions += sequence_length;
  }
  if (!out) throw Error("failed writing masked examples");
  return summary;
}

ExamplesFile read_masked_examples(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != 4 || std::string_view(magic.data(), 4) != "GOTM") {
    throw ParseError(0, "bad masked-example magic");
  }
  if (get_le<std::uint16_t>(in) != kExamplesVersion) {
    throw ParseError(0, "unsupported masked-example version");
  }
  ExamplesFile file;
  file.fingerprint = get_le<std::uint64_t>(in);
  file.sequence_length = get_le<std::uint32_t>(in);
  const auto count = get_le<std::uint64_t>(in);
  for (std::uint64_t e = 0; e < count; ++e) {
    MaskedExample ex;
    for (std::size_t i = 0; i < file.sequence_length; ++i) ex.input_ids.push_back(get_le<std::uint32_t>(in));
    for (std::size_t i = 0; i < file.sequence_length; ++i) ex.target_ids.push_back(get_le<std::uint32_t>(in));
    for (std::size_t i = 0; i < file.sequence_length; ++i) {
      ex.kinds.push_back(static_cast<Corruption>(get_le<std::uint32_t>(in)));
    }
    file.examples.push_back(std::move(ex));
  }
  return file;
}

}  // namespace tokpipe::pretrain
