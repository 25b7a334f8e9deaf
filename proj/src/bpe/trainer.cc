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

#include <algorithm>
#include <queue>
#include <thread>
#include <unordered_set>

#include "tokpipe/bpe.h"
#include "tokpipe/error.h"

namespace tokpipe::bpe {

namespace {

constexpr std::uint64_t pair_key(TokenId left, TokenId right) {
  return (static_cast<std::uint64_t>(left) << 32) | right;
}
constexpr TokenId left_of(std::uint64_t key) { return static_cast<TokenId>(key >> 32); }
constexpr TokenId right_of(std::uint64_t key) { return static_cast<TokenId>(key); }

// A distinct pre-split piece and how often it occurs.
struct Word {
  std::vector<TokenId> symbols;
  std::uint64_t count;
};

struct Candidate {
  std::uint64_t count;
  std::uint64_t pair;
};

class Trainer {
 public:
  Trainer(const std::unordered_map<std::string, std::uint64_t>& piece_counts,
          const TrainOptions& options)
      : options_(options) {
    const ByteAlphabet& alphabet = ByteAlphabet::get();
    for (int b = 0; b < 256; ++b) {
      strings_.push_back(alphabet.symbol(static_cast<std::uint8_t>(b)));
    }
    taken_.insert(strings_.begin(), strings_.end());
    taken_.insert(options.special_tokens.begin(), options.special_tokens.end());

    // Sorted piece order makes word indices, and thus the run, reproducible.
    std::vector<const std::pair<const std::string, std::uint64_t>*> sorted;
    sorted.reserve(piece_counts.size());
    for (const auto& entry : piece_counts) sorted.push_back(&entry);
    std::sort(sorted.begin(), sorted.end(),
              [](const auto* a, const auto* b) { return a->first < b->first; });
    words_.reserve(sorted.size());
    for (const auto* entry : sorted) {
      Word w;
      w.count = entry->second;
      w.symbols.reserve(entry->first.size());
      for (char c : entry->first) w.symbols.push_back(static_cast<std::uint8_t>(c));
      words_.push_back(std::move(w));
    }
  }

  std::vector<std::pair<std::string, std::string>> run() {
    for (std::uint32_t w = 0; w < words_.size(); ++w) {
      const Word& word = words_[w];
      for (std::size_t i = 0; i + 1 < word.symbols.size(); ++i) {
        const std::uint64_t key = pair_key(word.symbols[i], word.symbols[i + 1]);
        counts_[key] += word.count;
        where_[key].push_back(w);
      }
    }
    for (const auto& [key, count] : counts_) heap_.push({count, key});
    visited_.assign(words_.size(), UINT32_MAX);

    std::vector<std::pair<std::string, std::string>> merges;
    while (merges.size() < options_.num_merges) {
      const auto best = pop_best();
      if (!best) break;
      const std::string& left = strings_[left_of(*best)];
      const std::string& right = strings_[right_of(*best)];
      merges.emplace_back(left, right);
      apply(*best, static_cast<std::uint32_t>(merges.size()));
    }
    return merges;
  }

 private:
  // Strict weak order for the max-heap: higher count wins, then the
  // lexicographically smaller (left, right) pair.
  struct Lower {
    const std::vector<std::string>* strings;
    bool operator()(const Candidate& a, const Candidate& b) const {
      if (a.count != b.count) return a.count < b.count;
      const std::string& al = (*strings)[left_of(a.pair)];
      const std::string& bl = (*strings)[left_of(b.pair)];
      if (al != bl) return al > bl;
      return (*strings)[right_of(a.pair)] > (*strings)[right_of(b.pair)];
    }
  };

  // Heap entries may be stale. Every pair has at least one entry whose count
  // is >= its current count, so the first entry that matches its current
  // count is the true maximum.
  std::optional<std::uint64_t> pop_best() {
    while (!heap_.empty()) {
      const Candidate top = heap_.top();
      heap_.pop();
      const auto it = counts_.find(top.pair);
      const std::uint64_t current = it == counts_.end() ? 0 : it->second;
      if (current != top.count) {
        if (current > 0) heap_.push({current, top.pair});
        continue;
      }
      if (current < 2) return std::nullopt;
      if (banned_.contains(top.pair)) continue;
      const std::string joined = strings_[left_of(top.pair)] + strings_[right_of(top.pair)];
      if (taken_.contains(joined)) {
        banned_.insert(top.pair);
        continue;
      }
      return top.pair;
    }
    return std::nullopt;
  }

  void apply(std::uint64_t pair, std::uint32_t stamp) {
    const TokenId left = left_of(pair);
    const TokenId right = right_of(pair);
    const auto merged = static_cast<TokenId>(strings_.size());
    strings_.push_back(strings_[left] + strings_[right]);
    taken_.insert(strings_.back());

    std::unordered_map<std::uint64_t, std::int64_t> delta;
    std::vector<TokenId> rewritten;
    const std::vector<std::uint32_t> affected = std::move(where_[pair]);
    where_.erase(pair);
    for (std::uint32_t w : affected) {
      if (visited_[w] == stamp) continue;
      visited_[w] = stamp;
      Word& word = words_[w];
      const auto& s = word.symbols;

      rewritten.clear();
      bool changed = false;
      for (std::size_t i = 0; i < s.size();) {
        if (i + 1 < s.size() && s[i] == left && s[i + 1] == right) {
          rewritten.push_back(merged);
          i += 2;
          changed = true;
        } else {
          rewritten.push_back(s[i]);
          ++i;
        }
      }
      if (!changed) continue;

      const auto weight = static_cast<std::int64_t>(word.count);
      for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        delta[pair_key(s[i], s[i + 1])] -= weight;
      }
      for (std::size_t i = 0; i + 1 < rewritten.size(); ++i) {
        const std::uint64_t key = pair_key(rewritten[i], rewritten[i + 1]);
        delta[key] += weight;
        if (rewritten[i] == merged || rewritten[i + 1] == merged) where_[key].push_back(w);
      }
      word.symbols.swap(rewritten);
    }

    for (const auto& [key, d] : delta) {
      if (d == 0) continue;
      auto& count = counts_[key];
      count = static_cast<std::uint64_t>(static_cast<std::int64_t>(count) + d);
      if (count == 0) {
        counts_.erase(key);
      } else if (d > 0) {
        heap_.push({count, key});
      }
    }
  }

  const TrainOptions& options_;
  std::vector<Word> words_;
  std::vector<std::string> strings_;  // alphabet-space string per symbol id
  std::unordered_set<std::string> taken_;
  std::unordered_map<std::uint64_t, std::uint64_t> counts_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> where_;
  std::unordered_set<std::uint64_t> banned_;
  std::vector<std::uint32_t> visited_;
  std::priority_queue<Candidate, std::vector<Candidate>, Lower> heap_{Lower{&strings_}};
};

}  // namespace

std::unordered_map<std::string, std::uint64_t> count_pieces(DocumentStream& corpus,
                                                            unsigned threads) {
  threads = std::max(1u, threads);
  std::vector<std::unordered_map<std::string, std::uint64_t>> local(threads);
  std::uint64_t documents = 0;

  auto count_batch = [&](const std::vector<std::string>& batch, unsigned worker) {
    auto& counts = local[worker];
    for (std::size_t i = worker; i < batch.size(); i += threads) {
      for_each_piece(batch[i], [&](std::string_view piece) { ++counts[std::string(piece)]; });
    }
  };

  constexpr std::size_t kBatch = 8192;
  std::vector<std::string> batch;
  batch.reserve(kBatch);
  Document doc;
  auto flush = [&] {
    if (threads == 1) {
      count_batch(batch, 0);
    } else {
      std::vector<std::jthread> workers;
      for (unsigned t = 0; t < threads; ++t) workers.emplace_back(count_batch, std::cref(batch), t);
    }
    batch.clear();
  };
  while (corpus.next(doc)) {
    ++documents;
    batch.push_back(std::move(doc.text));
    if (batch.size() == kBatch) flush();
  }
  flush();
  if (documents == 0) throw InvalidArgument("cannot train on an empty corpus");

  auto& total = local[0];
  for (unsigned t = 1; t < threads; ++t) {
    for (auto& [piece, count] : local[t]) total[piece] += count;
  }
  return std::move(total);
}

Vocabulary train_vocab(const std::unordered_map<std::string, std::uint64_t>& piece_counts,
                       const TrainOptions& options) {
  Trainer trainer(piece_counts, options);
  return Vocabulary::from_merges(trainer.run(), options.special_tokens);
}

Vocabulary train_vocab(DocumentStream& corpus, const TrainOptions& options) {
  return train_vocab(count_pieces(corpus, options.threads), options);
}

}  // namespace tokpipe::bpe
