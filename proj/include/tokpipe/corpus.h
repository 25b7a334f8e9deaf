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

// Document-per-line corpora: streaming, statistics, sampling and splitting.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tokpipe/error.h"
#include "tokpipe/random.h"

namespace tokpipe {

namespace detail {
class LineReader;
}

struct Document {
  std::string text;  // one line, without the line terminator
  std::uint64_t index = 0;

  bool operator==(const Document&) const = default;
};

enum class Utf8Policy {
  kStrict,  // ill-formed input is an error naming the byte offset
  kLossy,   // ill-formed units become U+FFFD; a warning is logged
};

// Single-consumer pull stream of documents.
class DocumentStream {
 public:
  virtual ~DocumentStream() = default;

  // Fills `doc` with the next document. Returns false at end of stream.
  virtual bool next(Document& doc) = 0;
};

class FileDocumentStream final : public DocumentStream {
 public:
  FileDocumentStream(const std::filesystem::path& path, Utf8Policy policy);
  FileDocumentStream(FileDocumentStream&&) noexcept;
  FileDocumentStream& operator=(FileDocumentStream&&) noexcept;
  ~FileDocumentStream() override;

  bool next(Document& doc) override;

  // Number of ill-formed units replaced so far (lossy mode only).
  std::size_t replacements() const { return replacements_; }

 private:
  std::filesystem::path path_;
  Utf8Policy policy_;
  std::unique_ptr<detail::LineReader> reader_;
  std::uint64_t next_index_ = 0;
  std::size_t replacements_ = 0;
  bool warned_ = false;
};

class MemoryDocumentStream final : public DocumentStream {
 public:
  explicit MemoryDocumentStream(std::vector<std::string> texts);

  bool next(Document& doc) override;

 private:
  std::vector<std::string> texts_;
  std::size_t position_ = 0;
};

FileDocumentStream load_corpus(const std::filesystem::path& path,
                               Utf8Policy policy = Utf8Policy::kStrict);

// Strips one trailing '\r' in place.
void strip_carriage_return(std::string& line);

struct CorpusStats {
  std::uint64_t documents = 0;
  std::uint64_t words = 0;  // maximal runs of non-whitespace codepoints
  std::uint64_t bytes = 0;  // UTF-8 payload, line terminators excluded

  CorpusStats& operator+=(const CorpusStats& other) {
    documents += other.documents;
    words += other.words;
    bytes += other.bytes;
    return *this;
  }
  friend CorpusStats operator+(CorpusStats a, const CorpusStats& b) {
    return a += b;
  }
  bool operator==(const CorpusStats&) const = default;
};

// Statistics of one document text (documents == 1).
CorpusStats document_stats(std::string_view text);

CorpusStats corpus_stats(DocumentStream& stream);

// Same result as corpus_stats(load_corpus(path, policy)), computed over
// `threads` newline-aligned byte ranges of the file. Memory is bounded by
// the longest line per worker.
CorpusStats corpus_stats_file(const std::filesystem::path& path,
                              Utf8Policy policy = Utf8Policy::kStrict,
                              unsigned threads = 1);

// Byte-budget document sampling.
//
// Every document gets a pseudo-random key derived from (seed, index).
// Ordering documents by (key, index), the sample is the shortest prefix
// whose byte total reaches `byte_budget`; it is emitted in corpus order.
// Output bytes therefore fall in [budget, budget + longest document), and
// selection is uniform over documents regardless of their length.
struct SampleResult {
  std::uint64_t documents = 0;
  std::uint64_t bytes = 0;
  // True when the corpus holds fewer than byte_budget bytes; the whole
  // corpus is returned.
  bool budget_exceeds_corpus = false;
};

std::uint64_t sample_key(std::uint64_t seed, std::uint64_t index);

using DocumentSink = std::function<void(const Document&)>;

// Single pass over an arbitrary stream. Holds at most the selected
// documents plus one in memory.
SampleResult sample_documents(DocumentStream& stream, std::uint64_t byte_budget,
                              std::uint64_t seed, const DocumentSink& sink);

std::vector<Document> sample_documents(DocumentStream& stream,
                                       std::uint64_t byte_budget,
                                       std::uint64_t seed);

// Multi-pass variant for files whose total size can be measured up front.
// Memory stays constant in corpus size: one pass builds a byte histogram
// over key buckets, one pass resolves the boundary bucket, and the last
// pass emits. Selects exactly the same documents as the streaming variant.
SampleResult sample_documents_file(const std::filesystem::path& path,
                                   std::uint64_t byte_budget,
                                   std::uint64_t seed, const DocumentSink& sink,
                                   Utf8Policy policy = Utf8Policy::kStrict);

struct SplitSpec {
  double train_fraction = 0.9;
  std::uint64_t seed = 0;
};

// Number of training items for `n` items: round(fraction * n), clamped so
// both sides are non-empty.
std::size_t train_split_size(std::size_t n, double train_fraction);

// Random partition into (train, validation) by a seeded Fisher-Yates
// shuffle. Both outputs keep the relative input order.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_train_validation(
    const std::vector<T>& items, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw InvalidArgument("train fraction must lie in (0, 1)");
  }
  if (items.size() < 2) {
    throw InvalidArgument("need at least 2 items to split, got " +
                          std::to_string(items.size()));
  }
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(spec.seed);
  shuffle(std::span<std::size_t>(order), rng);

  const std::size_t n_train = train_split_size(items.size(), spec.train_fraction);
  std::vector<bool> in_train(items.size(), false);
  for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = true;

  std::pair<std::vector<T>, std::vector<T>> out;
  out.first.reserve(n_train);
  out.second.reserve(items.size() - n_train);
  for (std::size_t i = 0; i < items.size(); ++i) {
    (in_train[i] ? out.first : out.second).push_back(items[i]);
  }
  return out;
}

}  // namespace tokpipe
