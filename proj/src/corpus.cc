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

#include "tokpipe/corpus.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <exception>
#include <map>
#include <thread>
#include <tuple>

#include "line_reader.h"
#include "tokpipe/utf8.h"

namespace tokpipe {

namespace {

// Applies the UTF-8 policy to a raw line. Returns the number of
// replacements made in lossy mode.
std::size_t apply_policy(std::string& line, Utf8Policy policy,
                         std::uint64_t line_offset,
                         const std::filesystem::path& path) {
  const auto bad = utf8::find_invalid(line);
  if (!bad) return 0;
  if (policy == Utf8Policy::kStrict) {
    throw Utf8Error(line_offset + *bad, path.string());
  }
  std::size_t replaced = 0;
  line = utf8::replace_invalid(line, &replaced);
  return replaced;
}

constexpr std::array<std::uint8_t, 128> make_ascii_space_table() {
  std::array<std::uint8_t, 128> t{};
  for (char c : {' ', '\t', '\n', '\v', '\f', '\r'}) t[static_cast<std::size_t>(c)] = 1;
  return t;
}
constexpr auto kAsciiSpace = make_ascii_space_table();

}  // namespace

FileDocumentStream::FileDocumentStream(const std::filesystem::path& path,
                                       Utf8Policy policy)
    : path_(path),
      policy_(policy),
      reader_(std::make_unique<detail::LineReader>(path)) {}

FileDocumentStream::FileDocumentStream(FileDocumentStream&&) noexcept = default;
FileDocumentStream& FileDocumentStream::operator=(FileDocumentStream&&) noexcept =
    default;
FileDocumentStream::~FileDocumentStream() = default;

bool FileDocumentStream::next(Document& doc) {
  if (!reader_->next(doc.text)) return false;
  strip_carriage_return(doc.text);
  const std::size_t replaced =
      apply_policy(doc.text, policy_, reader_->line_offset(), path_);
  if (replaced > 0) {
    replacements_ += replaced;
    if (!warned_) {
      spdlog::warn("{}: invalid UTF-8 near byte offset {} replaced with U+FFFD",
                   path_.string(), reader_->line_offset());
      warned_ = true;
    }
  }
  doc.index = next_index_++;
  return true;
}

MemoryDocumentStream::MemoryDocumentStream(std::vector<std::string> texts)
    : texts_(std::move(texts)) {}

bool MemoryDocumentStream::next(Document& doc) {
  if (position_ >= texts_.size()) return false;
  doc.text = texts_[position_];
  doc.index = position_++;
  return true;
}

FileDocumentStream load_corpus(const std::filesystem::path& path,
                               Utf8Policy policy) {
  return FileDocumentStream(path, policy);
}

void strip_carriage_return(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

CorpusStats document_stats(std::string_view text) {
  CorpusStats stats;
  stats.documents = 1;
  stats.bytes = text.size();
  bool in_word = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto byte = static_cast<unsigned char>(text[pos]);
    bool space;
    if (byte < 0x80) {
      space = kAsciiSpace[byte] != 0;
      ++pos;
    } else {
      const utf8::Decoded d = utf8::decode(text, pos);
      space = d.valid && utf8::is_whitespace(d.codepoint);
      pos += d.length;
    }
    if (!space && !in_word) ++stats.words;
    in_word = !space;
  }
  return stats;
}

CorpusStats corpus_stats(DocumentStream& stream) {
  CorpusStats stats;
  Document doc;
  while (stream.next(doc)) stats += document_stats(doc.text);
  return stats;
}

CorpusStats corpus_stats_file(const std::filesystem::path& path,
                              Utf8Policy policy, unsigned threads) {
  std::error_code ec;
  const std::uint64_t size = std::filesystem::file_size(path, ec);
  if (ec) throw IoError(path.string(), ec.message());

  // Small files are not worth sharding.
  constexpr std::uint64_t kMinShard = 1 << 20;
  const std::uint64_t shards = std::clamp<std::uint64_t>(
      std::min<std::uint64_t>(threads, size / kMinShard), 1, 256);

  std::vector<CorpusStats> partial(shards);
  std::vector<std::exception_ptr> errors(shards);
  auto work = [&](std::uint64_t shard) {
    try {
      const std::uint64_t begin = size * shard / shards;
      const std::uint64_t end = size * (shard + 1) / shards;
      detail::LineReader reader(path, begin, end);
      std::string line;
      CorpusStats local;
      while (reader.next(line)) {
        strip_carriage_return(line);
        apply_policy(line, policy, reader.line_offset(), path);
        local += document_stats(line);
      }
      partial[shard] = local;
    } catch (...) {
      errors[shard] = std::current_exception();
    }
  };

  if (shards == 1) {
    work(0);
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(shards);
    for (std::uint64_t s = 0; s < shards; ++s) workers.emplace_back(work, s);
  }
  // The earliest shard holds the earliest error offset.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  CorpusStats total;
  for (const auto& p : partial) total += p;
  return total;
}

std::uint64_t sample_key(std::uint64_t seed, std::uint64_t index) {
  return derive_seed(seed, index);
}

SampleResult sample_documents(DocumentStream& stream, std::uint64_t byte_budget,
                              std::uint64_t seed, const DocumentSink& sink) {
  if (byte_budget == 0) throw InvalidArgument("byte budget must be positive");

  using Key = std::pair<std::uint64_t, std::uint64_t>;  // (key, index)
  std::map<Key, Document> kept;
  std::uint64_t kept_bytes = 0;

  Document doc;
  while (stream.next(doc)) {
    const Key key{sample_key(seed, doc.index), doc.index};
    if (kept_bytes >= byte_budget && !kept.empty() &&
        key > std::prev(kept.end())->first) {
      continue;
    }
    kept_bytes += doc.text.size();
    kept.emplace(key, std::move(doc));
    doc = Document{};
    // Drop tail documents that are no longer needed to reach the budget.
    while (kept.size() > 1) {
      const auto last = std::prev(kept.end());
      const std::uint64_t b = last->second.text.size();
      if (kept_bytes - b < byte_budget) break;
      kept_bytes -= b;
      kept.erase(last);
    }
  }

  SampleResult result;
  result.budget_exceeds_corpus = kept_bytes < byte_budget;
  if (result.budget_exceeds_corpus) {
    spdlog::warn("sample budget of {} bytes exceeds the corpus ({} bytes); "
                 "returning every document",
                 byte_budget, kept_bytes);
  }

  std::vector<Document*> ordered;
  ordered.reserve(kept.size());
  for (auto& [key, d] : kept) ordered.push_back(&d);
  std::sort(ordered.begin(), ordered.end(),
            [](const Document* a, const Document* b) { return a->index < b->index; });
  for (const Document* d : ordered) {
    sink(*d);
    ++result.documents;
    result.bytes += d->text.size();
  }
  return result;
}

std::vector<Document> sample_documents(DocumentStream& stream,
                                       std::uint64_t byte_budget,
                                       std::uint64_t seed) {
  std::vector<Document> out;
  sample_documents(stream, byte_budget, seed,
                   [&](const Document& d) { out.push_back(d); });
  return out;
}

SampleResult sample_documents_file(const std::filesystem::path& path,
                                   std::uint64_t byte_budget,
                                   std::uint64_t seed, const DocumentSink& sink,
                                   Utf8Policy policy) {
  if (byte_budget == 0) throw InvalidArgument("byte budget must be positive");

  constexpr int kBucketBits = 16;
  auto bucket_of = [](std::uint64_t key) {
    return static_cast<std::size_t>(key >> (64 - kBucketBits));
  };

  // Pass 1: bytes per key bucket.
  std::vector<std::uint64_t> histogram(std::size_t{1} << kBucketBits, 0);
  std::uint64_t total = 0;
  {
    auto stream = load_corpus(path, policy);
    Document doc;
    while (stream.next(doc)) {
      histogram[bucket_of(sample_key(seed, doc.index))] += doc.text.size();
      total += doc.text.size();
    }
  }

  using Key = std::pair<std::uint64_t, std::uint64_t>;
  Key threshold{UINT64_MAX, UINT64_MAX};
  SampleResult result;
  result.budget_exceeds_corpus = total < byte_budget;
  if (result.budget_exceeds_corpus) {
    spdlog::warn("sample budget of {} bytes exceeds the corpus ({} bytes); "
                 "returning every document",
                 byte_budget, total);
  } else {
    std::size_t boundary = 0;
    std::uint64_t before = 0;
    while (before + histogram[boundary] < byte_budget) before += histogram[boundary++];

    // Pass 2: order the boundary bucket exactly.
    std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> members;
    auto stream = load_corpus(path, policy);
    Document doc;
    while (stream.next(doc)) {
      const std::uint64_t key = sample_key(seed, doc.index);
      if (bucket_of(key) == boundary) members.emplace_back(key, doc.index, doc.text.size());
    }
    std::sort(members.begin(), members.end());
    for (const auto& [key, index, bytes] : members) {
      before += bytes;
      if (before >= byte_budget) {
        threshold = {key, index};
        break;
      }
    }
  }

  // Pass 3: emit in corpus order.
  auto stream = load_corpus(path, policy);
  Document doc;
  while (stream.next(doc)) {
    if (Key{sample_key(seed, doc.index), doc.index} > threshold) continue;
    sink(doc);
    ++result.documents;
    result.bytes += doc.text.size();
  }
  return result;
}

std::size_t train_split_size(std::size_t n, double train_fraction) {
  const auto rounded = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  return std::clamp<std::size_t>(rounded, 1, n - 1);
}

}  // namespace tokpipe
