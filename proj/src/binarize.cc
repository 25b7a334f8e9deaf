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

#include "tokpipe/binarize.h"

#include <algorithm>
#include <thread>

#include "tokpipe/error.h"

namespace tokpipe {

namespace {

template <typename T>
void put_le(char* dst, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    dst[i] = static_cast<char>(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

template <typename T>
T get_le(const char* src) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<std::uint8_t>(src[i])) << (8 * i);
  }
  return value;
}

void write_ids(std::ofstream& out, std::span<const bpe::TokenId> ids, std::vector<char>& scratch,
               const std::filesystem::path& path) {
  scratch.resize(ids.size() * 4);
  for (std::size_t i = 0; i < ids.size(); ++i) put_le<std::uint32_t>(&scratch[4 * i], ids[i]);
  out.write(scratch.data(), static_cast<std::streamsize>(scratch.size()));
  if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace

std::array<char, kDatasetHeaderSize> encode_header(const DatasetHeader& header) {
  std::array<char, kDatasetHeaderSize> bytes{};
  std::copy(kDatasetMagic.begin(), kDatasetMagic.end(), bytes.begin());
  put_le<std::uint16_t>(&bytes[4], header.version);
  put_le<std::uint64_t>(&bytes[6], header.fingerprint);
  put_le<std::uint64_t>(&bytes[14], header.token_count);
  return bytes;
}

DatasetHeader decode_header(std::span<const char> bytes) {
  if (bytes.size() < kDatasetHeaderSize) {
    throw ParseError(0, "dataset header truncated: " + std::to_string(bytes.size()) + " bytes");
  }
  if (!std::equal(kDatasetMagic.begin(), kDatasetMagic.end(), bytes.begin())) {
    throw ParseError(0, "bad dataset magic");
  }
  DatasetHeader header;
  header.version = get_le<std::uint16_t>(&bytes[4]);
  if (header.version != kDatasetVersion) {
    throw ParseError(0, "unsupported dataset version " + std::to_string(header.version));
  }
  header.fingerprint = get_le<std::uint64_t>(&bytes[6]);
  header.token_count = get_le<std::uint64_t>(&bytes[14]);
  return header;
}

BinarizeSummary binarize(DocumentStream& corpus, const bpe::Vocabulary& vocab,
                         const std::filesystem::path& out_path, unsigned threads) {
  threads = std::max(1u, threads);
  const bpe::TokenId end_of_document = vocab.special_id(bpe::SpecialRole::kEnd);

  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(out_path.string(), "cannot open for writing");

  BinarizeSummary summary;
  summary.header.fingerprint = bpe::fingerprint(vocab);
  const auto placeholder = encode_header(summary.header);
  out.write(placeholder.data(), placeholder.size());

  constexpr std::size_t kBatch = 4096;
  std::vector<std::string> batch;
  std::vector<std::vector<bpe::TokenId>> encoded(kBatch);
  std::vector<char> scratch;
  auto flush = [&] {
    auto work = [&](unsigned worker) {
      for (std::size_t i = worker; i < batch.size(); i += threads) {
        encoded[i].clear();
        bpe::encode_append(vocab, batch[i], encoded[i]);
        encoded[i].push_back(end_of_document);
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::jthread> workers;
      for (unsigned t = 0; t < threads; ++t) workers.emplace_back(work, t);
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
      write_ids(out, encoded[i], scratch, out_path);
      summary.header.token_count += encoded[i].size();
    }
    summary.documents += batch.size();
    batch.clear();
  };

  Document doc;
  while (corpus.next(doc)) {
    batch.push_back(std::move(doc.text));
    if (batch.size() == kBatch) flush();
  }
  flush();

  const auto header = encode_header(summary.header);
  out.seekp(0);
  out.write(header.data(), header.size());
  out.flush();
  if (!out) throw IoError(out_path.string(), "write failed");
  return summary;
}

DatasetReader::DatasetReader(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw IoError(path.string(), "cannot open for reading");
  std::array<char, kDatasetHeaderSize> bytes{};
  in_.read(bytes.data(), bytes.size());
  try {
    header_ = decode_header(std::span<const char>(bytes.data(), static_cast<std::size_t>(in_.gcount())));
  } catch (const ParseError& e) {
    throw ParseError(path.string(), 0, e.detail());
  }
  std::error_code ec;
  const std::uint64_t size = std::filesystem::file_size(path, ec);
  if (ec) throw IoError(path.string(), ec.message());
  if (size != kDatasetHeaderSize + header_.payload_bytes()) {
    throw ParseError(path.string(), 0,
                     "file size " + std::to_string(size) + " does not match token count " +
                         std::to_string(header_.token_count));
  }
  remaining_ = header_.token_count;
}

bool DatasetReader::read(std::vector<bpe::TokenId>& out, std::size_t max_ids) {
  if (remaining_ == 0) return false;
  const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(remaining_, max_ids));
  std::vector<char> raw(n * 4);
  in_.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in_.gcount()) != raw.size()) {
    throw IoError(path_.string(), "unexpected end of payload");
  }
  out.reserve(out.size() + n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(get_le<std::uint32_t>(&raw[4 * i]));
  remaining_ -= n;
  return true;
}

std::vector<bpe::TokenId> read_dataset(const std::filesystem::path& path,
                                       DatasetHeader* header) {
  DatasetReader reader(path);
  if (header) *header = reader.header();
  std::vector<bpe::TokenId> ids;
  while (reader.read(ids, 1 << 20)) {
  }
  return ids;
}

FertilityReport fertility(DocumentStream& corpus, const bpe::Vocabulary& vocab) {
  FertilityReport report;
  std::vector<bpe::TokenId> ids;
  Document doc;
  while (corpus.next(doc)) {
    ids.clear();
    bpe::encode_append(vocab, doc.text, ids);
    const CorpusStats s = document_stats(doc.text);
    ++report.documents;
    report.tokens += ids.size();
    report.words += s.words;
    report.bytes += s.bytes;
  }
  if (report.words > 0) {
    report.tokens_per_word = static_cast<double>(report.tokens) / static_cast<double>(report.words);
  }
  if (report.bytes > 0) {
    report.tokens_per_byte = static_cast<double>(report.tokens) / static_cast<double>(report.bytes);
  }
  return report;
}

SizeReport size_report(std::uint64_t a_payload_bytes, std::uint64_t b_payload_bytes) {
  if (b_payload_bytes == 0) throw InvalidArgument("reference dataset has an empty payload");
  SizeReport r;
  r.a_bytes = a_payload_bytes;
  r.b_bytes = b_payload_bytes;
  r.ratio = static_cast<double>(a_payload_bytes) / static_cast<double>(b_payload_bytes);
  r.reduction = 1.0 - r.ratio;
  return r;
}

SizeReport size_report(const DatasetHeader& a, const DatasetHeader& b) {
  return size_report(a.payload_bytes(), b.payload_bytes());
}

SizeReport size_report(const std::filesystem::path& a, const std::filesystem::path& b) {
  return size_report(DatasetReader(a).header(), DatasetReader(b).header());
}

}  // namespace tokpipe
