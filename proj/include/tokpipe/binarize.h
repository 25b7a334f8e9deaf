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

// Fixed-width binary token datasets.
//
// Layout, all integers little-endian:
//
//   offset  size  field
//        0     4  magic "GOTB"
//        4     2  format version (1)
//        6     8  vocabulary fingerprint (FNV-1a 64 of vocab.json)
//       14     8  token count N
//       22   4*N  token ids, uint32
//
// Each document contributes its token ids followed by the end-of-document
// special id.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tokpipe/bpe.h"
#include "tokpipe/corpus.h"

namespace tokpipe {

inline constexpr std::array<char, 4> kDatasetMagic = {'G', 'O', 'T', 'B'};
inline constexpr std::uint16_t kDatasetVersion = 1;
inline constexpr std::size_t kDatasetHeaderSize = 22;

struct DatasetHeader {
  std::uint16_t version = kDatasetVersion;
  std::uint64_t fingerprint = 0;
  std::uint64_t token_count = 0;

  std::uint64_t payload_bytes() const { return 4 * token_count; }
  bool operator==(const DatasetHeader&) const = default;
};

std::array<char, kDatasetHeaderSize> encode_header(const DatasetHeader& header);
DatasetHeader decode_header(std::span<const char> bytes);

struct BinarizeSummary {
  DatasetHeader header;
  std::uint64_t documents = 0;
};

// Streams the corpus through the encoder into `out`. Documents are encoded
// in batches across `threads` workers and written in corpus order; the
// header is rewritten with the final count at the end.
BinarizeSummary binarize(DocumentStream& corpus, const bpe::Vocabulary& vocab,
                         const std::filesystem::path& out, unsigned threads = 1);

// Sequential reader. Validates magic, version and file length on open.
class DatasetReader {
 public:
  explicit DatasetReader(const std::filesystem::path& path);

  const DatasetHeader& header() const { return header_; }

  // Appends up to `max_ids` ids to `out`. Returns false once exhausted.
  bool read(std::vector<bpe::TokenId>& out, std::size_t max_ids);

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  DatasetHeader header_;
  std::uint64_t remaining_ = 0;
};

std::vector<bpe::TokenId> read_dataset(const std::filesystem::path& path,
                                       DatasetHeader* header = nullptr);

struct FertilityReport {
  std::uint64_t documents = 0;
  std::uint64_t tokens = 0;  // separators excluded
  std::uint64_t words = 0;
  std::uint64_t bytes = 0;
  std::optional<double> tokens_per_word;  // absent when words == 0
  std::optional<double> tokens_per_byte;  // absent when bytes == 0
};

FertilityReport fertility(DocumentStream& corpus, const bpe::Vocabulary& vocab);

struct SizeReport {
  std::uint64_t a_bytes = 0;
  std::uint64_t b_bytes = 0;
  double ratio = 0.0;      // a / b
  double reduction = 0.0;  // 1 - ratio
};

// Payload-size comparison of two binarizations of the same corpus.
// Throws InvalidArgument when b is empty.
SizeReport size_report(std::uint64_t a_payload_bytes, std::uint64_t b_payload_bytes);
SizeReport size_report(const DatasetHeader& a, const DatasetHeader& b);
SizeReport size_report(const std::filesystem::path& a, const std::filesystem::path& b);

}  // namespace tokpipe
