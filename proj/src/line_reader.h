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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

namespace tokpipe::detail {

// Buffered LF-delimited line reader over a byte range of a file. Yields the
// lines whose first byte lies in [begin, end), so adjacent ranges partition
// the file's lines. Lines are returned without '\n'; a final line without a
// terminator is still a line. Memory is the read buffer plus the longest
// line.
class LineReader {
 public:
  static constexpr std::uint64_t kToEnd = std::numeric_limits<std::uint64_t>::max();

  explicit LineReader(const std::filesystem::path& path, std::uint64_t begin = 0,
                      std::uint64_t end = kToEnd,
                      std::size_t buffer_size = 1 << 20);

  bool next(std::string& line);

  // File offset of the first byte of the line last returned by next().
  std::uint64_t line_offset() const { return line_offset_; }

 private:
  bool refill();

  std::filesystem::path path_;
  std::ifstream in_;
  std::vector<char> buffer_;
  std::size_t pos_ = 0;
  std::size_t len_ = 0;
  std::uint64_t buffer_offset_ = 0;  // file offset of buffer_[0]
  std::uint64_t end_;
  std::uint64_t line_offset_ = 0;
  bool eof_ = false;
};

}  // namespace tokpipe::detail
