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

#include "line_reader.h"

#include <cstring>

#include "tokpipe/error.h"

namespace tokpipe::detail {

LineReader::LineReader(const std::filesystem::path& path, std::uint64_t begin,
                       std::uint64_t end, std::size_t buffer_size)
    : path_(path), buffer_(buffer_size), end_(end) {
  in_.open(path, std::ios::binary);
  if (!in_) throw IoError(path.string(), "cannot open for reading");
  if (begin == 0) return;

  // Start inside the previous line and discard through its terminator.
  in_.seekg(static_cast<std::streamoff>(begin - 1));
  if (!in_) {
    eof_ = true;
    return;
  }
  buffer_offset_ = begin - 1;
  while (true) {
    if (pos_ == len_ && !refill()) return;
    const char* base = buffer_.data();
    const void* nl = std::memchr(base + pos_, '\n', len_ - pos_);
    if (nl) {
      pos_ = static_cast<std::size_t>(static_cast<const char*>(nl) - base) + 1;
      return;
    }
    pos_ = len_;
  }
}

bool LineReader::refill() {
  buffer_offset_ += len_;
  pos_ = 0;
  len_ = 0;
  if (eof_) return false;
  in_.read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  if (in_.bad()) throw IoError(path_.string(), "read failed");
  len_ = static_cast<std::size_t>(in_.gcount());
  if (len_ < buffer_.size()) eof_ = true;
  return len_ > 0;
}

bool LineReader::next(std::string& line) {
  line.clear();
  if (pos_ == len_ && !refill()) return false;
  line_offset_ = buffer_offset_ + pos_;
  if (line_offset_ >= end_) return false;

  while (true) {
    const char* base = buffer_.data();
    const void* nl = std::memchr(base + pos_, '\n', len_ - pos_);
    if (nl) {
      const auto stop = static_cast<std::size_t>(static_cast<const char*>(nl) - base);
      line.append(base + pos_, stop - pos_);
      pos_ = stop + 1;
      return true;
    }
    line.append(base + pos_, len_ - pos_);
    pos_ = len_;
    if (!refill()) return true;
  }
}

}  // namespace tokpipe::detail
