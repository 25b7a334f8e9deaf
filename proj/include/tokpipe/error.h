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

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tokpipe {

// Base class for all library errors. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Malformed input text. `line` is 1-based; 0 when the error is not tied to
// a line. `context` usually names the file.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ParseError(std::string(), line, what) {}
  ParseError(const std::string& context, std::size_t line, const std::string& what)
      : Error((context.empty() ? std::string() : context + ": ") +
              (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + what),
        context_(context),
        line_(line),
        detail_(what) {}

  const std::string& context() const { return context_; }
  std::size_t line() const { return line_; }
  // The message without context and line prefix.
  const std::string& detail() const { return detail_; }

 private:
  std::string context_;
  std::size_t line_;
  std::string detail_;
};

class Utf8Error : public Error {
 public:
  explicit Utf8Error(std::uint64_t byte_offset, const std::string& source = {})
      : Error((source.empty() ? std::string() : source + ": ") +
              "invalid UTF-8 at byte offset " + std::to_string(byte_offset)),
        byte_offset_(byte_offset) {}

  std::uint64_t byte_offset() const { return byte_offset_; }

 private:
  std::uint64_t byte_offset_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace tokpipe
