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

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "tokpipe/bpe.h"
#include "tokpipe/error.h"

namespace tokpipe::bpe {

namespace {

constexpr std::string_view kMergesHeader = "#version: 1";

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path.string(), "read failed");
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError(path.string(), "write failed");
}

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

std::vector<std::string> parse_vocab_json(std::string_view text) {
  // Key order is irrelevant here; the ids define it.
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError(line_of_offset(text, byte), std::string("malformed JSON: ") + e.what());
  }
  if (!json.is_object()) throw ParseError(1, "expected a JSON object of token -> id");

  std::vector<std::string> tokens(json.size());
  std::vector<bool> seen(json.size(), false);
  for (const auto& [token, value] : json.items()) {
    if (!value.is_number_unsigned()) {
      throw ParseError(0, "id of token '" + token + "' is not a non-negative integer");
    }
    const auto id = value.get<std::uint64_t>();
    if (id >= tokens.size()) {
      throw ParseError(0, "id " + std::to_string(id) + " of token '" + token +
                              "' is not dense in 0.." + std::to_string(tokens.size() - 1));
    }
    if (seen[id]) throw ParseError(0, "id " + std::to_string(id) + " is assigned twice");
    seen[id] = true;
    tokens[id] = token;
  }
  return tokens;
}

}  // namespace

std::string vocab_json(const Vocabulary& vocab) {
  std::string out = "{";
  for (std::size_t id = 0; id < vocab.size(); ++id) {
    if (id > 0) out += ',';
    out += nlohmann::json(vocab.token(static_cast<TokenId>(id)))
               .dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
    out += ':';
    out += std::to_string(id);
  }
  out += '}';
  return out;
}

std::string merges_txt(const Vocabulary& vocab) {
  std::string out(kMergesHeader);
  out += '\n';
  for (const MergeRule& m : vocab.merges()) {
    out += m.left;
    out += ' ';
    out += m.right;
    out += '\n';
  }
  return out;
}

Vocabulary parse_vocab(std::string_view vocab_json_text, std::string_view merges_text) {
  std::vector<std::string> tokens;
  try {
    tokens = parse_vocab_json(vocab_json_text);
  } catch (const ParseError& e) {
    throw ParseError("vocab.json", e.line(), e.detail());
  }
  const std::unordered_set<std::string_view> known(tokens.begin(), tokens.end());

  std::vector<std::pair<std::string, std::string>> merges;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < merges_text.size()) {
    std::size_t stop = merges_text.find('\n', start);
    if (stop == std::string_view::npos) stop = merges_text.size();
    std::string_view line = merges_text.substr(start, stop - start);
    start = stop + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line_no == 1) {
      if (line != kMergesHeader) {
        throw ParseError("merges.txt", 1,
                         "expected header '" + std::string(kMergesHeader) + "'");
      }
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t f = 0;
    while (f <= line.size()) {
      std::size_t sp = line.find(' ', f);
      if (sp == std::string_view::npos) sp = line.size();
      fields.push_back(line.substr(f, sp - f));
      f = sp + 1;
    }
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError("merges.txt", line_no, "expected 2 fields");
    }
    for (std::string_view side : fields) {
      if (!known.contains(side)) {
        throw ParseError("merges.txt", line_no,
                         "merge references unknown token '" + std::string(side) + "'");
      }
    }
    merges.emplace_back(std::string(fields[0]), std::string(fields[1]));
  }
  if (line_no == 0) {
    throw ParseError("merges.txt", 1, "missing header '" + std::string(kMergesHeader) + "'");
  }

  try {
    return Vocabulary::from_parts(tokens, merges);
  } catch (const InvalidArgument& e) {
    throw ParseError("vocabulary", 0, e.what());
  }
}

void save_vocab(const Vocabulary& vocab, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), ec.message());
  write_file(dir / "vocab.json", vocab_json(vocab));
  write_file(dir / "merges.txt", merges_txt(vocab));
}

Vocabulary load_vocab(const std::filesystem::path& dir) {
  const std::string json = read_file(dir / "vocab.json");
  const std::string merges = read_file(dir / "merges.txt");
  try {
    return parse_vocab(json, merges);
  } catch (const ParseError& e) {
    throw ParseError((dir / e.context()).string(), e.line(), e.detail());
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t fingerprint(const Vocabulary& vocab) { return fnv1a64(vocab_json(vocab)); }

}  // namespace tokpipe::bpe
