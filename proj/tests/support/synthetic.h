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


// Synthetic desk corpora. Two "languages" with disjoint syllable
// inventories and Zipf-distributed lexicons stand in for in-domain and
// out-of-domain text.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tokpipe/random.h"

namespace tokpipe::testing {

struct Phonology;

class SyntheticLanguage {
 public:
  static SyntheticLanguage german_like(std::uint64_t seed = 1);
  static SyntheticLanguage english_like(std::uint64_t seed = 2);

  const std::string& word(Rng& rng) const;
  // One line of text: sentences of words with punctuation, no newline.
  std::string document(Rng& rng, std::size_t min_words = 8, std::size_t max_words = 60) const;
  // Documents until at least `bytes` bytes of text (newlines excluded).
  std::vector<std::string> corpus(Rng& rng, std::size_t bytes) const;

  std::size_t lexicon_size() const { return lexicon_.size(); }

 private:
  SyntheticLanguage() = default;
  static SyntheticLanguage build(const Phonology& ph, std::uint64_t seed, std::size_t size,
                                 bool capitalize_nouns);

  std::vector<std::string> lexicon_;
  std::vector<double> cumulative_;
  bool capitalize_nouns_ = false;
};

// Writes one document per line.
void write_lines(const std::string& path, const std::vector<std::string>& lines);

// Random byte strings, including ill-formed UTF-8.
std::string random_bytes(Rng& rng, std::size_t max_length);

}  // namespace tokpipe::testing
