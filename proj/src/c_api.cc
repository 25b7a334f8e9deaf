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


#include "tokpipe/c_api.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <string>

#include "tokpipe/bpe.h"
#include "tokpipe/eval.h"
#include "tokpipe/version.h"

struct tokpipe_tokenizer {
  tokpipe::bpe::Vocabulary vocab;
};

namespace {

thread_local std::string last_error;

template <typename Fn>
auto guarded(Fn&& fn, decltype(fn()) failure) -> decltype(fn()) {
  try {
    last_error.clear();
    return fn();
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return failure;
}

tokpipe_score to_c(const tokpipe::eval::PrfScore& s) {
  return {s.precision, s.recall, s.f1, s.tp, s.fp, s.fn};
}

}  // namespace

extern "C" {

const char* tokpipe_version(void) { return tokpipe::kVersion; }

const char* tokpipe_last_error(void) { return last_error.c_str(); }

tokpipe_tokenizer* tokpipe_load(const char* dir) {
  return guarded(
      [&]() -> tokpipe_tokenizer* {
        if (dir == nullptr) throw tokpipe::InvalidArgument("null path");
        return new tokpipe_tokenizer{tokpipe::bpe::load_vocab(dir)};
      },
      nullptr);
}

void tokpipe_release(tokpipe_tokenizer* handle) { delete handle; }

uint64_t tokpipe_vocab_size(const tokpipe_tokenizer* handle) {
  return handle ? handle->vocab.size() : 0;
}

int64_t tokpipe_encode(const tokpipe_tokenizer* handle, const char* text, size_t length,
                       uint32_t* ids, size_t capacity) {
  return guarded(
      [&]() -> int64_t {
        if (handle == nullptr) throw tokpipe::InvalidArgument("null handle");
        if (text == nullptr && length > 0) throw tokpipe::InvalidArgument("null text");
        const auto out = tokpipe::bpe::encode(handle->vocab, std::string_view(text ? text : "", length));
        if (ids != nullptr) std::copy_n(out.begin(), std::min(out.size(), capacity), ids);
        return static_cast<int64_t>(out.size());
      },
      -1);
}

int64_t tokpipe_decode(const tokpipe_tokenizer* handle, const uint32_t* ids, size_t count,
                       int special_passthrough, char* text, size_t capacity) {
  return guarded(
      [&]() -> int64_t {
        if (handle == nullptr) throw tokpipe::InvalidArgument("null handle");
        if (ids == nullptr && count > 0) throw tokpipe::InvalidArgument("null ids");
        const std::string out = tokpipe::bpe::decode(
            handle->vocab, std::span<const uint32_t>(ids, count),
            tokpipe::bpe::DecodeOptions{special_passthrough != 0});
        if (text != nullptr) std::memcpy(text, out.data(), std::min(out.size(), capacity));
        return static_cast<int64_t>(out.size());
      },
      -1);
}

int tokpipe_eval_ner(const char* gold_path, const char* pred_path, int mode,
                     tokpipe_score* out) {
  namespace ev = tokpipe::eval;
  return guarded(
      [&]() -> int {
        if (!gold_path || !pred_path || !out) throw tokpipe::InvalidArgument("null argument");
        const std::filesystem::path gold(gold_path), pred(pred_path);
        switch (mode) {
          case TOKPIPE_NER_CONLL:
            *out = to_c(ev::ner_f1(ev::parse_conll(gold).sentences, ev::parse_conll(pred).sentences));
            return 0;
          case TOKPIPE_NER_GERMEVAL_POOLED:
          case TOKPIPE_NER_GERMEVAL_LEVEL_AVERAGE: {
            const auto r = ev::germeval_report(ev::parse_germeval(gold).sentences,
                                               ev::parse_germeval(pred).sentences);
            *out = to_c(r.pooled);
            if (mode == TOKPIPE_NER_GERMEVAL_LEVEL_AVERAGE) out->f1 = r.level_average_f1;
            return 0;
          }
          default:
            throw tokpipe::InvalidArgument("unknown mode " + std::to_string(mode));
        }
      },
      -1);
}

}  // extern "C"
