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


// C interface for foreign-language wrappers. Strings cross as UTF-8 byte
// ranges, id sequences as contiguous uint32 buffers.
//
// Functions that fill a caller buffer return the required element count and
// write min(count, capacity) elements, so callers may size the buffer with a
// first call. A negative return or null handle means failure; the message is
// then available from tokpipe_last_error() on the same thread.

#ifndef TOKPIPE_C_API_H_
#define TOKPIPE_C_API_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct tokpipe_tokenizer tokpipe_tokenizer;

typedef struct {
  double precision;
  double recall;
  double f1;
  uint64_t tp;
  uint64_t fp;
  uint64_t fn;
} tokpipe_score;

enum {
  TOKPIPE_NER_CONLL = 0,
  TOKPIPE_NER_GERMEVAL_POOLED = 1,
  // f1 is the mean of the level f1s; the other fields are the pooled ones.
  TOKPIPE_NER_GERMEVAL_LEVEL_AVERAGE = 2,
};

const char* tokpipe_version(void);
const char* tokpipe_last_error(void);

// Loads vocab.json and merges.txt from dir. The handle is immutable and may
// be used from several threads at once.
tokpipe_tokenizer* tokpipe_load(const char* dir);
void tokpipe_release(tokpipe_tokenizer* handle);

uint64_t tokpipe_vocab_size(const tokpipe_tokenizer* handle);

int64_t tokpipe_encode(const tokpipe_tokenizer* handle, const char* text, size_t length,
                       uint32_t* ids, size_t capacity);

// Special tokens are dropped unless special_passthrough is nonzero.
int64_t tokpipe_decode(const tokpipe_tokenizer* handle, const uint32_t* ids, size_t count,
                       int special_passthrough, char* text, size_t capacity);

// Returns 0 on success.
int tokpipe_eval_ner(const char* gold_path, const char* pred_path, int mode,
                     tokpipe_score* out);

#ifdef __cplusplus
}
#endif

#endif  // TOKPIPE_C_API_H_
