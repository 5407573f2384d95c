// Copyright 2026 The titlegan Authors.
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

/* C interface to the titlegan library.
 *
 * Every fallible call returns a tg_status. On failure the message is
 * available from tg_last_error() until the next call on the same thread.
 * Strings returned through char** are owned by the caller and released with
 * tg_string_free(). Handles are released with their destroy function; passing
 * NULL to a destroy function is a no-op. */

#ifndef TITLEGAN_TITLEGAN_H_
#define TITLEGAN_TITLEGAN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TG_API __declspec(dllexport)
#else
#define TG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define TG_API_VERSION 1u

typedef enum tg_status {
  TG_OK = 0,
  TG_ERR_DIMENSION = 1,
  TG_ERR_DOMAIN = 2,
  TG_ERR_INDEX = 3,
  TG_ERR_CONTRACT = 4,
  TG_ERR_PARSE = 5,
  TG_ERR_IO = 6,
  TG_ERR_CONFIG = 7,
  TG_ERR_NUMERIC = 8,
  TG_ERR_NULL_ARGUMENT = 9,
  TG_ERR_INTERNAL = 10
} tg_status;

TG_API uint32_t tg_api_version(void);
/* Short lowercase name, e.g. "config"; "unknown" for out-of-range values. */
TG_API const char* tg_status_name(tg_status status);
/* Message of the last failed call on this thread; "" after a success. */
TG_API const char* tg_last_error(void);
TG_API void tg_string_free(char* s);

/* Receives one progress line per call. */
typedef void (*tg_log_fn)(const char* line, void* user_data);

/* ---- run configuration ------------------------------------------------ */

typedef struct tg_config tg_config;

TG_API tg_status tg_config_create(tg_config** out);
TG_API tg_status tg_config_load(const char* path, tg_config** out);
/* value uses JSON syntax; a bare word is taken as a string. */
TG_API tg_status tg_config_set(tg_config* config, const char* key,
                               const char* value);
TG_API tg_status tg_config_to_json(const tg_config* config, char** out_json);
TG_API void tg_config_destroy(tg_config* config);

/* ---- commands ----------------------------------------------------------- */

TG_API tg_status tg_cmd_synth(const tg_config* config, const char* out_dir,
                              tg_log_fn log, void* user_data);
TG_API tg_status tg_cmd_build_vocab(const tg_config* config,
                                    const char* corpus_path,
                                    const char* out_dir, tg_log_fn log,
                                    void* user_data);
/* vocab_path may be NULL: the vocabulary is built from the training split. */
TG_API tg_status tg_cmd_pretrain(const tg_config* config, const char* data_dir,
                                 const char* vocab_path, const char* out_dir,
                                 tg_log_fn log, void* user_data);
/* vocab_path may be NULL: vocab.txt next to the checkpoint is used. */
TG_API tg_status tg_cmd_train_adv(const tg_config* config,
                                  const char* data_dir,
                                  const char* checkpoint_path,
                                  const char* vocab_path, const char* out_dir,
                                  tg_log_fn log, void* user_data);
TG_API tg_status tg_cmd_generate(const tg_config* config,
                                 const char* checkpoint_path,
                                 const char* vocab_path,
                                 const char* corpus_path, const char* out_dir,
                                 int sample, tg_log_fn log, void* user_data);
/* out_report may be NULL. */
TG_API tg_status tg_cmd_evaluate(const char* generated_path,
                                 const char* reference_path,
                                 const char* out_dir, char** out_report,
                                 tg_log_fn log, void* user_data);

/* ---- inference ---------------------------------------------------------- */

typedef struct tg_model tg_model;

TG_API tg_status tg_model_load(const tg_config* config,
                               const char* checkpoint_path,
                               const char* vocab_path, tg_model** out);
/* Greedy decoding. The short title is written as a JSON array of strings. */
TG_API tg_status tg_model_generate(const tg_model* model,
                                   const char* const* title, size_t n_title,
                                   const char* const* attrs, size_t n_attrs,
                                   const double* image, size_t image_dim,
                                   char** out_json);
TG_API void tg_model_destroy(tg_model* model);

/* ---- scoring ------------------------------------------------------------ */

typedef struct tg_rouge_score {
  double recall;
  double precision;
  double f1;
} tg_rouge_score;

typedef struct tg_rouge_scores {
  tg_rouge_score rouge1;
  tg_rouge_score rouge2;
  tg_rouge_score rouge_l;
} tg_rouge_scores;

/* Scores one candidate against one non-empty reference. */
TG_API tg_status tg_rouge(const char* const* candidate, size_t n_candidate,
                          const char* const* reference, size_t n_reference,
                          tg_rouge_scores* out);

#ifdef __cplusplus
}
#endif

#endif /* TITLEGAN_TITLEGAN_H_ */
