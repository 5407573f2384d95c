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

#include "titlegan/titlegan.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "errors.h"
#include "params.h"
#include "pipeline.h"
#include "rouge.h"

struct tg_config {
  titlegan::RunConfig run;
};

struct tg_model {
  titlegan::Vocab vocab;
  std::unique_ptr<titlegan::Generator> gen;
  std::size_t max_len = 10;
};

namespace {

thread_local std::string last_error;

tg_status to_status(titlegan::ErrorCategory category) {
  using titlegan::ErrorCategory;
  switch (category) {
    case ErrorCategory::kDimension: return TG_ERR_DIMENSION;
    case ErrorCategory::kDomain: return TG_ERR_DOMAIN;
    case ErrorCategory::kIndex: return TG_ERR_INDEX;
    case ErrorCategory::kContract: return TG_ERR_CONTRACT;
    case ErrorCategory::kParse: return TG_ERR_PARSE;
    case ErrorCategory::kIo: return TG_ERR_IO;
    case ErrorCategory::kConfig: return TG_ERR_CONFIG;
    case ErrorCategory::kNumeric: return TG_ERR_NUMERIC;
  }
  return TG_ERR_INTERNAL;
}

template <typename F>
tg_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return TG_OK;
  } catch (const titlegan::Error& e) {
    last_error = e.what();
    return to_status(e.category());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return TG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TG_ERR_INTERNAL;
  }
}

tg_status null_argument(const char* name) {
  last_error = std::string("argument '") + name + "' must not be NULL";
  return TG_ERR_NULL_ARGUMENT;
}

#define TG_REQUIRE(arg) \
  if ((arg) == nullptr) return null_argument(#arg)

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

titlegan::LogSink make_sink(tg_log_fn log, void* user_data) {
  if (log == nullptr) return {};
  return [log, user_data](const std::string& line) {
    log(line.c_str(), user_data);
  };
}

std::string opt(const char* s) { return s == nullptr ? std::string() : s; }

std::vector<std::string> to_strings(const char* const* items, std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (items[i] == nullptr) {
      throw titlegan::ContractError("token " + std::to_string(i) + " is NULL");
    }
    out.emplace_back(items[i]);
  }
  return out;
}

}  // namespace

extern "C" {

uint32_t tg_api_version(void) { return TG_API_VERSION; }

const char* tg_status_name(tg_status status) {
  switch (status) {
    case TG_OK: return "ok";
    case TG_ERR_DIMENSION: return "dimension";
    case TG_ERR_DOMAIN: return "domain";
    case TG_ERR_INDEX: return "index";
    case TG_ERR_CONTRACT: return "contract";
    case TG_ERR_PARSE: return "parse";
    case TG_ERR_IO: return "io";
    case TG_ERR_CONFIG: return "config";
    case TG_ERR_NUMERIC: return "numeric";
    case TG_ERR_NULL_ARGUMENT: return "null-argument";
    case TG_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* tg_last_error(void) { return last_error.c_str(); }

void tg_string_free(char* s) { std::free(s); }

tg_status tg_config_create(tg_config** out) {
  TG_REQUIRE(out);
  return guarded([&] { *out = new tg_config(); });
}

tg_status tg_config_load(const char* path, tg_config** out) {
  TG_REQUIRE(path);
  TG_REQUIRE(out);
  return guarded([&] {
    auto cfg = std::make_unique<tg_config>();
    cfg->run = titlegan::load_run_config(path);
    *out = cfg.release();
  });
}

tg_status tg_config_set(tg_config* config, const char* key,
                        const char* value) {
  TG_REQUIRE(config);
  TG_REQUIRE(key);
  TG_REQUIRE(value);
  return guarded([&] { config->run.set(key, value); });
}

tg_status tg_config_to_json(const tg_config* config, char** out_json) {
  TG_REQUIRE(config);
  TG_REQUIRE(out_json);
  return guarded(
      [&] { *out_json = copy_string(config->run.to_json().dump(2)); });
}

void tg_config_destroy(tg_config* config) { delete config; }

tg_status tg_cmd_synth(const tg_config* config, const char* out_dir,
                       tg_log_fn log, void* user_data) {
  TG_REQUIRE(config);
  TG_REQUIRE(out_dir);
  return guarded([&] {
    titlegan::cmd_synth(config->run, out_dir, make_sink(log, user_data));
  });
}

tg_status tg_cmd_build_vocab(const tg_config* config, const char* corpus_path,
                             const char* out_dir, tg_log_fn log,
                             void* user_data) {
  TG_REQUIRE(config);
  TG_REQUIRE(corpus_path);
  TG_REQUIRE(out_dir);
  return guarded([&] {
    titlegan::cmd_build_vocab(config->run, corpus_path, out_dir,
                              make_sink(log, user_data));
  });
}

tg_status tg_cmd_pretrain(const tg_config* config, const char* data_dir,
                          const char* vocab_path, const char* out_dir,
                          tg_log_fn log, void* user_data) {
  TG_REQUIRE(config);
  TG_REQUIRE(data_dir);
  TG_REQUIRE(out_dir);
  return guarded([&] {
    titlegan::cmd_pretrain(config->run, data_dir, opt(vocab_path), out_dir,
                           make_sink(log, user_data));
  });
}

tg_status tg_cmd_train_adv(const tg_config* config, const char* data_dir,
                           const char* checkpoint_path, const char* vocab_path,
                           const char* out_dir, tg_log_fn log,
                           void* user_data) {
  TG_REQUIRE(config);
  TG_REQUIRE(data_dir);
  TG_REQUIRE(checkpoint_path);
  TG_REQUIRE(out_dir);
  return guarded([&] {
    titlegan::cmd_train_adv(config->run, data_dir, checkpoint_path,
                            opt(vocab_path), out_dir,
                            make_sink(log, user_data));
  });
}

tg_status tg_cmd_generate(const tg_config* config, const char* checkpoint_path,
                          const char* vocab_path, const char* corpus_path,
                          const char* out_dir, int sample, tg_log_fn log,
                          void* user_data) {
  TG_REQUIRE(config);
  TG_REQUIRE(checkpoint_path);
  TG_REQUIRE(corpus_path);
  TG_REQUIRE(out_dir);
  return guarded([&] {
    titlegan::cmd_generate(config->run, checkpoint_path, opt(vocab_path),
                           corpus_path, out_dir, sample != 0,
                           make_sink(log, user_data));
  });
}

tg_status tg_cmd_evaluate(const char* generated_path,
                          const char* reference_path, const char* out_dir,
                          char** out_report, tg_log_fn log, void* user_data) {
  TG_REQUIRE(generated_path);
  TG_REQUIRE(reference_path);
  TG_REQUIRE(out_dir);
  return guarded([&] {
    const auto report = titlegan::cmd_evaluate(
        generated_path, reference_path, out_dir, make_sink(log, user_data));
    if (out_report != nullptr) *out_report = copy_string(report.dump(2));
  });
}

tg_status tg_model_load(const tg_config* config, const char* checkpoint_path,
                        const char* vocab_path, tg_model** out) {
  TG_REQUIRE(config);
  TG_REQUIRE(checkpoint_path);
  TG_REQUIRE(vocab_path);
  TG_REQUIRE(out);
  return guarded([&] {
    auto model = std::make_unique<tg_model>();
    model->vocab = titlegan::Vocab::load(vocab_path);
    model->gen = std::make_unique<titlegan::Generator>(
        config->run.generator_config(model->vocab.size()),
        titlegan::generator_seed(config->run.seed));
    titlegan::restore(model->gen->params(),
                      titlegan::load_checkpoint(checkpoint_path));
    model->max_len = config->run.trainer.max_len;
    *out = model.release();
  });
}

tg_status tg_model_generate(const tg_model* model, const char* const* title,
                            size_t n_title, const char* const* attrs,
                            size_t n_attrs, const double* image,
                            size_t image_dim, char** out_json) {
  TG_REQUIRE(model);
  TG_REQUIRE(out_json);
  if (n_title > 0) TG_REQUIRE(title);
  if (n_attrs > 0) TG_REQUIRE(attrs);
  if (image_dim > 0) TG_REQUIRE(image);
  return guarded([&] {
    titlegan::GeneratorInputs inputs;
    inputs.title = model->vocab.encode(to_strings(title, n_title));
    inputs.attrs = model->vocab.encode(to_strings(attrs, n_attrs));
    inputs.image.assign(image, image + image_dim);
    titlegan::DecodeOptions options;
    options.max_len = model->max_len;
    const auto ids = model->gen->generate(inputs, options);
    nlohmann::json tokens = model->vocab.decode(ids);
    *out_json = copy_string(tokens.dump());
  });
}

void tg_model_destroy(tg_model* model) { delete model; }

tg_status tg_rouge(const char* const* candidate, size_t n_candidate,
                   const char* const* reference, size_t n_reference,
                   tg_rouge_scores* out) {
  if (n_candidate > 0) TG_REQUIRE(candidate);
  if (n_reference > 0) TG_REQUIRE(reference);
  TG_REQUIRE(out);
  return guarded([&] {
    const auto cand = to_strings(candidate, n_candidate);
    const auto ref = to_strings(reference, n_reference);
    auto copy = [](const titlegan::RougeScore& s) {
      return tg_rouge_score{s.recall, s.precision, s.f1};
    };
    out->rouge1 = copy(titlegan::rouge_n(cand, ref, 1));
    out->rouge2 = copy(titlegan::rouge_n(cand, ref, 2));
    out->rouge_l = copy(titlegan::rouge_l(cand, ref));
  });
}

}  // extern "C"
