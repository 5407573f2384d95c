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

// Run configuration and the file-level commands behind the command-line tool.
//
// A run configuration is a flat JSON object; unknown keys are rejected.
// Every command writes the effective configuration to <out>/config.json.

#ifndef TITLEGAN_PIPELINE_H_
#define TITLEGAN_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <string>

#include "corpus.h"
#include "discriminator.h"
#include "generator.h"
#include "json.hpp"
#include "trainer.h"

namespace titlegan {

struct RunConfig {
  std::uint64_t seed = 1;

  // synthetic corpus
  std::size_t n_records = 500;
  double noise_prob = 0.3;
  double image_noise = 0.1;
  std::size_t image_dim = 16;
  double valid_fraction = 0.1;
  double test_fraction = 0.1;

  int min_freq = 1;

  // models
  std::size_t embed_dim = 32;
  std::size_t hidden_dim = 32;
  std::size_t attn_dim = 32;
  std::size_t disc_embed_dim = 32;
  std::size_t disc_hidden_dim = 32;
  bool use_attrs = true;
  bool use_image = true;

  // Training settings. The defaults differ from TrainerConfig{}: they are the
  // values tuned on the synthetic corpus.
  TrainerConfig trainer = tuned_trainer_config();

  static TrainerConfig tuned_trainer_config();

  static RunConfig from_json(const nlohmann::ordered_json& j);
  nlohmann::ordered_json to_json() const;
  // Sets one key from its command-line spelling, e.g. ("gen_lr", "0.001").
  void set(const std::string& key, const std::string& value);
  void validate() const;

  SynthConfig synth_config() const;
  GeneratorConfig generator_config(std::size_t vocab_size) const;
  DiscriminatorConfig discriminator_config(std::size_t vocab_size) const;
  TrainerConfig trainer_config() const;
};

RunConfig load_run_config(const std::string& path);
void save_run_config(const RunConfig& config, const std::string& path);

// Progress lines; the default discards them.
using LogSink = std::function<void(const std::string&)>;

// Initial parameter seeds of a run.
std::uint64_t generator_seed(std::uint64_t run_seed);
std::uint64_t discriminator_seed(std::uint64_t run_seed);

// <out>/train.jsonl, valid.jsonl, test.jsonl.
void cmd_synth(const RunConfig& config, const std::string& out_dir,
               const LogSink& log = {});

// <out>/vocab.txt built from one corpus file.
void cmd_build_vocab(const RunConfig& config, const std::string& corpus_path,
                     const std::string& out_dir, const LogSink& log = {});

// Reads <data_dir>/train.jsonl and, when present, <data_dir>/valid.jsonl.
// An empty vocab_path builds the vocabulary from the training split. Writes
// <out>/vocab.txt, pretrain.ckpt (generator and discriminator) and
// pretrain_log.jsonl.
void cmd_pretrain(const RunConfig& config, const std::string& data_dir,
                  const std::string& vocab_path, const std::string& out_dir,
                  const LogSink& log = {});

// Resumes from a checkpoint holding both models. Writes round_NNNN.ckpt per
// round and metrics.jsonl; line 0 of metrics.jsonl holds the validation ROUGE
// of the starting checkpoint.
void cmd_train_adv(const RunConfig& config, const std::string& data_dir,
                   const std::string& checkpoint_path,
                   const std::string& vocab_path, const std::string& out_dir,
                   const LogSink& log = {});

// Decodes every record of a corpus file; writes <out>/generated.jsonl with
// one {"short_title": [...]} object per record.
void cmd_generate(const RunConfig& config, const std::string& checkpoint_path,
                  const std::string& vocab_path, const std::string& corpus_path,
                  const std::string& out_dir, bool sample = false,
                  const LogSink& log = {});

// Scores a generation file against the short titles of a reference corpus,
// line by line. Writes <out>/rouge.json.
nlohmann::ordered_json cmd_evaluate(const std::string& generated_path,
                                    const std::string& reference_path,
                                    const std::string& out_dir,
                                    const LogSink& log = {});

nlohmann::ordered_json rouge_to_json(const CorpusRouge& rouge);

}  // namespace titlegan

#endif  // TITLEGAN_PIPELINE_H_
