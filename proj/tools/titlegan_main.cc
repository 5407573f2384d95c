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

// titlegan command-line tool.
//
//   titlegan synth        --out DIR
//   titlegan build-vocab  --corpus FILE --out DIR
//   titlegan pretrain     --data DIR [--vocab FILE] --out DIR
//   titlegan train-adv    --data DIR --checkpoint FILE [--vocab FILE] --out DIR
//   titlegan generate     --checkpoint FILE --corpus FILE [--vocab FILE]
//                         [--sample] --out DIR
//   titlegan evaluate     --generated FILE --reference FILE --out DIR
//
// Every command also takes --config FILE, --seed N and any number of
// --set KEY=VALUE overrides, applied in that order.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "titlegan/titlegan.h"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::string out;
};

void print_line(const char* line, void*) { std::printf("%s\n", line); }

int fail(tg_status status) {
  std::fprintf(stderr, "error: %s: %s\n", tg_status_name(status),
               tg_last_error());
  return static_cast<int>(status);
}

// Builds the run configuration; returns TG_OK or the failing status.
tg_status make_config(const CommonFlags& flags, tg_config** out) {
  tg_status s = flags.config_path.empty()
                    ? tg_config_create(out)
                    : tg_config_load(flags.config_path.c_str(), out);
  if (s != TG_OK) return s;
  if (flags.seed) {
    s = tg_config_set(*out, "seed", std::to_string(*flags.seed).c_str());
    if (s != TG_OK) return s;
  }
  for (const std::string& kv : flags.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      s = tg_config_set(*out, kv.c_str(), "");
    } else {
      s = tg_config_set(*out, kv.substr(0, eq).c_str(),
                        kv.substr(eq + 1).c_str());
    }
    if (s != TG_OK) return s;
  }
  return TG_OK;
}

const char* or_null(const std::string& s) {
  return s.empty() ? nullptr : s.c_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Short product title generation"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", flags.config_path, "JSON run configuration")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", flags.seed, "Run seed");
    cmd->add_option("--set", flags.overrides, "Config override KEY=VALUE");
    cmd->add_option("--out", flags.out, "Output directory")->required();
  };

  std::string corpus, data, vocab, checkpoint, generated, reference;
  bool sample = false;

  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus");
  add_common(synth);

  auto* build_vocab = app.add_subcommand("build-vocab", "Build a vocabulary");
  add_common(build_vocab);
  build_vocab->add_option("--corpus", corpus, "Corpus file")->required();

  auto* pretrain = app.add_subcommand("pretrain", "MLE pretraining");
  add_common(pretrain);
  pretrain->add_option("--data", data, "Directory with train/valid.jsonl")
      ->required();
  pretrain->add_option("--vocab", vocab, "Vocabulary file");

  auto* train_adv = app.add_subcommand("train-adv", "Adversarial training");
  add_common(train_adv);
  train_adv->add_option("--data", data, "Directory with train/valid.jsonl")
      ->required();
  train_adv->add_option("--checkpoint", checkpoint, "Starting checkpoint")
      ->required();
  train_adv->add_option("--vocab", vocab, "Vocabulary file");

  auto* generate = app.add_subcommand("generate", "Generate short titles");
  add_common(generate);
  generate->add_option("--checkpoint", checkpoint, "Model checkpoint")
      ->required();
  generate->add_option("--corpus", corpus, "Corpus file to decode")
      ->required();
  generate->add_option("--vocab", vocab, "Vocabulary file");
  generate->add_flag("--sample", sample, "Sample instead of greedy decoding");

  auto* evaluate = app.add_subcommand("evaluate", "ROUGE report");
  add_common(evaluate);
  evaluate->add_option("--generated", generated, "Generation file")
      ->required();
  evaluate->add_option("--reference", reference, "Reference corpus")
      ->required();

  CLI11_PARSE(app, argc, argv);

  tg_config* config = nullptr;
  tg_status s = make_config(flags, &config);
  if (s != TG_OK) {
    tg_config_destroy(config);
    return fail(s);
  }
  const char* out = flags.out.c_str();
  if (synth->parsed()) {
    s = tg_cmd_synth(config, out, print_line, nullptr);
  } else if (build_vocab->parsed()) {
    s = tg_cmd_build_vocab(config, corpus.c_str(), out, print_line, nullptr);
  } else if (pretrain->parsed()) {
    s = tg_cmd_pretrain(config, data.c_str(), or_null(vocab), out, print_line,
                        nullptr);
  } else if (train_adv->parsed()) {
    s = tg_cmd_train_adv(config, data.c_str(), checkpoint.c_str(),
                         or_null(vocab), out, print_line, nullptr);
  } else if (generate->parsed()) {
    s = tg_cmd_generate(config, checkpoint.c_str(), or_null(vocab),
                        corpus.c_str(), out, sample ? 1 : 0, print_line,
                        nullptr);
  } else if (evaluate->parsed()) {
    char* report = nullptr;
    s = tg_cmd_evaluate(generated.c_str(), reference.c_str(), out, &report,
                        nullptr, nullptr);
    if (s == TG_OK) std::printf("%s\n", report);
    tg_string_free(report);
  }
  tg_config_destroy(config);
  return s == TG_OK ? 0 : fail(s);
}
