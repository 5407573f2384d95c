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

#include "pipeline.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "errors.h"
#include "params.h"

namespace titlegan {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct EnumName {
  int value;
  const char* name;
};

constexpr EnumName kOptimizerNames[] = {
    {static_cast<int>(OptimizerConfig::Kind::kSgd), "sgd"},
    {static_cast<int>(OptimizerConfig::Kind::kAdam), "adam"}};
constexpr EnumName kBaselineNames[] = {
    {static_cast<int>(BaselineMode::kNone), "none"},
    {static_cast<int>(BaselineMode::kMovingAverage), "moving_average"}};
constexpr EnumName kDiscLossNames[] = {
    {static_cast<int>(DiscLossMode::kCrossEntropy), "cross_entropy"},
    {static_cast<int>(DiscLossMode::kLogRatio), "log_ratio"}};

template <typename E>
std::span<const EnumName> enum_names() {
  if constexpr (std::is_same_v<E, OptimizerConfig::Kind>) return kOptimizerNames;
  if constexpr (std::is_same_v<E, BaselineMode>) return kBaselineNames;
  if constexpr (std::is_same_v<E, DiscLossMode>) return kDiscLossNames;
}

template <typename T>
Json field_to_json(const T& v) {
  if constexpr (std::is_enum_v<T>) {
    for (const EnumName& e : enum_names<T>()) {
      if (e.value == static_cast<int>(v)) return e.name;
    }
    return nullptr;
  } else {
    return v;
  }
}

template <typename T>
void field_from_json(const std::string& key, const Json& j, T& out) {
  auto bad = [&](const std::string& want) {
    return ConfigError("config key '" + key + "': expected " + want +
                       ", found " + j.dump());
  };
  if constexpr (std::is_enum_v<T>) {
    std::string names;
    for (const EnumName& e : enum_names<T>()) {
      if (j.is_string() && j.get<std::string>() == e.name) {
        out = static_cast<T>(e.value);
        return;
      }
      names += names.empty() ? e.name : std::string(" | ") + e.name;
    }
    throw bad(names);
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!j.is_boolean()) throw bad("true or false");
    out = j.get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (j.is_number_unsigned()) {
      out = static_cast<T>(j.get<std::uint64_t>());
    } else if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
      out = static_cast<T>(j.get<std::int64_t>());
    } else {
      throw bad("a non-negative integer");
    }
  } else {
    if (!j.is_number()) throw bad("a number");
    out = j.get<double>();
  }
}

// Visits every configuration key in file order.
template <typename C, typename F>
void for_each_field(C& c, F&& f) {
  f("seed", c.seed);
  f("n_records", c.n_records);
  f("noise_prob", c.noise_prob);
  f("image_noise", c.image_noise);
  f("image_dim", c.image_dim);
  f("valid_fraction", c.valid_fraction);
  f("test_fraction", c.test_fraction);
  f("min_freq", c.min_freq);
  f("embed_dim", c.embed_dim);
  f("hidden_dim", c.hidden_dim);
  f("attn_dim", c.attn_dim);
  f("disc_embed_dim", c.disc_embed_dim);
  f("disc_hidden_dim", c.disc_hidden_dim);
  f("use_attrs", c.use_attrs);
  f("use_image", c.use_image);
  auto& t = c.trainer;
  f("pretrain_epochs", t.pretrain_epochs);
  f("pretrain_batch_size", t.pretrain_batch_size);
  f("pretrain_lr", t.pretrain_lr);
  f("adv_rounds", t.adv_rounds);
  f("g_steps", t.g_steps);
  f("d_steps", t.d_steps);
  f("disc_warmup_steps", t.disc_warmup_steps);
  f("batch_size", t.batch_size);
  f("n_rollouts", t.n_rollouts);
  f("optimizer", t.optimizer);
  f("gen_lr", t.gen_lr);
  f("disc_lr", t.disc_lr);
  f("max_len", t.max_len);
  f("clip_norm", t.clip_norm);
  f("temperature", t.temperature);
  f("baseline", t.baseline);
  f("baseline_decay", t.baseline_decay);
  f("disc_loss", t.disc_loss);
  f("eval_limit", t.eval_limit);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create directory '" + dir + "': " + ec.message());
  }
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void emit(const LogSink& log, const std::string& line) {
  if (log) log(line);
}

Json score_json(const RougeScore& s) {
  Json j;
  j["recall"] = s.recall;
  j["precision"] = s.precision;
  j["f1"] = s.f1;
  return j;
}

std::vector<ProductRecord> select(const std::vector<ProductRecord>& records,
                                  const std::vector<std::size_t>& idx) {
  std::vector<ProductRecord> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(records[i]);
  return out;
}

std::vector<ProductRecord> load_optional(const std::string& path) {
  return fs::exists(path) ? load_corpus(path) : std::vector<ProductRecord>{};
}

std::string default_vocab(const std::string& vocab_path,
                          const std::string& checkpoint_path) {
  if (!vocab_path.empty()) return vocab_path;
  return join(fs::path(checkpoint_path).parent_path().string(), "vocab.txt");
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

TrainerConfig RunConfig::tuned_trainer_config() {
  TrainerConfig t;
  t.optimizer = OptimizerConfig::Kind::kAdam;
  t.pretrain_lr = 0.01;
  t.pretrain_batch_size = 16;
  t.gen_lr = 3e-4;
  t.disc_lr = 0.03;
  t.batch_size = 32;
  t.d_steps = 5;
  t.disc_warmup_steps = 200;
  t.baseline = BaselineMode::kMovingAverage;
  return t;
}

RunConfig RunConfig::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("run configuration must be a JSON object");
  RunConfig c;
  std::size_t known = 0;
  for_each_field(c, [&](const char* key, auto& field) {
    auto it = j.find(key);
    if (it == j.end()) return;
    ++known;
    field_from_json(key, *it, field);
  });
  if (known != j.size()) {
    const Json defaults = RunConfig{}.to_json();
    for (const auto& [key, _] : j.items()) {
      if (!defaults.contains(key)) {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  }
  c.validate();
  return c;
}

Json RunConfig::to_json() const {
  Json j = Json::object();
  for_each_field(*this, [&](const char* key, const auto& field) {
    j[key] = field_to_json(field);
  });
  return j;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  Json parsed = Json::parse(value, nullptr, false);
  if (parsed.is_discarded()) parsed = value;
  bool found = false;
  RunConfig next = *this;
  for_each_field(next, [&](const char* name, auto& field) {
    if (key != name) return;
    found = true;
    field_from_json(key, parsed, field);
  });
  if (!found) throw ConfigError("unknown config key '" + key + "'");
  next.validate();
  *this = next;
}

void RunConfig::validate() const {
  synth_config().validate();
  if (!(valid_fraction >= 0.0 && test_fraction >= 0.0 &&
        valid_fraction + test_fraction < 1.0)) {
    throw ConfigError("valid_fraction and test_fraction must be >= 0 and sum to < 1");
  }
  if (min_freq < 1) throw ConfigError("min_freq must be >= 1");
  if (embed_dim == 0 || hidden_dim == 0 || attn_dim == 0 ||
      disc_embed_dim == 0 || disc_hidden_dim == 0) {
    throw ConfigError("model dimensions must be >= 1");
  }
  trainer_config().validate();
}

SynthConfig RunConfig::synth_config() const {
  SynthConfig s = SynthConfig::defaults();
  s.n_records = n_records;
  s.noise_prob = noise_prob;
  s.image_noise = image_noise;
  s.image_dim = image_dim;
  s.seed = seed;
  return s;
}

GeneratorConfig RunConfig::generator_config(std::size_t vocab_size) const {
  GeneratorConfig g;
  g.vocab_size = vocab_size;
  g.embed_dim = embed_dim;
  g.hidden_dim = hidden_dim;
  g.attn_dim = attn_dim;
  g.image_dim = image_dim;
  g.use_attrs = use_attrs;
  g.use_image = use_image;
  return g;
}

DiscriminatorConfig RunConfig::discriminator_config(
    std::size_t vocab_size) const {
  DiscriminatorConfig d;
  d.vocab_size = vocab_size;
  d.embed_dim = disc_embed_dim;
  d.hidden_dim = disc_hidden_dim;
  return d;
}

TrainerConfig RunConfig::trainer_config() const {
  TrainerConfig t = trainer;
  t.seed = seed;
  return t;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  Json j = Json::parse(buffer.str(), nullptr, false);
  if (j.is_discarded()) throw ParseError("config '" + path + "' is not valid JSON");
  return RunConfig::from_json(j);
}

void save_run_config(const RunConfig& config, const std::string& path) {
  auto out = open_out(path);
  out << config.to_json().dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::uint64_t generator_seed(std::uint64_t run_seed) {
  return derive_seed(run_seed, 1);
}

std::uint64_t discriminator_seed(std::uint64_t run_seed) {
  return derive_seed(run_seed, 2);
}

Json rouge_to_json(const CorpusRouge& rouge) {
  Json j;
  j["pairs"] = rouge.pairs;
  j["rouge1"] = score_json(rouge.rouge1);
  j["rouge2"] = score_json(rouge.rouge2);
  j["rougeL"] = score_json(rouge.rougeL);
  return j;
}

// ---------------------------------------------------------------------------
// Commands

void cmd_synth(const RunConfig& config, const std::string& out_dir,
               const LogSink& log) {
  config.validate();
  ensure_dir(out_dir);
  const auto records = synth_generate(config.synth_config());
  const SplitIndices split = split_indices(records.size(), config.seed,
                                           config.valid_fraction,
                                           config.test_fraction);
  const std::pair<const char*, const std::vector<std::size_t>*> parts[] = {
      {"train", &split.train}, {"valid", &split.valid}, {"test", &split.test}};
  for (const auto& [name, idx] : parts) {
    if (idx->empty()) emit(log, std::string("warning: ") + name + " split is empty");
    save_corpus(select(records, *idx), join(out_dir, std::string(name) + ".jsonl"));
    emit(log, std::string(name) + ": " + std::to_string(idx->size()) + " records");
  }
  save_run_config(config, join(out_dir, "config.json"));
}

void cmd_build_vocab(const RunConfig& config, const std::string& corpus_path,
                     const std::string& out_dir, const LogSink& log) {
  config.validate();
  ensure_dir(out_dir);
  const Vocab vocab = build_vocab(load_corpus(corpus_path), config.min_freq);
  vocab.save(join(out_dir, "vocab.txt"));
  emit(log, "vocabulary: " + std::to_string(vocab.size()) + " tokens");
  save_run_config(config, join(out_dir, "config.json"));
}

void cmd_pretrain(const RunConfig& config, const std::string& data_dir,
                  const std::string& vocab_path, const std::string& out_dir,
                  const LogSink& log) {
  config.validate();
  const auto train_records = load_corpus(join(data_dir, "train.jsonl"));
  const auto valid_records = load_optional(join(data_dir, "valid.jsonl"));
  const Vocab vocab = vocab_path.empty()
                          ? build_vocab(train_records, config.min_freq)
                          : Vocab::load(vocab_path);
  ensure_dir(out_dir);
  save_run_config(config, join(out_dir, "config.json"));
  vocab.save(join(out_dir, "vocab.txt"));

  const auto train = make_examples(train_records, vocab);
  const auto valid = make_examples(valid_records, vocab);
  Generator gen(config.generator_config(vocab.size()),
                generator_seed(config.seed));
  Discriminator disc(config.discriminator_config(vocab.size()),
                     discriminator_seed(config.seed));

  const auto history =
      pretrain_mle(gen, vocab, train, valid, config.trainer_config());
  auto out = open_out(join(out_dir, "pretrain_log.jsonl"));
  for (const EpochLog& e : history) {
    Json j;
    j["epoch"] = e.epoch;
    j["train_nll"] = e.train_nll;
    if (e.has_valid) j.update(rouge_to_json(e.valid));
    out << j.dump() << '\n';
    emit(log, j.dump());
  }
  if (!out) throw IoError("failed writing pretrain_log.jsonl");
  save_checkpoint(join(out_dir, "pretrain.ckpt"),
                  make_checkpoint({&gen.params(), &disc.params()}, config.seed));
}

void cmd_train_adv(const RunConfig& config, const std::string& data_dir,
                   const std::string& checkpoint_path,
                   const std::string& vocab_path, const std::string& out_dir,
                   const LogSink& log) {
  config.validate();
  const Vocab vocab =
      Vocab::load(default_vocab(vocab_path, checkpoint_path));
  const Checkpoint start = load_checkpoint(checkpoint_path);
  const auto train = make_examples(load_corpus(join(data_dir, "train.jsonl")), vocab);
  const auto valid =
      make_examples(load_optional(join(data_dir, "valid.jsonl")), vocab);

  Generator gen(config.generator_config(vocab.size()),
                generator_seed(config.seed));
  Discriminator disc(config.discriminator_config(vocab.size()),
                     discriminator_seed(config.seed));
  restore(gen.params(), start);
  restore(disc.params(), start);

  ensure_dir(out_dir);
  save_run_config(config, join(out_dir, "config.json"));
  vocab.save(join(out_dir, "vocab.txt"));
  auto metrics = open_out(join(out_dir, "metrics.jsonl"));

  const TrainerConfig tc = config.trainer_config();
  if (!valid.empty()) {
    Json j;
    j["round"] = 0;
    j.update(rouge_to_json(
        evaluate_rouge(gen, vocab, valid, tc.max_len, tc.eval_limit)));
    metrics << j.dump() << '\n' << std::flush;
    emit(log, j.dump());
  }

  DiscriminatorCritic critic(disc);
  TrainerState state(derive_seed(config.seed, 3));
  adversarial_train(
      gen, critic, vocab, train, valid, tc, state,
      [&](const RoundMetrics& m) {
        char name[32];
        std::snprintf(name, sizeof(name), "round_%04zu.ckpt", m.round);
        save_checkpoint(
            join(out_dir, name),
            make_checkpoint({&gen.params(), &disc.params()}, config.seed));
        Json j;
        j["round"] = m.round;
        j["mean_reward"] = m.mean_reward;
        j["disc_loss"] = m.disc_loss;
        j["real_score"] = m.real_score;
        j["fake_score"] = m.fake_score;
        if (m.has_valid) j.update(rouge_to_json(m.valid));
        metrics << j.dump() << '\n' << std::flush;
        emit(log, j.dump());
      });
  if (!metrics) throw IoError("failed writing metrics.jsonl");
}

void cmd_generate(const RunConfig& config, const std::string& checkpoint_path,
                  const std::string& vocab_path, const std::string& corpus_path,
                  const std::string& out_dir, bool sample,
                  const LogSink& log) {
  config.validate();
  const Vocab vocab =
      Vocab::load(default_vocab(vocab_path, checkpoint_path));
  Generator gen(config.generator_config(vocab.size()),
                generator_seed(config.seed));
  restore(gen.params(), load_checkpoint(checkpoint_path));
  const auto examples = make_examples(load_corpus(corpus_path), vocab);

  ensure_dir(out_dir);
  auto out = open_out(join(out_dir, "generated.jsonl"));
  DecodeOptions options;
  options.strategy = sample ? DecodeStrategy::kSample : DecodeStrategy::kGreedy;
  options.temperature = config.trainer.temperature;
  options.max_len = config.trainer.max_len;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    options.seed = derive_seed(config.seed, i);
    Json j;
    j["short_title"] = vocab.decode(gen.generate(examples[i].inputs, options));
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing generated.jsonl");
  emit(log, "generated " + std::to_string(examples.size()) + " titles");
}

Json cmd_evaluate(const std::string& generated_path,
                  const std::string& reference_path,
                  const std::string& out_dir, const LogSink& log) {
  std::ifstream in(generated_path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + generated_path + "'");
  std::vector<TokenSeq> candidates;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.empty()) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("short_title") ||
        !j["short_title"].is_array()) {
      throw ParseError(generated_path + ": line " + std::to_string(line_no) +
                       ": expected an object with a short_title array");
    }
    TokenSeq tokens;
    for (const Json& t : j["short_title"]) {
      if (!t.is_string()) {
        throw ParseError(generated_path + ": line " + std::to_string(line_no) +
                         ": short_title entries must be strings");
      }
      tokens.push_back(t.get<std::string>());
    }
    candidates.push_back(std::move(tokens));
  }
  const auto references = load_corpus(reference_path);
  if (candidates.size() != references.size()) {
    throw ContractError("evaluate: " + std::to_string(candidates.size()) +
                        " generated titles but " +
                        std::to_string(references.size()) + " references");
  }
  std::vector<std::pair<TokenSeq, TokenSeq>> pairs;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    pairs.emplace_back(std::move(candidates[i]), references[i].short_title);
  }
  const Json report = rouge_to_json(corpus_rouge(pairs));
  ensure_dir(out_dir);
  auto out = open_out(join(out_dir, "rouge.json"));
  out << report.dump(2) << '\n';
  if (!out) throw IoError("failed writing rouge.json");
  emit(log, report.dump());
  return report;
}

}  // namespace titlegan
