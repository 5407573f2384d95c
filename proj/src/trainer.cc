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

#include "trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "errors.h"

namespace titlegan {

namespace {

// Stream tags for seeds derived inside one episode.
constexpr std::uint64_t kSampleStream = 0;
constexpr std::uint64_t kRolloutStream = 1;

std::vector<const Example*> draw_batch(std::span<const Example> data,
                                       std::size_t batch_size, Rng& rng) {
  const std::size_t n = data.size();
  const std::size_t k = std::min(batch_size, n);
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<const Example*> batch;
  batch.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + rng.below(n - i)]);
    batch.push_back(&data[pool[i]]);
  }
  return batch;
}

std::vector<TokenId> with_eos(std::span<const TokenId> title) {
  std::vector<TokenId> seq(title.begin(), title.end());
  seq.push_back(kEosId);
  return seq;
}

}  // namespace

std::vector<Example> make_examples(const std::vector<ProductRecord>& records,
                                   const Vocab& vocab) {
  std::vector<Example> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    Example ex;
    ex.inputs.title = vocab.encode(r.long_title);
    ex.inputs.attrs = vocab.encode(r.attr_tags);
    ex.inputs.image = r.image_features;
    ex.target = vocab.encode(r.short_title);
    ex.reference = r.short_title;
    out.push_back(std::move(ex));
  }
  return out;
}

void TrainerConfig::validate() const {
  auto positive = [](const char* name, std::size_t v) {
    if (v == 0) throw ConfigError(std::string(name) + " must be >= 1");
  };
  positive("g_steps", g_steps);
  positive("d_steps", d_steps);
  positive("pretrain_batch_size", pretrain_batch_size);
  positive("batch_size", batch_size);
  positive("n_rollouts", n_rollouts);
  positive("max_len", max_len);
  for (auto [name, lr] : {std::pair{"pretrain_lr", pretrain_lr},
                          std::pair{"gen_lr", gen_lr},
                          std::pair{"disc_lr", disc_lr}}) {
    if (!(lr >= 0.0) || !std::isfinite(lr)) {
      throw ConfigError(std::string(name) + " must be finite and >= 0");
    }
  }
  if (!(clip_norm >= 0.0)) throw ConfigError("clip_norm must be >= 0");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("temperature must be finite and positive");
  }
  if (!(baseline_decay >= 0.0 && baseline_decay < 1.0)) {
    throw ConfigError("baseline_decay must lie in [0, 1)");
  }
}

OptimizerConfig TrainerConfig::optimizer_config(double learning_rate) const {
  OptimizerConfig c;
  c.kind = optimizer;
  c.learning_rate = learning_rate;
  return c;
}

// ---------------------------------------------------------------------------
// Critics

double DiscriminatorCritic::reward(std::span<const TokenId> title) const {
  return disc_.score(with_eos(title));
}

DiscStepResult DiscriminatorCritic::train_step(
    const Generator& gen, std::span<const Example* const> real_batch,
    const TrainerConfig& config, std::uint64_t seed) {
  return discriminator_step(disc_, gen, real_batch, config, seed);
}

double FixedRewardCritic::reward(std::span<const TokenId> title) const {
  if (title.empty()) return otherwise_;
  auto it = rewards_.find(title.front());
  return it == rewards_.end() ? otherwise_ : it->second;
}

// ---------------------------------------------------------------------------
// MLE

double mean_token_nll(const Generator& gen, std::span<const Example> data) {
  double total = 0.0;
  std::size_t tokens = 0;
  for (const Example& ex : data) {
    total -= gen.sequence_logprob(ex.inputs, ex.target).total;
    tokens += ex.target.size() + 1;
  }
  return tokens == 0 ? 0.0 : total / static_cast<double>(tokens);
}

std::vector<EpochLog> pretrain_mle(Generator& gen, const Vocab& vocab,
                                   std::span<const Example> train,
                                   std::span<const Example> valid,
                                   const TrainerConfig& config) {
  config.validate();
  if (train.empty()) throw ContractError("pretrain_mle: empty training set");
  const OptimizerConfig opt = config.optimizer_config(config.pretrain_lr);

  std::vector<EpochLog> log;
  auto record = [&](std::size_t epoch, double nll) {
    EpochLog entry;
    entry.epoch = epoch;
    entry.train_nll = nll;
    if (!valid.empty()) {
      entry.has_valid = true;
      entry.valid =
          evaluate_rouge(gen, vocab, valid, config.max_len, config.eval_limit);
    }
    log.push_back(entry);
  };
  record(0, mean_token_nll(gen, train));

  std::vector<std::size_t> order(train.size());
  for (std::size_t epoch = 1; epoch <= config.pretrain_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(config.seed, epoch));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    double epoch_nll = 0.0;
    std::size_t epoch_tokens = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.pretrain_batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.pretrain_batch_size);
      std::size_t batch_tokens = 0;
      for (std::size_t k = start; k < stop; ++k) {
        batch_tokens += train[order[k]].target.size() + 1;
      }
      gen.params().zero_grad();
      for (std::size_t k = start; k < stop; ++k) {
        const Example& ex = train[order[k]];
        const std::vector<TokenId> actions = with_eos(ex.target);
        Tape tape;
        const GeneratorGraph g = gen.bind(tape);
        std::vector<Var> lps = gen.action_logprobs(g, ex.inputs, actions);
        Var nll = neg(sum(concat(lps, 1)));
        epoch_nll += nll.value()[0];
        tape.backward(scale(nll, 1.0 / static_cast<double>(batch_tokens)));
      }
      epoch_tokens += batch_tokens;
      clip_grad_norm(gen.params(), config.clip_norm);
      optimizer_step(gen.params(), opt);
    }
    record(epoch, epoch_nll / static_cast<double>(epoch_tokens));
  }
  return log;
}

// ---------------------------------------------------------------------------
// Policy gradient

std::size_t RewardTrace::title_length() const {
  return !actions.empty() && actions.back() == kEosId ? actions.size() - 1
                                                       : actions.size();
}

std::vector<std::vector<TokenId>> mc_rollout(const Generator& gen,
                                             const GeneratorInputs& inputs,
                                             std::span<const TokenId> prefix,
                                             std::size_t n_rollouts,
                                             std::size_t max_len,
                                             std::uint64_t seed,
                                             double temperature) {
  return gen.rollouts(inputs, prefix, n_rollouts, max_len, seed, temperature);
}

RewardTrace step_rewards(const Generator& gen, const RewardModel& reward,
                         std::span<const TokenId> actions,
                         const GeneratorInputs& inputs, std::size_t n_rollouts,
                         std::size_t max_len, std::uint64_t seed,
                         double temperature) {
  if (actions.empty()) throw ContractError("step_rewards: empty episode");
  if (n_rollouts == 0) throw ConfigError("step_rewards: n_rollouts must be >= 1");
  RewardTrace trace;
  trace.actions.assign(actions.begin(), actions.end());
  const std::size_t steps = actions.size();
  const std::span<const TokenId> title =
      actions.subspan(0, trace.title_length());
  for (std::size_t t = 1; t < steps; ++t) {
    const auto completions =
        gen.rollouts(inputs, actions.subspan(0, t), n_rollouts, max_len,
                     derive_seed(seed, t), temperature);
    double total = 0.0;
    for (const auto& c : completions) total += reward.reward(c);
    trace.rewards.push_back(total / static_cast<double>(completions.size()));
  }
  trace.rewards.push_back(reward.reward(title));

  Tape tape(Tape::Mode::kNoGrad);
  for (Var lp : gen.action_logprobs(gen.bind_frozen(tape), inputs, actions)) {
    trace.logprobs.push_back(lp.value()[0]);
  }
  return trace;
}

RewardTrace reinforce_sample(Generator& gen, const RewardModel& reward,
                             const Example& example,
                             const TrainerConfig& config, double baseline,
                             double weight, std::uint64_t seed) {
  DecodeOptions options;
  options.strategy = DecodeStrategy::kSample;
  options.temperature = config.temperature;
  options.seed = derive_seed(seed, kSampleStream);
  options.max_len = config.max_len;
  std::vector<TokenId> actions = gen.generate(example.inputs, options);
  if (actions.size() < config.max_len) actions.push_back(kEosId);

  RewardTrace trace =
      step_rewards(gen, reward, actions, example.inputs, config.n_rollouts,
                   config.max_len, derive_seed(seed, kRolloutStream),
                   config.temperature);

  Tape tape;
  const GeneratorGraph g = gen.bind(tape);
  std::vector<Var> lps = gen.action_logprobs(g, example.inputs, trace.actions);
  std::vector<Var> terms;
  terms.reserve(lps.size());
  for (std::size_t t = 0; t < lps.size(); ++t) {
    terms.push_back(scale(lps[t], -(trace.rewards[t] - baseline) * weight));
  }
  Var surrogate = sum(concat(terms, 1));
  if (!std::isfinite(surrogate.value()[0])) {
    std::ostringstream msg;
    msg << "policy-gradient surrogate is not finite; rewards:";
    for (double r : trace.rewards) msg << ' ' << r;
    msg << "; logprobs:";
    for (Var lp : lps) msg << ' ' << lp.value()[0];
    throw NumericError(msg.str());
  }
  tape.backward(surrogate);
  return trace;
}

PgStepResult generator_pg_step(Generator& gen, const RewardModel& reward,
                               std::span<const Example* const> batch,
                               const TrainerConfig& config,
                               TrainerState& state) {
  if (batch.empty()) throw ContractError("generator_pg_step: empty batch");
  const std::uint64_t step_seed = state.rng.next_u64();
  const double baseline =
      config.baseline == BaselineMode::kMovingAverage ? state.baseline : 0.0;
  const double weight = 1.0 / static_cast<double>(batch.size());

  gen.params().zero_grad();
  PgStepResult result;
  double step_reward_total = 0.0;
  std::size_t step_count = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const RewardTrace trace =
        reinforce_sample(gen, reward, *batch[i], config, baseline, weight,
                         derive_seed(step_seed, i));
    result.mean_reward += trace.rewards.back();
    for (double r : trace.rewards) step_reward_total += r;
    step_count += trace.rewards.size();
  }
  result.mean_reward /= static_cast<double>(batch.size());
  result.mean_step_reward = step_reward_total / static_cast<double>(step_count);
  result.grad_norm = clip_grad_norm(gen.params(), config.clip_norm);
  optimizer_step(gen.params(), config.optimizer_config(config.gen_lr));
  if (config.baseline == BaselineMode::kMovingAverage) {
    state.baseline = config.baseline_decay * state.baseline +
                     (1.0 - config.baseline_decay) * result.mean_step_reward;
  }
  return result;
}

DiscStepResult discriminator_step(Discriminator& disc, const Generator& gen,
                                  std::span<const Example* const> real_batch,
                                  const TrainerConfig& config,
                                  std::uint64_t seed) {
  if (real_batch.empty()) {
    throw ContractError("discriminator_step: empty real batch");
  }
  std::vector<std::vector<TokenId>> reals;
  std::vector<std::vector<TokenId>> fakes;
  for (std::size_t i = 0; i < real_batch.size(); ++i) {
    const Example& ex = *real_batch[i];
    DecodeOptions options;
    options.strategy = DecodeStrategy::kSample;
    options.temperature = config.temperature;
    options.seed = derive_seed(seed, i);
    options.max_len = config.max_len;
    reals.push_back(with_eos(ex.target));
    fakes.push_back(with_eos(gen.generate(ex.inputs, options)));
  }

  disc.params().zero_grad();
  DiscStepResult result;
  {
    Tape tape;
    const DiscriminatorGraph g = disc.bind(tape);
    std::vector<Var> real_scores, fake_scores;
    for (const auto& s : reals) real_scores.push_back(disc.score(g, s));
    for (const auto& s : fakes) fake_scores.push_back(disc.score(g, s));
    Var loss = disc_loss(real_scores, fake_scores, config.disc_loss);
    result.loss = loss.value()[0];
    tape.backward(loss);
  }
  clip_grad_norm(disc.params(), config.clip_norm);
  optimizer_step(disc.params(), config.optimizer_config(config.disc_lr));

  for (const auto& s : reals) result.real_score += disc.score(s);
  for (const auto& s : fakes) result.fake_score += disc.score(s);
  result.real_score /= static_cast<double>(reals.size());
  result.fake_score /= static_cast<double>(fakes.size());
  return result;
}

// ---------------------------------------------------------------------------
// Adversarial schedule

std::vector<RoundMetrics> adversarial_train(Generator& gen, Critic& critic,
                                            const Vocab& vocab,
                                            std::span<const Example> train,
                                            std::span<const Example> valid,
                                            const TrainerConfig& config,
                                            TrainerState& state,
                                            const RoundCallback& on_round) {
  config.validate();
  std::vector<RoundMetrics> log;
  if (config.adv_rounds == 0) return log;
  if (train.empty()) throw ContractError("adversarial_train: empty training set");

  for (std::size_t s = 0; s < config.disc_warmup_steps; ++s) {
    const auto batch = draw_batch(train, config.batch_size, state.rng);
    critic.train_step(gen, batch, config, state.rng.next_u64());
  }
  for (std::size_t round = 1; round <= config.adv_rounds; ++round) {
    RoundMetrics m;
    m.round = round;
    for (std::size_t s = 0; s < config.g_steps; ++s) {
      const auto batch = draw_batch(train, config.batch_size, state.rng);
      m.mean_reward += generator_pg_step(gen, critic, batch, config, state)
                           .mean_reward;
    }
    m.mean_reward /= static_cast<double>(config.g_steps);
    for (std::size_t s = 0; s < config.d_steps; ++s) {
      const auto batch = draw_batch(train, config.batch_size, state.rng);
      const DiscStepResult d =
          critic.train_step(gen, batch, config, state.rng.next_u64());
      m.disc_loss += d.loss;
      m.real_score = d.real_score;
      m.fake_score = d.fake_score;
    }
    m.disc_loss /= static_cast<double>(config.d_steps);
    if (!valid.empty()) {
      m.has_valid = true;
      m.valid =
          evaluate_rouge(gen, vocab, valid, config.max_len, config.eval_limit);
    }
    log.push_back(m);
    if (on_round) on_round(m);
  }
  return log;
}

CorpusRouge evaluate_rouge(const Generator& gen, const Vocab& vocab,
                           std::span<const Example> data, std::size_t max_len,
                           std::size_t limit) {
  const std::size_t n =
      limit == 0 ? data.size() : std::min(limit, data.size());
  std::vector<std::pair<TokenSeq, TokenSeq>> pairs;
  pairs.reserve(n);
  DecodeOptions options;
  options.max_len = max_len;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ids = gen.generate(data[i].inputs, options);
    pairs.emplace_back(vocab.decode(ids), data[i].reference);
  }
  return corpus_rouge(pairs);
}

}  // namespace titlegan
