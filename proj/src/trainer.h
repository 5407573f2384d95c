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

// Training loops: teacher-forced MLE pretraining, Monte Carlo rollout
// rewards, the REINFORCE generator update and the alternating adversarial
// schedule.
//
// An episode is the action sequence a_1..a_T the generator emitted: the
// title tokens, plus a closing EOS when the title ended before max_len.
// Action a_t earns reward
//   r_t = mean over N' rollouts of R(rollout completing a_1..a_t)  for t < T
//   r_T = R(title)
// and the generator minimizes  -sum_t (r_t - b) log pi(a_t | a_<t), where b
// is zero or a moving average of past rewards.

#ifndef TITLEGAN_TRAINER_H_
#define TITLEGAN_TRAINER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "corpus.h"
#include "discriminator.h"
#include "generator.h"
#include "params.h"
#include "rouge.h"

namespace titlegan {

struct Example {
  GeneratorInputs inputs;
  std::vector<TokenId> target;     // encoded short title, no EOS
  std::vector<std::string> reference;  // short title as written
};

std::vector<Example> make_examples(const std::vector<ProductRecord>& records,
                                   const Vocab& vocab);

enum class BaselineMode { kNone, kMovingAverage };

struct TrainerConfig {
  std::size_t pretrain_epochs = 10;
  std::size_t adv_rounds = 5;
  std::size_t g_steps = 1;
  std::size_t d_steps = 1;
  // Critic updates run once before the first adversarial round.
  std::size_t disc_warmup_steps = 0;
  std::size_t pretrain_batch_size = 16;
  // Adversarial-phase batch, for generator and critic steps alike.
  std::size_t batch_size = 16;
  std::size_t n_rollouts = 4;
  OptimizerConfig::Kind optimizer = OptimizerConfig::Kind::kSgd;
  double pretrain_lr = 0.01;
  double gen_lr = 0.01;
  double disc_lr = 0.01;
  std::size_t max_len = 10;
  double clip_norm = 5.0;
  double temperature = 1.0;
  std::uint64_t seed = 1;
  BaselineMode baseline = BaselineMode::kNone;
  double baseline_decay = 0.9;
  DiscLossMode disc_loss = DiscLossMode::kCrossEntropy;
  // Validation examples decoded per evaluation; 0 means all.
  std::size_t eval_limit = 0;

  void validate() const;
  OptimizerConfig optimizer_config(double learning_rate) const;
};

// ---------------------------------------------------------------------------
// Reward sources

// R(title): probability-like reward in (0, 1) for a title given without EOS.
class RewardModel {
 public:
  virtual ~RewardModel() = default;
  virtual double reward(std::span<const TokenId> title) const = 0;
};

struct DiscStepResult {
  double loss = 0.0;
  // Mean scores on the step's batch after the update.
  double real_score = 0.0;
  double fake_score = 0.0;
};

// A reward model that can also learn from real-vs-generated batches.
class Critic : public RewardModel {
 public:
  virtual DiscStepResult train_step(
      const Generator& gen, std::span<const Example* const> real_batch,
      const TrainerConfig& config, std::uint64_t seed) = 0;
};

// Scores titles with a discriminator; the title is closed with EOS before
// scoring, for real and generated titles alike.
class DiscriminatorCritic : public Critic {
 public:
  explicit DiscriminatorCritic(Discriminator& disc) : disc_(disc) {}
  double reward(std::span<const TokenId> title) const override;
  DiscStepResult train_step(const Generator& gen,
                            std::span<const Example* const> real_batch,
                            const TrainerConfig& config,
                            std::uint64_t seed) override;
  Discriminator& discriminator() { return disc_; }

 private:
  Discriminator& disc_;
};

// Reward determined by the first title token; untrainable. Titles starting
// with an unlisted token (or empty titles) earn `otherwise`.
class FixedRewardCritic : public Critic {
 public:
  FixedRewardCritic(std::map<TokenId, double> rewards, double otherwise = 0.0)
      : rewards_(std::move(rewards)), otherwise_(otherwise) {}
  double reward(std::span<const TokenId> title) const override;
  DiscStepResult train_step(const Generator&, std::span<const Example* const>,
                            const TrainerConfig&, std::uint64_t) override {
    return {};
  }

 private:
  std::map<TokenId, double> rewards_;
  double otherwise_;
};

// ---------------------------------------------------------------------------
// MLE pretraining

struct EpochLog {
  std::size_t epoch = 0;  // 0 is the evaluation before any update
  double train_nll = 0.0;  // mean per-token negative log-likelihood
  bool has_valid = false;
  CorpusRouge valid;
};

// Mean per-token NLL (EOS included as a target) without updating.
double mean_token_nll(const Generator& gen, std::span<const Example> data);

// Runs config.pretrain_epochs epochs of minibatch teacher forcing. The log
// has pretrain_epochs + 1 entries; entry 0 measures the initial model.
// When valid is nonempty, each entry also carries greedy validation ROUGE.
std::vector<EpochLog> pretrain_mle(Generator& gen, const Vocab& vocab,
                                   std::span<const Example> train,
                                   std::span<const Example> valid,
                                   const TrainerConfig& config);

// ---------------------------------------------------------------------------
// Policy gradient

struct RewardTrace {
  std::vector<TokenId> actions;  // title, plus EOS when it ended early
  std::vector<double> rewards;
  std::vector<double> logprobs;

  std::size_t title_length() const;
};

// N' completions of prefix under the current policy; see Generator::rollouts.
std::vector<std::vector<TokenId>> mc_rollout(const Generator& gen,
                                             const GeneratorInputs& inputs,
                                             std::span<const TokenId> prefix,
                                             std::size_t n_rollouts,
                                             std::size_t max_len,
                                             std::uint64_t seed,
                                             double temperature = 1.0);

// actions are as in RewardTrace. Rollouts for prefix length t use
// derive_seed(seed, t).
RewardTrace step_rewards(const Generator& gen, const RewardModel& reward,
                         std::span<const TokenId> actions,
                         const GeneratorInputs& inputs, std::size_t n_rollouts,
                         std::size_t max_len, std::uint64_t seed,
                         double temperature = 1.0);

// Samples one episode and adds weight * d/dtheta[-sum_t (r_t - baseline) log
// pi(a_t)] into gen.params() gradients. Returns the trace.
RewardTrace reinforce_sample(Generator& gen, const RewardModel& reward,
                             const Example& example,
                             const TrainerConfig& config, double baseline,
                             double weight, std::uint64_t seed);

struct TrainerState {
  Rng rng;
  double baseline = 0.0;
  explicit TrainerState(std::uint64_t seed) : rng(seed) {}
};

struct PgStepResult {
  double mean_reward = 0.0;  // mean terminal reward over the batch
  double mean_step_reward = 0.0;
  double grad_norm = 0.0;
};

// One REINFORCE update of the generator; the reward model is read-only.
PgStepResult generator_pg_step(Generator& gen, const RewardModel& reward,
                               std::span<const Example* const> batch,
                               const TrainerConfig& config,
                               TrainerState& state);

// Samples one fake title per real example and takes one optimizer step on
// disc_loss.
DiscStepResult discriminator_step(Discriminator& disc, const Generator& gen,
                                  std::span<const Example* const> real_batch,
                                  const TrainerConfig& config,
                                  std::uint64_t seed);

// ---------------------------------------------------------------------------
// Adversarial schedule

struct RoundMetrics {
  std::size_t round = 0;  // 1-based
  double mean_reward = 0.0;
  double disc_loss = 0.0;
  double real_score = 0.0;
  double fake_score = 0.0;
  bool has_valid = false;
  CorpusRouge valid;
};

using RoundCallback = std::function<void(const RoundMetrics&)>;

// config.disc_warmup_steps critic updates, then config.adv_rounds rounds of
// g_steps generator updates followed by d_steps critic updates. on_round runs
// after each round's metrics are final.
std::vector<RoundMetrics> adversarial_train(Generator& gen, Critic& critic,
                                            const Vocab& vocab,
                                            std::span<const Example> train,
                                            std::span<const Example> valid,
                                            const TrainerConfig& config,
                                            TrainerState& state,
                                            const RoundCallback& on_round = {});

// Greedy decoding of (up to limit) examples scored against their references.
CorpusRouge evaluate_rouge(const Generator& gen, const Vocab& vocab,
                           std::span<const Example> data, std::size_t max_len,
                           std::size_t limit = 0);

}  // namespace titlegan

#endif  // TITLEGAN_TRAINER_H_
