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

#include "discriminator.h"

#include "errors.h"

namespace titlegan {

void DiscriminatorConfig::validate() const {
  if (vocab_size <= static_cast<std::size_t>(kNumReserved)) {
    throw ConfigError("discriminator: vocabulary too small");
  }
  if (embed_dim == 0 || hidden_dim == 0) {
    throw ConfigError("discriminator: dimensions must be positive");
  }
}

Discriminator::Discriminator(DiscriminatorConfig config, std::uint64_t seed)
    : config_(config) {
  config_.validate();
  Rng rng(seed);
  const std::size_t d = config_.embed_dim;
  const std::size_t h = config_.hidden_dim;
  params_.add_uniform("disc/embed", config_.vocab_size, d, d, rng);
  add_lstm_params(params_, "disc/lstm1", d, h, rng);
  add_lstm_params(params_, "disc/lstm2", h, h, rng);
  add_dense_params(params_, "disc/out", h, 2, rng);
}

template <typename Binder>
DiscriminatorGraph Discriminator::bind_with(Binder&& p) const {
  DiscriminatorGraph g;
  g.embed = p("disc/embed");
  g.layer1 = {p("disc/lstm1_w"), p("disc/lstm1_b")};
  g.layer2 = {p("disc/lstm2_w"), p("disc/lstm2_b")};
  g.out_w = p("disc/out_w");
  g.out_b = p("disc/out_b");
  return g;
}

DiscriminatorGraph Discriminator::bind(Tape& tape) {
  return bind_with(
      [&](const char* name) { return tape.param(params_, name); });
}

DiscriminatorGraph Discriminator::bind_frozen(Tape& tape) const {
  return bind_with(
      [&](const char* name) { return tape.constant(params_.value(name)); });
}

std::vector<TokenId> Discriminator::effective_tokens(
    std::span<const TokenId> seq) {
  std::vector<TokenId> out;
  for (TokenId t : seq) {
    if (t == kPadId) continue;
    out.push_back(t);
    if (t == kEosId) break;
  }
  return out;
}

Var Discriminator::score(const DiscriminatorGraph& g,
                         std::span<const TokenId> seq) const {
  const std::vector<TokenId> tokens = effective_tokens(seq);
  if (tokens.empty()) {
    throw ContractError("discriminator: cannot score an empty sequence");
  }
  Tape& tape = *g.embed.tape();
  Var embedded = lookup(g.embed, tokens);
  LstmState s1 = zero_lstm_state(tape, config_.hidden_dim);
  LstmState s2 = zero_lstm_state(tape, config_.hidden_dim);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    s1 = lstm_cell(g.layer1, row_of(embedded, t), s1);
    s2 = lstm_cell(g.layer2, s1.h, s2);
  }
  Var probs = softmax(dense(s2.h, g.out_w, g.out_b), 1);
  return pick(probs, 0, 1);
}

double Discriminator::score(std::span<const TokenId> seq) const {
  Tape tape(Tape::Mode::kNoGrad);
  return score(bind_frozen(tape), seq).value()[0];
}

Var disc_loss(const std::vector<Var>& real_scores,
              const std::vector<Var>& fake_scores, DiscLossMode mode) {
  if (real_scores.empty() || fake_scores.empty()) {
    throw ContractError("disc_loss: real and fake batches must be nonempty");
  }
  std::vector<Var> real_logs;
  std::vector<Var> fake_logs;
  for (Var s : real_scores) {
    real_logs.push_back(log(clamp(s, kScoreClampLo, kScoreClampHi)));
  }
  for (Var s : fake_scores) {
    Var clamped = clamp(s, kScoreClampLo, kScoreClampHi);
    fake_logs.push_back(mode == DiscLossMode::kCrossEntropy
                            ? log(add_scalar(neg(clamped), 1.0))
                            : log(clamped));
  }
  Var real_sum = sum(concat(real_logs, 1));
  Var fake_sum = sum(concat(fake_logs, 1));
  if (mode == DiscLossMode::kCrossEntropy) {
    const double n = static_cast<double>(real_logs.size() + fake_logs.size());
    return scale(add(real_sum, fake_sum), -1.0 / n);
  }
  Var real_mean = scale(real_sum, 1.0 / static_cast<double>(real_logs.size()));
  Var fake_mean = scale(fake_sum, 1.0 / static_cast<double>(fake_logs.size()));
  return neg(sub(real_mean, fake_mean));
}

}  // namespace titlegan
