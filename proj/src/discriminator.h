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

#ifndef TITLEGAN_DISCRIMINATOR_H_
#define TITLEGAN_DISCRIMINATOR_H_

#include <cstdint>
#include <span>
#include <vector>

#include "corpus.h"
#include "nn.h"
#include "params.h"

namespace titlegan {

struct DiscriminatorConfig {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 32;
  std::size_t hidden_dim = 32;

  void validate() const;
};

enum class DiscLossMode {
  // -mean over the combined batch of log D(real) and log(1 - D(fake)).
  kCrossEntropy,
  // -(mean log D(real) - mean log D(fake)); unbounded below.
  kLogRatio,
};

inline constexpr double kScoreClampLo = 1e-7;
inline constexpr double kScoreClampHi = 1.0 - 1e-7;

struct DiscriminatorGraph {
  Var embed;
  LstmWeights layer1;
  LstmWeights layer2;
  Var out_w, out_b;
};

// Two stacked LSTM layers over the title tokens; the final top-layer hidden
// state goes through a two-way softmax whose second entry is the probability
// that the title was written by a person.
class Discriminator {
 public:
  // All parameter names start with "disc/".
  Discriminator(DiscriminatorConfig config, std::uint64_t seed);

  const DiscriminatorConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  DiscriminatorGraph bind(Tape& tape);
  DiscriminatorGraph bind_frozen(Tape& tape) const;

  // Tokens the recurrence actually reads: PAD entries are dropped and
  // everything after the first EOS is ignored (the EOS itself is kept).
  static std::vector<TokenId> effective_tokens(std::span<const TokenId> seq);

  // 1 x 1 probability-real. Throws ContractError when no tokens remain after
  // effective_tokens and IndexError for ids outside the vocabulary.
  Var score(const DiscriminatorGraph& g, std::span<const TokenId> seq) const;
  double score(std::span<const TokenId> seq) const;

 private:
  template <typename Binder>
  DiscriminatorGraph bind_with(Binder&& binder) const;

  DiscriminatorConfig config_;
  ParamStore params_;
};

// Scores must be 1 x 1 nodes on one tape; both lists nonempty.
Var disc_loss(const std::vector<Var>& real_scores,
              const std::vector<Var>& fake_scores, DiscLossMode mode);

}  // namespace titlegan

#endif  // TITLEGAN_DISCRIMINATOR_H_
