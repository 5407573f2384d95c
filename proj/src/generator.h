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

// Multi-modal short-title generator.
//
// The encoder reads three views of a product:
//   O  title states, one LSTM hidden state per long-title token   (K x H)
//   U  attribute vector, mean-pooled tag embeddings through a
//      two-layer tanh MLP                                         (1 x H)
//   V  image vector, tanh of a dense projection of raw features   (1 x H)
//
// At every decoder step t the previous hidden state scores each title state
// with a concat scorer a(h, o_k) = v^T tanh(h W_h + o_k W_o + b); the softmax
// of those scores weights the title states into a context c_t. The fused
// vector C_t = tanh([c_t; V; U] W + b) is concatenated with the embedding of
// the previous token and fed to the decoder LSTM, whose hidden state is
// projected onto the vocabulary. PAD and BOS are never generated.

#ifndef TITLEGAN_GENERATOR_H_
#define TITLEGAN_GENERATOR_H_

#include <cstdint>
#include <memory>
#include <vector>

#include "corpus.h"
#include "nn.h"
#include "params.h"
#include "tensor.h"

namespace titlegan {

struct GeneratorConfig {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 32;
  std::size_t hidden_dim = 32;
  std::size_t attn_dim = 32;
  std::size_t image_dim = 16;
  // Ablation switches: a disabled modality contributes a zero vector.
  bool use_attrs = true;
  bool use_image = true;
  // Tokens that may never be generated, in addition to PAD and BOS.
  std::vector<TokenId> blocked_outputs;

  void validate() const;
};

struct GeneratorInputs {
  std::vector<TokenId> title;
  std::vector<TokenId> attrs;
  std::vector<double> image;
};

struct EncoderOutput {
  Var states;  // O, K x H
  Var attrs;   // U, 1 x H
  Var image;   // V, 1 x H
  Var keys;    // O W_o, K x A; precomputed half of the alignment scorer
  LstmState final_state;
};

struct DecoderState {
  LstmState lstm;
  std::size_t step = 0;
};

struct StepOutput {
  DecoderState state;
  Var logits;     // 1 x vocab
  Var probs;      // 1 x vocab, PAD and BOS exactly 0
  Var attention;  // 1 x K
  Var context;    // 1 x H
  Var fused;      // C_t, 1 x H
};

// Parameter handles bound to one tape.
struct GeneratorGraph {
  Var embed;
  LstmWeights encoder;
  Var attr_fc1_w, attr_fc1_b, attr_fc2_w, attr_fc2_b;
  Var image_w, image_b;
  Var align_h_w, align_o_w, align_b, align_v;
  Var fuse_w, fuse_b;
  LstmWeights decoder;
  Var out_w, out_b;
};

enum class DecodeStrategy { kGreedy, kSample };

struct DecodeOptions {
  DecodeStrategy strategy = DecodeStrategy::kGreedy;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  std::size_t max_len = 10;
};

struct SequenceLogProb {
  double total = 0.0;
  std::vector<double> per_step;
};

class Generator {
 public:
  // Parameters are drawn from Rng(seed); all names start with "gen/".
  Generator(GeneratorConfig config, std::uint64_t seed);

  const GeneratorConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  // allowed[id] is false for PAD, BOS and every blocked output.
  const std::vector<bool>& output_mask() const { return output_mask_; }

  // ---- graph construction -------------------------------------------------
  // Trainable handles whose gradients flow into params().
  GeneratorGraph bind(Tape& tape);
  // Constant copies of the current values.
  GeneratorGraph bind_frozen(Tape& tape) const;

  Var encode_title(const GeneratorGraph& g, std::span<const TokenId> title,
                   LstmState* final_state = nullptr) const;
  Var encode_attrs(const GeneratorGraph& g,
                   std::span<const TokenId> attrs) const;
  Var project_image(const GeneratorGraph& g,
                    std::span<const double> features) const;
  EncoderOutput encode(const GeneratorGraph& g,
                       const GeneratorInputs& inputs) const;

  struct Attention {
    Var context;  // 1 x H
    Var weights;  // 1 x K
  };
  Attention attend(const GeneratorGraph& g, Var h_prev,
                   const EncoderOutput& enc) const;
  Var fuse(const GeneratorGraph& g, Var context, Var image, Var attrs) const;

  DecoderState initial_state(const EncoderOutput& enc) const;
  StepOutput decode_step(const GeneratorGraph& g, const EncoderOutput& enc,
                         const DecoderState& state, TokenId prev_token) const;

  // Teacher-forced log pi(a_t | a_<t) for each action, starting from BOS.
  std::vector<Var> action_logprobs(const GeneratorGraph& g,
                                   const GeneratorInputs& inputs,
                                   std::span<const TokenId> actions) const;

  // ---- value-level API ----------------------------------------------------
  // Tokens between BOS and EOS (neither included). Stops at EOS or max_len.
  std::vector<TokenId> generate(const GeneratorInputs& inputs,
                                const DecodeOptions& options) const;

  // Teacher-forced score of title followed by EOS. per_step has
  // title.size() + 1 entries.
  SequenceLogProb sequence_logprob(const GeneratorInputs& inputs,
                                   std::span<const TokenId> title) const;

  // Continues `prefix` by sampling until EOS or until the sequence holds
  // max_len tokens, n_rollouts times. Rollout n draws from
  // Rng(derive_seed(seed, n)). Returned sequences include the prefix and
  // exclude EOS.
  std::vector<std::vector<TokenId>> rollouts(const GeneratorInputs& inputs,
                                             std::span<const TokenId> prefix,
                                             std::size_t n_rollouts,
                                             std::size_t max_len,
                                             std::uint64_t seed,
                                             double temperature = 1.0) const;

  void check_inputs(const GeneratorInputs& inputs) const;

 private:
  template <typename Binder>
  GeneratorGraph bind_with(Binder&& binder) const;

  GeneratorConfig config_;
  ParamStore params_;
  std::vector<bool> output_mask_;
};

// Chooses a token from a probability row: greedy takes the lowest id among
// the maxima; sampling rescales probabilities by 1/temperature in log space
// and inverts the CDF with one uniform draw.
TokenId choose_token(const Tensor& probs, DecodeStrategy strategy,
                     double temperature, Rng& rng);

}  // namespace titlegan

#endif  // TITLEGAN_GENERATOR_H_
