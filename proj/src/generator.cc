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

#include "generator.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.h"

namespace titlegan {

void GeneratorConfig::validate() const {
  if (vocab_size <= static_cast<std::size_t>(kNumReserved)) {
    throw ConfigError("generator: vocabulary must hold at least one token "
                      "beyond the reserved ones");
  }
  if (embed_dim == 0 || hidden_dim == 0 || attn_dim == 0 || image_dim == 0) {
    throw ConfigError("generator: dimensions must be positive");
  }
  for (TokenId id : blocked_outputs) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_size) {
      throw ConfigError("generator: blocked output id " + std::to_string(id) +
                        " outside vocabulary");
    }
  }
}

Generator::Generator(GeneratorConfig config, std::uint64_t seed)
    : config_(std::move(config)) {
  config_.validate();
  const std::size_t v = config_.vocab_size;
  const std::size_t d = config_.embed_dim;
  const std::size_t h = config_.hidden_dim;
  const std::size_t a = config_.attn_dim;
  const std::size_t z = config_.image_dim;

  Rng rng(seed);
  params_.add_uniform("gen/embed", v, d, d, rng);
  add_lstm_params(params_, "gen/enc_lstm", d, h, rng);
  add_dense_params(params_, "gen/attr_fc1", d, h, rng);
  add_dense_params(params_, "gen/attr_fc2", h, h, rng);
  add_dense_params(params_, "gen/image", z, h, rng);
  params_.add_uniform("gen/align_h_w", h, a, 2 * h, rng);
  params_.add_uniform("gen/align_o_w", h, a, 2 * h, rng);
  params_.add_uniform("gen/align_b", 1, a, 2 * h, rng);
  params_.add_uniform("gen/align_v", a, 1, a, rng);
  add_dense_params(params_, "gen/fuse", 3 * h, h, rng);
  add_lstm_params(params_, "gen/dec_lstm", d + h, h, rng);
  add_dense_params(params_, "gen/out", h, v, rng);

  output_mask_.assign(v, true);
  output_mask_[kPadId] = false;
  output_mask_[kBosId] = false;
  for (TokenId id : config_.blocked_outputs) {
    output_mask_[static_cast<std::size_t>(id)] = false;
  }
  if (std::none_of(output_mask_.begin(), output_mask_.end(),
                   [](bool b) { return b; })) {
    throw ConfigError("generator: every output token is blocked");
  }
}

template <typename Binder>
GeneratorGraph Generator::bind_with(Binder&& p) const {
  GeneratorGraph g;
  g.embed = p("gen/embed");
  g.encoder = {p("gen/enc_lstm_w"), p("gen/enc_lstm_b")};
  g.attr_fc1_w = p("gen/attr_fc1_w");
  g.attr_fc1_b = p("gen/attr_fc1_b");
  g.attr_fc2_w = p("gen/attr_fc2_w");
  g.attr_fc2_b = p("gen/attr_fc2_b");
  g.image_w = p("gen/image_w");
  g.image_b = p("gen/image_b");
  g.align_h_w = p("gen/align_h_w");
  g.align_o_w = p("gen/align_o_w");
  g.align_b = p("gen/align_b");
  g.align_v = p("gen/align_v");
  g.fuse_w = p("gen/fuse_w");
  g.fuse_b = p("gen/fuse_b");
  g.decoder = {p("gen/dec_lstm_w"), p("gen/dec_lstm_b")};
  g.out_w = p("gen/out_w");
  g.out_b = p("gen/out_b");
  return g;
}

GeneratorGraph Generator::bind(Tape& tape) {
  return bind_with(
      [&](const char* name) { return tape.param(params_, name); });
}

GeneratorGraph Generator::bind_frozen(Tape& tape) const {
  return bind_with(
      [&](const char* name) { return tape.constant(params_.value(name)); });
}

void Generator::check_inputs(const GeneratorInputs& inputs) const {
  if (inputs.title.empty()) {
    throw ContractError("generator: empty long title");
  }
  auto check_ids = [this](const std::vector<TokenId>& ids, const char* what) {
    for (TokenId id : ids) {
      if (id < 0 || static_cast<std::size_t>(id) >= config_.vocab_size) {
        throw IndexError(std::string("generator: ") + what + " token id " +
                         std::to_string(id) + " outside vocabulary of size " +
                         std::to_string(config_.vocab_size));
      }
    }
  };
  check_ids(inputs.title, "title");
  check_ids(inputs.attrs, "attribute");
  if (inputs.image.size() != config_.image_dim) {
    throw DimensionError("generator: image features have length " +
                         std::to_string(inputs.image.size()) + ", expected " +
                         std::to_string(config_.image_dim));
  }
}

Var Generator::encode_title(const GeneratorGraph& g,
                            std::span<const TokenId> title,
                            LstmState* final_state) const {
  if (title.empty()) throw ContractError("encode_title: empty title");
  Tape& tape = *g.embed.tape();
  Var embedded = lookup(g.embed, title);
  LstmState state = zero_lstm_state(tape, config_.hidden_dim);
  std::vector<Var> states;
  states.reserve(title.size());
  for (std::size_t k = 0; k < title.size(); ++k) {
    state = lstm_cell(g.encoder, row_of(embedded, k), state);
    states.push_back(state.h);
  }
  if (final_state != nullptr) *final_state = state;
  return concat(states, 0);
}

Var Generator::encode_attrs(const GeneratorGraph& g,
                            std::span<const TokenId> attrs) const {
  Tape& tape = *g.embed.tape();
  if (!config_.use_attrs) return tape.constant(Tensor(1, config_.hidden_dim));
  Var pooled = attrs.empty() ? tape.constant(Tensor(1, config_.embed_dim))
                             : mean_rows(lookup(g.embed, attrs));
  Var hidden = tanh(dense(pooled, g.attr_fc1_w, g.attr_fc1_b));
  return dense(hidden, g.attr_fc2_w, g.attr_fc2_b);
}

Var Generator::project_image(const GeneratorGraph& g,
                             std::span<const double> features) const {
  if (features.size() != config_.image_dim) {
    throw DimensionError("project_image: expected " +
                         std::to_string(config_.image_dim) +
                         " features, got " + std::to_string(features.size()));
  }
  Tape& tape = *g.embed.tape();
  if (!config_.use_image) return tape.constant(Tensor(1, config_.hidden_dim));
  Var raw = tape.constant(Tensor::row(features));
  return tanh(dense(raw, g.image_w, g.image_b));
}

EncoderOutput Generator::encode(const GeneratorGraph& g,
                                const GeneratorInputs& inputs) const {
  check_inputs(inputs);
  EncoderOutput enc;
  enc.states = encode_title(g, inputs.title, &enc.final_state);
  enc.attrs = encode_attrs(g, inputs.attrs);
  enc.image = project_image(g, inputs.image);
  enc.keys = matmul(enc.states, g.align_o_w);
  return enc;
}

Generator::Attention Generator::attend(const GeneratorGraph& g, Var h_prev,
                                       const EncoderOutput& enc) const {
  const std::size_t k = enc.states.rows();
  if (k == 0) throw ContractError("attend: no encoder states");
  Var query = add(matmul(h_prev, g.align_h_w), g.align_b);
  Var scores = matmul(tanh(add_bias(enc.keys, query)), g.align_v);
  Var weights = softmax(reshape(scores, 1, k), 1);
  return {matmul(weights, enc.states), weights};
}

Var Generator::fuse(const GeneratorGraph& g, Var context, Var image,
                    Var attrs) const {
  const std::size_t h = config_.hidden_dim;
  for (Var v : {context, image, attrs}) {
    if (v.rows() != 1 || v.cols() != h) {
      throw DimensionError("fuse: expected 1x" + std::to_string(h) +
                           " inputs, got " + v.value().shape_string());
    }
  }
  return tanh(dense(concat({context, image, attrs}, 1), g.fuse_w, g.fuse_b));
}

DecoderState Generator::initial_state(const EncoderOutput& enc) const {
  return {enc.final_state, 0};
}

StepOutput Generator::decode_step(const GeneratorGraph& g,
                                  const EncoderOutput& enc,
                                  const DecoderState& state,
                                  TokenId prev_token) const {
  if (prev_token < 0 ||
      static_cast<std::size_t>(prev_token) >= config_.vocab_size) {
    throw IndexError("decode_step: token id " + std::to_string(prev_token) +
                     " outside vocabulary of size " +
                     std::to_string(config_.vocab_size));
  }
  StepOutput out;
  const Attention att = attend(g, state.lstm.h, enc);
  out.attention = att.weights;
  out.context = att.context;
  out.fused = fuse(g, att.context, enc.image, enc.attrs);
  const TokenId prev[] = {prev_token};
  Var input = concat({lookup(g.embed, prev), out.fused}, 1);
  out.state.lstm = lstm_cell(g.decoder, input, state.lstm);
  out.state.step = state.step + 1;
  out.logits = dense(out.state.lstm.h, g.out_w, g.out_b);
  out.probs = masked_softmax(out.logits, output_mask_);
  return out;
}

std::vector<Var> Generator::action_logprobs(
    const GeneratorGraph& g, const GeneratorInputs& inputs,
    std::span<const TokenId> actions) const {
  const EncoderOutput enc = encode(g, inputs);
  DecoderState state = initial_state(enc);
  TokenId prev = kBosId;
  std::vector<Var> out;
  out.reserve(actions.size());
  for (TokenId a : actions) {
    if (a < 0 || static_cast<std::size_t>(a) >= config_.vocab_size) {
      throw IndexError("action_logprobs: token id " + std::to_string(a) +
                       " outside vocabulary");
    }
    StepOutput step = decode_step(g, enc, state, prev);
    out.push_back(log_softmax_at(step.logits, output_mask_,
                                 static_cast<std::size_t>(a)));
    state = step.state;
    prev = a;
  }
  return out;
}

TokenId choose_token(const Tensor& probs, DecodeStrategy strategy,
                     double temperature, Rng& rng) {
  if (strategy == DecodeStrategy::kGreedy) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
      if (probs[i] > probs[best]) best = i;
    }
    return static_cast<TokenId>(best);
  }
  if (!(temperature > 0.0)) {
    throw ConfigError("sampling temperature must be positive");
  }
  std::vector<double> weights(probs.size(), 0.0);
  if (temperature == 1.0) {
    for (std::size_t i = 0; i < probs.size(); ++i) weights[i] = probs[i];
  } else {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] > 0.0) mx = std::max(mx, std::log(probs[i]) / temperature);
    }
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] > 0.0) {
        weights[i] = std::exp(std::log(probs[i]) / temperature - mx);
      }
    }
  }
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last = i;
    if (u < acc) return static_cast<TokenId>(i);
  }
  return static_cast<TokenId>(last);
}

std::vector<TokenId> Generator::generate(const GeneratorInputs& inputs,
                                         const DecodeOptions& options) const {
  if (options.max_len == 0) throw ConfigError("generate: max_len must be >= 1");
  Tape tape(Tape::Mode::kNoGrad);
  const GeneratorGraph g = bind_frozen(tape);
  const EncoderOutput enc = encode(g, inputs);
  Rng rng(options.seed);
  DecoderState state = initial_state(enc);
  TokenId prev = kBosId;
  std::vector<TokenId> out;
  while (out.size() < options.max_len) {
    StepOutput step = decode_step(g, enc, state, prev);
    const TokenId next = choose_token(step.probs.value(), options.strategy,
                                      options.temperature, rng);
    if (next == kEosId) break;
    out.push_back(next);
    state = step.state;
    prev = next;
  }
  return out;
}

SequenceLogProb Generator::sequence_logprob(
    const GeneratorInputs& inputs, std::span<const TokenId> title) const {
  if (title.empty()) throw ContractError("sequence_logprob: empty title");
  std::vector<TokenId> actions(title.begin(), title.end());
  actions.push_back(kEosId);
  Tape tape(Tape::Mode::kNoGrad);
  const GeneratorGraph g = bind_frozen(tape);
  SequenceLogProb out;
  for (Var lp : action_logprobs(g, inputs, actions)) {
    out.per_step.push_back(lp.value()[0]);
    out.total += lp.value()[0];
  }
  return out;
}

std::vector<std::vector<TokenId>> Generator::rollouts(
    const GeneratorInputs& inputs, std::span<const TokenId> prefix,
    std::size_t n_rollouts, std::size_t max_len, std::uint64_t seed,
    double temperature) const {
  Tape tape(Tape::Mode::kNoGrad);
  const GeneratorGraph g = bind_frozen(tape);
  const EncoderOutput enc = encode(g, inputs);
  DecoderState state = initial_state(enc);
  TokenId prev = kBosId;
  // Advance through the prefix once; every rollout branches from here.
  for (TokenId t : prefix) {
    state = decode_step(g, enc, state, prev).state;
    prev = t;
  }
  std::vector<std::vector<TokenId>> out;
  out.reserve(n_rollouts);
  for (std::size_t n = 0; n < n_rollouts; ++n) {
    std::vector<TokenId> seq(prefix.begin(), prefix.end());
    Rng rng(derive_seed(seed, n));
    DecoderState s = state;
    TokenId p = prev;
    while (seq.size() < max_len) {
      StepOutput step = decode_step(g, enc, s, p);
      const TokenId next = choose_token(step.probs.value(),
                                        DecodeStrategy::kSample, temperature,
                                        rng);
      if (next == kEosId) break;
      seq.push_back(next);
      s = step.state;
      p = next;
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace titlegan
