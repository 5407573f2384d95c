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

#include <cmath>

#include "doctest.h"
#include "errors.h"
#include "generator.h"
#include "nn.h"
#include "support/gradcheck.h"

using namespace titlegan;

namespace {

// Tokens 4.. are "w0", "w1", ...
GeneratorConfig small_config(std::size_t words = 6) {
  GeneratorConfig c;
  c.vocab_size = kNumReserved + words;
  c.embed_dim = 5;
  c.hidden_dim = 4;
  c.attn_dim = 3;
  c.image_dim = 3;
  return c;
}

GeneratorInputs small_inputs() {
  GeneratorInputs in;
  in.title = {4, 7, 5, 9, 6};
  in.attrs = {8, 4};
  in.image = {0.3, -0.7, 1.1};
  return in;
}


}  // namespace

TEST_CASE("lstm cell with zero weights stays at zero") {
  Tape tape;
  LstmWeights w{tape.constant(Tensor(5, 12)), tape.constant(Tensor(1, 12))};
  LstmState s = zero_lstm_state(tape, 3);
  s = lstm_cell(w, tape.constant(Tensor::row({1.0, -2.0})), s);
  CHECK(s.h.value().bit_equal(Tensor(1, 3)));
  CHECK(s.c.value().bit_equal(Tensor(1, 3)));
}

TEST_CASE("scalar lstm matches the gate equations") {
  // [x; h] is 1 x 2, gates i, f, o, g.
  const double wi[2] = {0.5, -0.3}, wf[2] = {0.2, 0.4}, wo[2] = {-0.6, 0.1},
               wg[2] = {0.9, 0.7};
  const double b[4] = {0.1, -0.2, 0.05, 0.3};
  Tape tape;
  Tensor w(2, 4);
  for (int r = 0; r < 2; ++r) {
    w(r, 0) = wi[r];
    w(r, 1) = wf[r];
    w(r, 2) = wo[r];
    w(r, 3) = wg[r];
  }
  LstmWeights lw{tape.constant(w), tape.constant(Tensor::row({b[0], b[1], b[2], b[3]}))};
  const double x = 0.8, h = -0.4, c = 0.25;
  LstmState s{tape.constant(Tensor::scalar(h)), tape.constant(Tensor::scalar(c))};
  s = lstm_cell(lw, tape.constant(Tensor::scalar(x)), s);
  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  const double i = sig(x * wi[0] + h * wi[1] + b[0]);
  const double f = sig(x * wf[0] + h * wf[1] + b[1]);
  const double o = sig(x * wo[0] + h * wo[1] + b[2]);
  const double g = std::tanh(x * wg[0] + h * wg[1] + b[3]);
  const double c2 = f * c + i * g;
  CHECK(s.c.value()[0] == doctest::Approx(c2).epsilon(1e-14));
  CHECK(s.h.value()[0] == doctest::Approx(o * std::tanh(c2)).epsilon(1e-14));
  CHECK_THROWS_AS(lstm_cell(lw, tape.constant(Tensor::row({1, 2})), s),
                  DimensionError);
}

TEST_CASE("lstm cell gradient check") {
  ParamStore store;
  Rng rng(4);
  add_lstm_params(store, "l", 3, 2, rng);
  const auto report = testing::check_param_gradients(
      store,
      [&](Tape& tape) {
        LstmWeights w = bind_lstm(tape, store, "l");
        LstmState s = zero_lstm_state(tape, 2);
        s = lstm_cell(w, tape.constant(Tensor::row({0.5, -1.0, 0.25})), s);
        s = lstm_cell(w, tape.constant(Tensor::row({-0.3, 0.2, 0.9})), s);
        return sum(s.h);
      },
      0, 1);
  CAPTURE(report.worst);
  CHECK(report.ok());
}

TEST_CASE("encoder fixtures") {
  Generator gen(small_config(), 3);
  Tape tape;
  const GeneratorGraph g = gen.bind_frozen(tape);
  const TokenId one[] = {5};
  LstmState final_state;
  Var o = gen.encode_title(g, one, &final_state);
  REQUIRE(o.rows() == 1);
  LstmState manual = lstm_cell(g.encoder, row_of(lookup(g.embed, one), 0),
                               zero_lstm_state(tape, 4));
  CHECK(o.value().bit_equal(manual.h.value()));
  CHECK(final_state.c.value().bit_equal(manual.c.value()));

  const GeneratorInputs in = small_inputs();
  const EncoderOutput enc = gen.encode(g, in);
  CHECK(enc.states.rows() == in.title.size());
  CHECK(enc.states.cols() == 4);
  CHECK(enc.attrs.cols() == 4);
  CHECK(enc.image.cols() == 4);
  CHECK(enc.states.value().all_finite());
}

TEST_CASE("zero embedding table gives the zero-input trajectory") {
  Generator gen(small_config(), 3);
  gen.params().mutable_value("gen/embed").fill(0.0);
  Tape tape;
  const GeneratorGraph g = gen.bind_frozen(tape);
  const TokenId a[] = {4, 5, 6};
  const TokenId b[] = {9, 9, 7};
  CHECK(gen.encode_title(g, a).value().bit_equal(gen.encode_title(g, b).value()));
}

TEST_CASE("attribute encoder pooling") {
  Generator gen(small_config(), 5);
  Tape tape;
  const GeneratorGraph g = gen.bind_frozen(tape);
  const TokenId one[] = {6};
  const TokenId twice[] = {6, 6};
  CHECK(gen.encode_attrs(g, one).value().bit_equal(
      gen.encode_attrs(g, twice).value()));

  Var zero = tape.constant(Tensor(1, 5));
  const Tensor f1_zero =
      dense(tanh(dense(zero, g.attr_fc1_w, g.attr_fc1_b)), g.attr_fc2_w,
            g.attr_fc2_b)
          .value();
  CHECK(gen.encode_attrs(g, std::vector<TokenId>{}).value().bit_equal(f1_zero));

  const TokenId pair[] = {4, 7};
  const TokenId single_a[] = {4};
  const TokenId single_b[] = {7};
  Var avg = scale(add(lookup(g.embed, single_a), lookup(g.embed, single_b)), 0.5);
  const Tensor want =
      dense(tanh(dense(avg, g.attr_fc1_w, g.attr_fc1_b)), g.attr_fc2_w,
            g.attr_fc2_b)
          .value();
  const Tensor got = gen.encode_attrs(g, pair).value();
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
  }
}

TEST_CASE("image projection fixtures") {
  GeneratorConfig cfg = small_config();
  cfg.image_dim = 2;
  cfg.hidden_dim = 2;
  Generator gen(cfg, 1);
  gen.params().mutable_value("gen/image_b").fill(0.0);
  {
    Tape tape;
    const double zeros[] = {0.0, 0.0};
    CHECK(gen.project_image(gen.bind_frozen(tape), zeros)
              .value()
              .bit_equal(Tensor(1, 2)));
  }
  gen.params().mutable_value("gen/image_w") = Tensor::from_rows({{1, 0}, {0, 2}});
  Tape tape;
  const double feats[] = {0.5, -0.25};
  const Tensor v = gen.project_image(gen.bind_frozen(tape), feats).value();
  CHECK(v[0] == doctest::Approx(std::tanh(0.5)));
  CHECK(v[1] == doctest::Approx(std::tanh(-0.5)));
  const double wrong[] = {1.0};
  CHECK_THROWS_AS(gen.project_image(gen.bind_frozen(tape), wrong),
                  DimensionError);
}

TEST_CASE("attention fixtures") {
  GeneratorConfig cfg = small_config();
  cfg.attn_dim = 1;
  Generator gen(cfg, 2);
  Tape tape;
  GeneratorGraph g = gen.bind_frozen(tape);
  Var h = tape.constant(Tensor::row({0.1, 0.2, -0.3, 0.4}));

  EncoderOutput single;
  single.states = tape.constant(Tensor::from_rows({{1, 2, 3, 4}}));
  single.keys = matmul(single.states, g.align_o_w);
  auto att = gen.attend(g, h, single);
  CHECK(att.weights.value()[0] == 1.0);
  CHECK(att.context.value().bit_equal(single.states.value()));

  EncoderOutput same;
  same.states = tape.constant(Tensor::from_rows({{1, -2, 3, 0.5}, {1, -2, 3, 0.5}, {1, -2, 3, 0.5}}));
  same.keys = tape.constant(Tensor::from_rows({{0.1}, {-0.9}, {0.4}}));
  att = gen.attend(g, h, same);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(att.context.value()[i] == doctest::Approx(same.states.value()(0, i)));
  }

  // Scores v * tanh(key) with zero query = [ln 1, ln 3].
  g.align_h_w = tape.constant(Tensor(4, 1));
  g.align_b = tape.constant(Tensor(1, 1));
  g.align_v = tape.constant(Tensor::scalar(2.0));
  EncoderOutput two;
  two.states = tape.constant(Tensor::from_rows({{1, 0, 0, 0}, {0, 1, 0, 0}}));
  two.keys = tape.constant(Tensor::from_rows({{0.0}, {std::atanh(std::log(3.0) / 2.0)}}));
  att = gen.attend(g, h, two);
  CHECK(att.weights.value()[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(att.weights.value()[1] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("fusion fixtures") {
  GeneratorConfig cfg = small_config();
  cfg.hidden_dim = 1;
  Generator gen(cfg, 2);
  gen.params().mutable_value("gen/fuse_b").fill(0.0);
  Tape tape;
  const GeneratorGraph g = gen.bind_frozen(tape);
  Var z = tape.constant(Tensor::scalar(0.0));
  CHECK(gen.fuse(g, z, z, z).value()[0] == 0.0);

  gen.params().mutable_value("gen/fuse_w") = Tensor::from_rows({{0.5}, {-1.0}, {2.0}});
  gen.params().mutable_value("gen/fuse_b") = Tensor::scalar(0.1);
  Tape t2;
  const GeneratorGraph g2 = gen.bind_frozen(t2);
  const double got = gen.fuse(g2, t2.constant(Tensor::scalar(0.2)),
                              t2.constant(Tensor::scalar(0.3)),
                              t2.constant(Tensor::scalar(-0.4)))
                         .value()[0];
  CHECK(got == doctest::Approx(std::tanh(0.5 * 0.2 - 0.3 - 0.8 + 0.1)));
  CHECK_THROWS_AS(gen.fuse(g2, t2.constant(Tensor(1, 2)), z, z), DimensionError);
}

TEST_CASE("decode step invariants") {
  Generator gen(small_config(), 11);
  const GeneratorInputs in = small_inputs();
  Tape tape(Tape::Mode::kNoGrad);
  const GeneratorGraph g = gen.bind_frozen(tape);
  const EncoderOutput enc = gen.encode(g, in);
  DecoderState state = gen.initial_state(enc);
  TokenId prev = kBosId;
  const Tensor& states = enc.states.value();
  for (int t = 0; t < 6; ++t) {
    const StepOutput a = gen.decode_step(g, enc, state, prev);
    const StepOutput b = gen.decode_step(g, enc, state, prev);
    CHECK(a.probs.value().bit_equal(b.probs.value()));
    const Tensor& p = a.probs.value();
    double total = 0.0;
    for (double v : p.values()) {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);
    CHECK(p[kPadId] == 0.0);
    CHECK(p[kBosId] == 0.0);
    const Tensor& alpha = a.attention.value();
    double alpha_total = 0.0;
    for (double v : alpha.values()) {
      CHECK(v >= 0.0);
      alpha_total += v;
    }
    CHECK(std::abs(alpha_total - 1.0) <= 1e-9);
    for (std::size_t j = 0; j < states.cols(); ++j) {
      double lo = states(0, j), hi = states(0, j);
      for (std::size_t k = 1; k < states.rows(); ++k) {
        lo = std::min(lo, states(k, j));
        hi = std::max(hi, states(k, j));
      }
      CHECK(a.context.value()[j] >= lo - 1e-12);
      CHECK(a.context.value()[j] <= hi + 1e-12);
    }
    state = a.state;
    prev = static_cast<TokenId>(4 + t % 6);
  }
  CHECK_THROWS_AS(gen.decode_step(g, enc, state, 99), IndexError);
}

TEST_CASE("decoding determinism and rigged outputs") {
  Generator gen(small_config(), 12);
  const GeneratorInputs in = small_inputs();
  DecodeOptions greedy;
  CHECK(gen.generate(in, greedy) == gen.generate(in, greedy));
  DecodeOptions sample;
  sample.strategy = DecodeStrategy::kSample;
  sample.seed = 77;
  CHECK(gen.generate(in, sample) == gen.generate(in, sample));
  for (TokenId t : gen.generate(in, sample)) {
    CHECK(t != kPadId);
    CHECK(t != kBosId);
    CHECK(t != kEosId);
  }
  CHECK(gen.generate(in, greedy).size() <= greedy.max_len);

  gen.params().mutable_value("gen/out_w").fill(0.0);
  Tensor& bias = gen.params().mutable_value("gen/out_b");
  bias.fill(0.0);
  bias[kEosId] = 50.0;
  CHECK(gen.generate(in, greedy).empty());
  CHECK(gen.generate(in, sample).empty());

  bias.fill(0.0);
  bias[7] = 50.0;
  greedy.max_len = 4;
  CHECK(gen.generate(in, greedy) == std::vector<TokenId>{7, 7, 7, 7});
}

TEST_CASE("greedy ties break toward the lowest id") {
  Tensor p = Tensor::row({0.0, 0.0, 0.25, 0.25, 0.5, 0.0});
  Rng rng(1);
  CHECK(choose_token(p, DecodeStrategy::kGreedy, 1.0, rng) == 4);
  p = Tensor::row({0.0, 0.0, 0.4, 0.2, 0.4});
  CHECK(choose_token(p, DecodeStrategy::kGreedy, 1.0, rng) == 2);
  CHECK_THROWS_AS(choose_token(p, DecodeStrategy::kSample, 0.0, rng),
                  ConfigError);
}

TEST_CASE("uniform policy log-probability") {
  GeneratorConfig cfg = small_config(1);
  cfg.blocked_outputs = {kUnkId};
  Generator gen(cfg, 1);
  gen.params().mutable_value("gen/out_w").fill(0.0);
  gen.params().mutable_value("gen/out_b").fill(0.0);
  GeneratorInputs in;
  in.title = {4, 4};
  in.image = {0.0, 0.0, 0.0};
  const std::vector<TokenId> s{4, 4, 4};
  const SequenceLogProb lp = gen.sequence_logprob(in, s);
  CHECK(lp.per_step.size() == s.size() + 1);
  CHECK(lp.total == doctest::Approx(4 * std::log(0.5)).epsilon(1e-14));
}

TEST_CASE("rollouts") {
  Generator gen(small_config(), 13);
  const GeneratorInputs in = small_inputs();
  const std::vector<TokenId> prefix{5, 6, 7};
  const auto full = gen.rollouts(in, prefix, 4, 3, 9);
  REQUIRE(full.size() == 4);
  for (const auto& c : full) CHECK(c == prefix);
  CHECK(gen.rollouts(in, prefix, 1, 10, 9).size() == 1);
  const auto a = gen.rollouts(in, prefix, 5, 10, 21);
  CHECK(a == gen.rollouts(in, prefix, 5, 10, 21));
  for (const auto& c : a) {
    CHECK(c.size() <= 10);
    CHECK(std::equal(prefix.begin(), prefix.end(), c.begin()));
  }
}

TEST_CASE("input validation") {
  Generator gen(small_config(), 1);
  GeneratorInputs in = small_inputs();
  in.title.clear();
  CHECK_THROWS_AS(gen.generate(in, {}), ContractError);
  in = small_inputs();
  in.attrs.push_back(100);
  CHECK_THROWS_AS(gen.generate(in, {}), IndexError);
  in = small_inputs();
  in.image.pop_back();
  CHECK_THROWS_AS(gen.generate(in, {}), DimensionError);

  GeneratorConfig bad = small_config();
  bad.blocked_outputs = {kEosId, kUnkId, 4, 5, 6, 7, 8, 9};
  CHECK_THROWS_AS(Generator(bad, 1), ConfigError);
  bad = small_config();
  bad.hidden_dim = 0;
  CHECK_THROWS_AS(Generator(bad, 1), ConfigError);
}

TEST_CASE("ablation switches zero the modality vectors") {
  GeneratorConfig cfg = small_config();
  cfg.use_attrs = false;
  cfg.use_image = false;
  Generator gen(cfg, 3);
  GeneratorInputs a = small_inputs();
  GeneratorInputs b = a;
  b.attrs = {9};
  b.image = {5.0, 5.0, -5.0};
  Tape tape(Tape::Mode::kNoGrad);
  const GeneratorGraph g = gen.bind_frozen(tape);
  const EncoderOutput enc = gen.encode(g, a);
  CHECK(enc.attrs.value().bit_equal(Tensor(1, 4)));
  CHECK(enc.image.value().bit_equal(Tensor(1, 4)));
  const std::vector<TokenId> s{4, 5};
  CHECK(gen.sequence_logprob(a, s).total == gen.sequence_logprob(b, s).total);
}

TEST_CASE("attribute and image parameters receive gradient") {
  Generator gen(small_config(), 3);
  const GeneratorInputs in = small_inputs();
  const std::vector<TokenId> actions{5, 6, kEosId};
  gen.params().zero_grad();
  Tape tape;
  const GeneratorGraph g = gen.bind(tape);
  tape.backward(neg(sum(concat(gen.action_logprobs(g, in, actions), 1))));
  for (const char* name : {"gen/attr_fc1_w", "gen/attr_fc2_w", "gen/image_w"}) {
    double norm = 0.0;
    for (double v : gen.params().at(name).grad.values()) norm += v * v;
    CAPTURE(name);
    CHECK(norm > 0.0);
  }
  GeneratorInputs other = in;
  other.attrs = {9};
  CHECK(gen.sequence_logprob(in, std::vector<TokenId>{5, 6}).total !=
        gen.sequence_logprob(other, std::vector<TokenId>{5, 6}).total);
}

TEST_CASE("generator gradient check over every parameter group") {
  Generator gen(small_config(), 21);
  testing::redraw_uniform(gen.params(), 1.0, 21);
  const GeneratorInputs in = small_inputs();
  const std::vector<TokenId> actions{7, 4, 9, kEosId};
  const auto report = testing::check_param_gradients(
      gen.params(),
      [&](Tape& tape) {
        const GeneratorGraph g = gen.bind(tape);
        return sum(concat(gen.action_logprobs(g, in, actions), 1));
      },
      12, 5);
  CAPTURE(report.worst);
  CHECK(report.ok());
  CHECK(report.checked >= 17 * 3);
}
