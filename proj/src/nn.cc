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

#include "nn.h"

#include "errors.h"

namespace titlegan {

LstmState zero_lstm_state(Tape& tape, std::size_t hidden) {
  return {tape.constant(Tensor(1, hidden)), tape.constant(Tensor(1, hidden))};
}

LstmState lstm_cell(const LstmWeights& w, Var x, const LstmState& state) {
  const std::size_t hidden = state.h.cols();
  const Tensor& wv = w.weight.value();
  if (x.rows() != 1 || wv.rows() != x.cols() + hidden ||
      wv.cols() != 4 * hidden) {
    throw DimensionError("lstm_cell: input " + x.value().shape_string() +
                         " with hidden " + std::to_string(hidden) +
                         " does not fit weight " + wv.shape_string());
  }
  Var gates = dense(concat({x, state.h}, 1), w.weight, w.bias);
  Var i = sigmoid(slice_cols(gates, 0, hidden));
  Var f = sigmoid(slice_cols(gates, hidden, hidden));
  Var o = sigmoid(slice_cols(gates, 2 * hidden, hidden));
  Var g = tanh(slice_cols(gates, 3 * hidden, hidden));
  Var c = add(mul(f, state.c), mul(i, g));
  Var h = mul(o, tanh(c));
  return {h, c};
}

Var dense(Var x, Var weight, Var bias) {
  return add_bias(matmul(x, weight), bias);
}

void add_lstm_params(ParamStore& store, const std::string& prefix,
                     std::size_t input, std::size_t hidden, Rng& rng) {
  const std::size_t fan_in = input + hidden;
  store.add_uniform(prefix + "_w", fan_in, 4 * hidden, fan_in, rng);
  store.add_uniform(prefix + "_b", 1, 4 * hidden, fan_in, rng);
}

LstmWeights bind_lstm(Tape& tape, ParamStore& store,
                      const std::string& prefix) {
  return {tape.param(store, prefix + "_w"), tape.param(store, prefix + "_b")};
}

void add_dense_params(ParamStore& store, const std::string& prefix,
                      std::size_t in, std::size_t out, Rng& rng) {
  store.add_uniform(prefix + "_w", in, out, in, rng);
  store.add_uniform(prefix + "_b", 1, out, in, rng);
}

}  // namespace titlegan
