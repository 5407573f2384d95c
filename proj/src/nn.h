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

// Layer building blocks shared by the generator and the discriminator.

#ifndef TITLEGAN_NN_H_
#define TITLEGAN_NN_H_

#include <string>

#include "params.h"
#include "rng.h"
#include "tensor.h"

namespace titlegan {

struct LstmState {
  Var h;  // 1 x H
  Var c;  // 1 x H
};

struct LstmWeights {
  Var weight;  // (input + H) x 4H, gate blocks ordered i, f, o, g
  Var bias;    // 1 x 4H
};

LstmState zero_lstm_state(Tape& tape, std::size_t hidden);

// i, f, o = sigmoid(.), g = tanh(.) over [x; h] W + b;
// c' = f * c + i * g; h' = o * tanh(c').
LstmState lstm_cell(const LstmWeights& w, Var x, const LstmState& state);

// x W + b for x of shape m x in.
Var dense(Var x, Var weight, Var bias);

// Registers "<prefix>_w" ((input + hidden) x 4 hidden) and "<prefix>_b".
void add_lstm_params(ParamStore& store, const std::string& prefix,
                     std::size_t input, std::size_t hidden, Rng& rng);
LstmWeights bind_lstm(Tape& tape, ParamStore& store, const std::string& prefix);

// Registers "<prefix>_w" (in x out) and "<prefix>_b" (1 x out).
void add_dense_params(ParamStore& store, const std::string& prefix,
                      std::size_t in, std::size_t out, Rng& rng);

}  // namespace titlegan

#endif  // TITLEGAN_NN_H_
