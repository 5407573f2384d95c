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

// Seeded random composite graphs over every tape operation, for gradient
// checks. The graph structure depends only on the seed, so the same builder
// can be replayed on perturbed leaf values.

#ifndef TITLEGAN_TESTS_RANDOM_GRAPH_H_
#define TITLEGAN_TESTS_RANDOM_GRAPH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "rng.h"
#include "tensor.h"

namespace titlegan::testing {

enum class GraphOp {
  kMatmul, kAdd, kSub, kMul, kNeg, kScale, kAddScalar, kAddBias, kTanh,
  kSigmoid, kExp, kLog, kClamp, kSoftmaxRows, kSoftmaxCols, kMaskedSoftmax,
  kLogSoftmaxAt, kConcatCols, kConcatRows, kSliceCols, kRowOf, kPick,
  kReshape, kTranspose, kLookup, kSum, kMean, kMeanRows,
};
inline constexpr int kGraphOpCount = 28;

struct RandomGraph {
  std::vector<Tensor> leaves;
  std::uint64_t seed = 0;
  std::vector<GraphOp> ops;  // filled by build()
};

inline Tensor random_tensor(std::size_t rows, std::size_t cols, Rng& rng,
                            double lo = -1.0, double hi = 1.0) {
  Tensor t(rows, cols);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

// Leaf shapes stay within 4 x 4, so every graph holds far fewer than 200
// input scalars.
inline RandomGraph make_random_graph(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0));
  RandomGraph g;
  g.seed = seed;
  const std::size_t n_leaves = 3;
  for (std::size_t i = 0; i < n_leaves; ++i) {
    g.leaves.push_back(
        random_tensor(2 + rng.below(3), 2 + rng.below(3), rng));
  }
  return g;
}

// Applies ops starting at `first_op` and cycling through the list, so a run
// of graphs with consecutive offsets covers all of them. Returns the loss
// sum_k sum(w_k * v_k) over every intermediate v_k, with fixed random w_k.
inline Var build_random_graph(Tape& tape, const std::vector<Var>& leaves,
                              std::uint64_t seed, int first_op, int n_ops,
                              std::vector<GraphOp>* trace = nullptr) {
  Rng rng(derive_seed(seed, 1));
  std::vector<Var> pool = leaves;
  auto pick_var = [&]() { return pool[rng.below(pool.size())]; };
  auto squash = [&](Var v) { return tanh(v); };
  for (int k = 0; k < n_ops; ++k) {
    const auto op = static_cast<GraphOp>((first_op + k) % kGraphOpCount);
    if (trace) trace->push_back(op);
    Var a = pick_var();
    Var out;
    switch (op) {
      case GraphOp::kMatmul: {
        Var b = tape.constant(random_tensor(a.cols(), 1 + rng.below(3), rng));
        for (const Var& v : pool) {
          if (v.rows() == a.cols() && v.id() != a.id()) b = v;
        }
        out = matmul(a, b);
        break;
      }
      case GraphOp::kAdd:
      case GraphOp::kSub:
      case GraphOp::kMul: {
        Var b = a;
        for (const Var& v : pool) {
          if (v.rows() == a.rows() && v.cols() == a.cols() && v.id() != a.id()) {
            b = v;
          }
        }
        out = op == GraphOp::kAdd ? add(a, b)
              : op == GraphOp::kSub ? sub(a, b)
                                    : mul(a, b);
        break;
      }
      case GraphOp::kNeg: out = neg(a); break;
      case GraphOp::kScale: out = scale(a, rng.uniform(-2.0, 2.0)); break;
      case GraphOp::kAddScalar: out = add_scalar(a, rng.uniform(-1.0, 1.0)); break;
      case GraphOp::kAddBias: {
        Var bias = tape.constant(random_tensor(1, a.cols(), rng));
        for (const Var& v : pool) {
          if (v.rows() == 1 && v.cols() == a.cols()) bias = v;
        }
        out = add_bias(a, bias);
        break;
      }
      case GraphOp::kTanh: out = tanh(a); break;
      case GraphOp::kSigmoid: out = sigmoid(a); break;
      case GraphOp::kExp: out = exp(squash(a)); break;
      case GraphOp::kLog: out = log(add_scalar(sigmoid(a), 0.1)); break;
      case GraphOp::kClamp: out = clamp(a, -0.5, 0.5); break;
      case GraphOp::kSoftmaxRows: out = softmax(a, 1); break;
      case GraphOp::kSoftmaxCols: out = softmax(a, 0); break;
      case GraphOp::kMaskedSoftmax:
      case GraphOp::kLogSoftmaxAt: {
        Var r = row_of(a, rng.below(a.rows()));
        std::vector<bool> allowed(r.cols(), true);
        allowed[rng.below(r.cols())] = false;
        std::size_t target = rng.below(r.cols());
        while (!allowed[target]) target = (target + 1) % r.cols();
        out = op == GraphOp::kMaskedSoftmax
                  ? masked_softmax(r, allowed)
                  : log_softmax_at(r, allowed, target);
        break;
      }
      case GraphOp::kConcatCols: {
        std::vector<Var> parts{a};
        for (const Var& v : pool) {
          if (v.rows() == a.rows() && parts.size() < 3) parts.push_back(v);
        }
        out = concat(parts, 1);
        break;
      }
      case GraphOp::kConcatRows: {
        std::vector<Var> parts{a};
        for (const Var& v : pool) {
          if (v.cols() == a.cols() && parts.size() < 3) parts.push_back(v);
        }
        out = concat(parts, 0);
        break;
      }
      case GraphOp::kSliceCols: {
        const std::size_t start = rng.below(a.cols());
        out = slice_cols(a, start, 1 + rng.below(a.cols() - start));
        break;
      }
      case GraphOp::kRowOf: out = row_of(a, rng.below(a.rows())); break;
      case GraphOp::kPick: out = pick(a, rng.below(a.rows()), rng.below(a.cols())); break;
      case GraphOp::kReshape: out = reshape(a, 1, a.rows() * a.cols()); break;
      case GraphOp::kTranspose: out = transpose(a); break;
      case GraphOp::kLookup: {
        std::vector<int> ids;
        const std::size_t n = 1 + rng.below(4);
        for (std::size_t i = 0; i < n; ++i) {
          ids.push_back(static_cast<int>(rng.below(a.rows())));
        }
        out = lookup(a, ids);
        break;
      }
      case GraphOp::kSum: out = sum(a); break;
      case GraphOp::kMean: out = mean(a); break;
      case GraphOp::kMeanRows: out = mean_rows(a); break;
    }
    pool.push_back(out);
  }
  Var loss;
  for (std::size_t k = 0; k < pool.size(); ++k) {
    const Var& v = pool[k];
    Var term = sum(mul(v, tape.constant(random_tensor(v.rows(), v.cols(), rng))));
    loss = k == 0 ? term : add(loss, term);
  }
  return loss;
}

}  // namespace titlegan::testing

#endif  // TITLEGAN_TESTS_RANDOM_GRAPH_H_
