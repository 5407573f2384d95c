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

// Dense matrices and a define-by-run reverse-mode tape.
//
// Every value is a row-major rows x cols matrix of doubles. Vectors are 1 x n
// rows and scalars are 1 x 1. There is no general broadcasting: the only
// mixed-shape elementwise operation is add_bias, which adds a 1 x n row to
// every row of an m x n matrix.
//
// A Tape records each operation as it executes. Nodes are appended in
// execution order, so reverse creation order is a valid reverse topological
// order and backward() visits every node exactly once.

#ifndef TITLEGAN_TENSOR_H_
#define TITLEGAN_TENSOR_H_

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace titlegan {

class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols);
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Tensor scalar(double value);
  static Tensor row(std::initializer_list<double> values);
  static Tensor row(std::span<const double> values);
  static Tensor from_rows(
      std::initializer_list<std::initializer_list<double>> rows);
  static Tensor identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool same_shape(const Tensor& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string shape_string() const;

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  void fill(double value);
  bool all_finite() const;
  double item() const;

  // Exact float equality, including signed zeros.
  bool bit_equal(const Tensor& other) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

class Tape;
class ParamStore;

// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  // Gradient accumulated by Tape::backward; an empty tensor when the node
  // received no gradient.
  const Tensor& grad() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  enum class Mode {
    kRecord,  // record backward closures
    kNoGrad,  // forward values only
  };

  explicit Tape(Mode mode = Mode::kRecord) : mode_(mode) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return mode_ == Mode::kRecord; }
  std::size_t size() const { return nodes_.size(); }

  Var constant(Tensor value);
  // Differentiable leaf owned by the tape; read its gradient via Var::grad.
  Var variable(Tensor value);
  // Leaf bound to a named parameter. Its gradient is added into the store's
  // gradient accumulator by backward(). Repeated calls with the same name
  // return the same node.
  Var param(ParamStore& store, const std::string& name);

  // Seeds d(loss)/d(loss) = 1 and propagates to every ancestor. loss must be
  // 1 x 1. A tape can be differentiated once.
  void backward(Var loss);

  // Op-author interface.
  Var push(Tensor value, std::vector<std::size_t> parents, BackwardFn fn);
  const Tensor& value_of(std::size_t id) const { return nodes_[id].value; }
  const Tensor& grad_of(std::size_t id) const { return nodes_[id].grad; }
  bool requires_grad(std::size_t id) const {
    return nodes_[id].requires_grad;
  }
  // Gradient accumulator for a node, allocated as zeros on first use.
  Tensor& grad_slot(std::size_t id);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    BackwardFn backward;
    Tensor* sink = nullptr;
    bool requires_grad = false;
  };

  Mode mode_;
  bool differentiated_ = false;
  std::deque<Node> nodes_;
  std::map<std::string, std::size_t> param_nodes_;
};

// ---------------------------------------------------------------------------
// Operations. All operands must live on the same tape.

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var neg(Var x);
Var scale(Var x, double factor);
Var add_scalar(Var x, double value);
// x: m x n, bias: 1 x n. Adds bias to every row.
Var add_bias(Var x, Var bias);
Var tanh(Var x);
Var sigmoid(Var x);
Var exp(Var x);
// Throws DomainError on any non-positive entry.
Var log(Var x);
// Gradient passes only where lo < x < hi.
Var clamp(Var x, double lo, double hi);

// axis 0 normalizes each column, axis 1 each row.
Var softmax(Var x, int axis);
// Row-vector softmax restricted to entries with allowed[i] true. Blocked
// entries come out as exactly 0 and receive no gradient.
Var masked_softmax(Var logits, const std::vector<bool>& allowed);
// log of masked_softmax(logits, allowed)[index], computed stably. 1 x 1.
Var log_softmax_at(Var logits, const std::vector<bool>& allowed,
                   std::size_t index);

Var concat(const std::vector<Var>& parts, int axis);
Var slice_cols(Var x, std::size_t start, std::size_t count);
Var row_of(Var x, std::size_t r);
Var pick(Var x, std::size_t r, std::size_t c);
Var reshape(Var x, std::size_t rows, std::size_t cols);
Var transpose(Var x);

// Gathers table rows. An empty id list yields a 0 x d tensor.
Var lookup(Var table, std::span<const int> ids);

Var sum(Var x);
Var mean(Var x);
// Column means of a matrix with at least one row: 1 x cols.
Var mean_rows(Var x);

// Plain-value helpers used outside the tape.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor softmax(const Tensor& x, int axis);

}  // namespace titlegan

#endif  // TITLEGAN_TENSOR_H_
