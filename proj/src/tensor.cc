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

#include "tensor.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <utility>

#include "errors.h"
#include "params.h"

namespace titlegan {

namespace {

std::string shapes(const Tensor& a, const Tensor& b) {
  return a.shape_string() + " and " + b.shape_string();
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch between " +
                         shapes(a, b));
  }
}

Tape& common_tape(Var a, Var b) {
  if (!a.valid() || !b.valid()) throw ContractError("operation on empty Var");
  if (a.tape() != b.tape()) {
    throw ContractError("operands live on different tapes");
  }
  return *a.tape();
}

Tape& tape_of(Var x) {
  if (!x.valid()) throw ContractError("operation on empty Var");
  return *x.tape();
}

void accumulate(Tape& tape, std::size_t id, const Tensor& delta) {
  if (!tape.requires_grad(id)) return;
  Tensor& g = tape.grad_slot(id);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += delta[i];
}

// out += op(a) * op(b), where op transposes when the flag is set.
void matmul_into(const Tensor& a, bool ta, const Tensor& b, bool tb,
                 Tensor& out) {
  const std::size_t m = ta ? a.cols() : a.rows();
  const std::size_t k = ta ? a.rows() : a.cols();
  const std::size_t n = tb ? b.rows() : b.cols();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ta ? a(p, i) : a(i, p);
      if (av == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        out(i, j) += av * (tb ? b(j, p) : b(p, j));
      }
    }
  }
}

template <typename F>
Var unary(Var x, F&& f, Tape::BackwardFn fn) {
  Tape& tape = tape_of(x);
  const Tensor& xv = x.value();
  Tensor out(xv.rows(), xv.cols());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = f(xv[i]);
  return tape.push(std::move(out), {x.id()}, std::move(fn));
}

}  // namespace

// ---------------------------------------------------------------------------
// Tensor

Tensor::Tensor(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_string());
  }
}

Tensor Tensor::scalar(double value) { return Tensor(1, 1, {value}); }

Tensor Tensor::row(std::initializer_list<double> values) {
  return Tensor(1, values.size(), std::vector<double>(values));
}

Tensor Tensor::row(std::span<const double> values) {
  return Tensor(1, values.size(),
                std::vector<double>(values.begin(), values.end()));
}

Tensor Tensor::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("ragged matrix literal");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor(r, c, std::move(data));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t(n, n);
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

std::string Tensor::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

double Tensor::item() const {
  if (data_.size() != 1) {
    throw DimensionError("item() on non-scalar tensor " + shape_string());
  }
  return data_[0];
}

bool Tensor::bit_equal(const Tensor& other) const {
  return same_shape(other) &&
         (data_.empty() || std::memcmp(data_.data(), other.data_.data(),
                                       data_.size() * sizeof(double)) == 0);
}

// ---------------------------------------------------------------------------
// Var / Tape

const Tensor& Var::value() const { return tape_->value_of(id_); }
const Tensor& Var::grad() const { return tape_->grad_of(id_); }

Var Tape::push(Tensor value, std::vector<std::size_t> parents,
               BackwardFn fn) {
  Node node;
  node.value = std::move(value);
  if (recording()) {
    node.requires_grad = std::any_of(
        parents.begin(), parents.end(),
        [this](std::size_t p) { return nodes_[p].requires_grad; });
    if (node.requires_grad) node.backward = std::move(fn);
  }
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::variable(Tensor value) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = recording();
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::param(ParamStore& store, const std::string& name) {
  // Names are unique only within one store, so key on the store as well.
  const std::string key =
      name + "@" + std::to_string(reinterpret_cast<std::uintptr_t>(&store));
  if (auto it = param_nodes_.find(key); it != param_nodes_.end()) {
    return Var(this, it->second);
  }
  Param& p = store.at(name);
  Node node;
  node.value = p.value;
  if (recording()) {
    node.requires_grad = true;
    if (!p.grad.same_shape(p.value)) {
      p.grad = Tensor(p.value.rows(), p.value.cols());
    }
    node.sink = &p.grad;
  }
  nodes_.push_back(std::move(node));
  param_nodes_.emplace(key, nodes_.size() - 1);
  return Var(this, nodes_.size() - 1);
}

Tensor& Tape::grad_slot(std::size_t id) {
  Node& node = nodes_[id];
  if (!node.grad.same_shape(node.value) || node.grad.empty()) {
    node.grad = Tensor(node.value.rows(), node.value.cols());
  }
  return node.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape() != this) throw ContractError("loss is not on this tape");
  if (!recording()) throw ContractError("backward on a no-grad tape");
  if (differentiated_) throw ContractError("tape already differentiated");
  const Tensor& lv = loss.value();
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ContractError("backward requires a scalar loss, got " +
                        lv.shape_string());
  }
  differentiated_ = true;
  if (!nodes_[loss.id()].requires_grad) return;
  grad_slot(loss.id())[0] = 1.0;
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (node.grad.empty()) continue;
    if (node.backward) node.backward(*this, id);
    if (node.sink != nullptr) {
      for (std::size_t i = 0; i < node.grad.size(); ++i) {
        (*node.sink)[i] += node.grad[i];
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Operations

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions differ for " + shapes(a, b));
  }
  Tensor out(a.rows(), b.cols());
  matmul_into(a, false, b, false, out);
  return out;
}

Var matmul(Var a, Var b) {
  Tape& tape = common_tape(a, b);
  Tensor out = matmul(a.value(), b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return tape.push(std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t s) {
    const Tensor& g = t.grad_of(s);
    if (t.requires_grad(ia)) {
      matmul_into(g, false, t.value_of(ib), true, t.grad_slot(ia));
    }
    if (t.requires_grad(ib)) {
      matmul_into(t.value_of(ia), true, g, false, t.grad_slot(ib));
    }
  });
}

Var add(Var a, Var b) {
  Tape& tape = common_tape(a, b);
  require_same_shape("add", a.value(), b.value());
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  const std::size_t ia = a.id(), ib = b.id();
  return tape.push(std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t s) {
    accumulate(t, ia, t.grad_of(s));
    accumulate(t, ib, t.grad_of(s));
  });
}

Var sub(Var a, Var b) {
  Tape& tape = common_tape(a, b);
  require_same_shape("sub", a.value(), b.value());
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  const std::size_t ia = a.id(), ib = b.id();
  return tape.push(std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t s) {
    accumulate(t, ia, t.grad_of(s));
    if (t.requires_grad(ib)) {
      Tensor& gb = t.grad_slot(ib);
      const Tensor& g = t.grad_of(s);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

Var mul(Var a, Var b) {
  Tape& tape = common_tape(a, b);
  require_same_shape("mul", a.value(), b.value());
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  const std::size_t ia = a.id(), ib = b.id();
  return tape.push(std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t s) {
    const Tensor& g = t.grad_of(s);
    if (t.requires_grad(ia)) {
      Tensor& ga = t.grad_slot(ia);
      const Tensor& bv = t.value_of(ib);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    }
    if (t.requires_grad(ib)) {
      Tensor& gb = t.grad_slot(ib);
      const Tensor& av = t.value_of(ia);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    }
  });
}

Var neg(Var x) { return scale(x, -1.0); }

Var scale(Var x, double factor) {
  const std::size_t ix = x.id();
  return unary(
      x, [factor](double v) { return v * factor; },
      [ix, factor](Tape& t, std::size_t s) {
        if (!t.requires_grad(ix)) return;
        Tensor& gx = t.grad_slot(ix);
        const Tensor& g = t.grad_of(s);
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * factor;
      });
}

Var add_scalar(Var x, double value) {
  const std::size_t ix = x.id();
  return unary(
      x, [value](double v) { return v + value; },
      [ix](Tape& t, std::size_t s) { accumulate(t, ix, t.grad_of(s)); });
}

Var add_bias(Var x, Var bias) {
  Tape& tape = common_tape(x, bias);
  const Tensor& xv = x.value();
  const Tensor& bv = bias.value();
  if (bv.rows() != 1 || bv.cols() != xv.cols()) {
    throw DimensionError("add_bias: bias must be 1x" +
                         std::to_string(xv.cols()) + ", got " +
                         bv.shape_string());
  }
  Tensor out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += bv[c];
  }
  const std::size_t ix = x.id(), ib = bias.id();
  return tape.push(std::move(out), {ix, ib}, [ix, ib](Tape& t, std::size_t s) {
    const Tensor& g = t.grad_of(s);
    accumulate(t, ix, g);
    if (t.requires_grad(ib)) {
      Tensor& gb = t.grad_slot(ib);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t c = 0; c < g.cols(); ++c) gb[c] += g(r, c);
      }
    }
  });
}

Var tanh(Var x) {
  const std::size_t ix = x.id();
  return unary(
      x, [](double v) { return std::tanh(v); },
      [ix](Tape& t, std::size_t s) {
        if (!t.requires_grad(ix)) return;
        Tensor& gx = t.grad_slot(ix);
        const Tensor& g = t.grad_of(s);
        const Tensor& y = t.value_of(s);
        for (std::size_t i = 0; i < g.size(); ++i) {
          gx[i] += g[i] * (1.0 - y[i] * y[i]);
        }
      });
}

Var sigmoid(Var x) {
  const std::size_t ix = x.id();
  return unary(
      x,
      [](double v) {
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [ix](Tape& t, std::size_t s) {
        if (!t.requires_grad(ix)) return;
        Tensor& gx = t.grad_slot(ix);
        const Tensor& g = t.grad_of(s);
        const Tensor& y = t.value_of(s);
        for (std::size_t i = 0; i < g.size(); ++i) {
          gx[i] += g[i] * y[i] * (1.0 - y[i]);
        }
      });
}

Var exp(Var x) {
  const std::size_t ix = x.id();
  return unary(
      x, [](double v) { return std::exp(v); },
      [ix](Tape& t, std::size_t s) {
        if (!t.requires_grad(ix)) return;
        Tensor& gx = t.grad_slot(ix);
        const Tensor& g = t.grad_of(s);
        const Tensor& y = t.value_of(s);
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * y[i];
      });
}

Var log(Var x) {
  for (double v : x.value().data()) {
    if (!(v > 0.0)) {
      std::ostringstream msg;
      msg << "log: non-positive input " << v;
      throw DomainError(msg.str());
    }
  }
  const std::size_t ix = x.id();
  return unary(
      x, [](double v) { return std::log(v); },
      [ix](Tape& t, std::size_t s) {
        if (!t.requires_grad(ix)) return;
        Tensor& gx = t.grad_slot(ix);
        const Tensor& g = t.grad_of(s);
        const Tensor& xv = t.value_of(ix);
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] / xv[i];
      });
}

Var clamp(Var x, double lo, double hi) {
  const std::size_t ix = x.id();
  return unary(
      x, [lo, hi](double v) { return std::clamp(v, lo, hi); },
      [ix, lo, hi](Tape& t, std::size_t s) {
        if (!t.requires_grad(ix)) return;
        Tensor& gx = t.grad_slot(ix);
        const Tensor& g = t.grad_of(s);
        const Tensor& xv = t.value_of(ix);
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (xv[i] > lo && xv[i] < hi) gx[i] += g[i];
        }
      });
}

Tensor softmax(const Tensor& x, int axis) {
  if (axis != 0 && axis != 1) {
    throw DimensionError("softmax: axis must be 0 or 1, got " +
                         std::to_string(axis));
  }
  Tensor out(x.rows(), x.cols());
  const std::size_t outer = axis == 1 ? x.rows() : x.cols();
  const std::size_t inner = axis == 1 ? x.cols() : x.rows();
  auto at = [&](const Tensor& t, std::size_t o, std::size_t i) {
    return axis == 1 ? t(o, i) : t(i, o);
  };
  for (std::size_t o = 0; o < outer; ++o) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < inner; ++i) mx = std::max(mx, at(x, o, i));
    double total = 0.0;
    for (std::size_t i = 0; i < inner; ++i) {
      const double e = std::exp(at(x, o, i) - mx);
      (axis == 1 ? out(o, i) : out(i, o)) = e;
      total += e;
    }
    for (std::size_t i = 0; i < inner; ++i) {
      (axis == 1 ? out(o, i) : out(i, o)) /= total;
    }
  }
  return out;
}

Var softmax(Var x, int axis) {
  Tape& tape = tape_of(x);
  Tensor out = softmax(x.value(), axis);
  const std::size_t ix = x.id();
  return tape.push(std::move(out), {ix}, [ix, axis](Tape& t, std::size_t s) {
    if (!t.requires_grad(ix)) return;
    const Tensor& g = t.grad_of(s);
    const Tensor& y = t.value_of(s);
    Tensor& gx = t.grad_slot(ix);
    const std::size_t outer = axis == 1 ? y.rows() : y.cols();
    const std::size_t inner = axis == 1 ? y.cols() : y.rows();
    for (std::size_t o = 0; o < outer; ++o) {
      double dot = 0.0;
      for (std::size_t i = 0; i < inner; ++i) {
        dot += axis == 1 ? g(o, i) * y(o, i) : g(i, o) * y(i, o);
      }
      for (std::size_t i = 0; i < inner; ++i) {
        if (axis == 1) {
          gx(o, i) += y(o, i) * (g(o, i) - dot);
        } else {
          gx(i, o) += y(i, o) * (g(i, o) - dot);
        }
      }
    }
  });
}

namespace {

void check_mask(const char* op, const Tensor& logits,
                const std::vector<bool>& allowed) {
  if (logits.rows() != 1 || logits.cols() != allowed.size()) {
    throw DimensionError(std::string(op) + ": logits " +
                         logits.shape_string() + " vs mask of length " +
                         std::to_string(allowed.size()));
  }
  if (std::none_of(allowed.begin(), allowed.end(), [](bool b) { return b; })) {
    throw ContractError(std::string(op) + ": mask blocks every entry");
  }
}

// Returns (max, log-sum-exp) over allowed entries.
std::pair<double, double> masked_lse(const Tensor& x,
                                     const std::vector<bool>& allowed) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.cols(); ++i) {
    if (allowed[i]) mx = std::max(mx, x[i]);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < x.cols(); ++i) {
    if (allowed[i]) total += std::exp(x[i] - mx);
  }
  return {mx, mx + std::log(total)};
}

}  // namespace

Var masked_softmax(Var logits, const std::vector<bool>& allowed) {
  Tape& tape = tape_of(logits);
  const Tensor& x = logits.value();
  check_mask("masked_softmax", x, allowed);
  const double lse = masked_lse(x, allowed).second;
  Tensor out(1, x.cols());
  for (std::size_t i = 0; i < x.cols(); ++i) {
    out[i] = allowed[i] ? std::exp(x[i] - lse) : 0.0;
  }
  const std::size_t ix = logits.id();
  return tape.push(std::move(out), {ix}, [ix](Tape& t, std::size_t s) {
    if (!t.requires_grad(ix)) return;
    const Tensor& g = t.grad_of(s);
    const Tensor& y = t.value_of(s);
    Tensor& gx = t.grad_slot(ix);
    double dot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) dot += g[i] * y[i];
    // Blocked entries have y == 0 and therefore receive nothing.
    for (std::size_t i = 0; i < y.size(); ++i) gx[i] += y[i] * (g[i] - dot);
  });
}

Var log_softmax_at(Var logits, const std::vector<bool>& allowed,
                   std::size_t index) {
  Tape& tape = tape_of(logits);
  const Tensor& x = logits.value();
  check_mask("log_softmax_at", x, allowed);
  if (index >= x.cols()) {
    throw IndexError("log_softmax_at: index " + std::to_string(index) +
                     " out of range for " + x.shape_string());
  }
  if (!allowed[index]) {
    throw DomainError("log_softmax_at: index " + std::to_string(index) +
                      " is masked out");
  }
  const double lse = masked_lse(x, allowed).second;
  const std::size_t ix = logits.id();
  return tape.push(Tensor::scalar(x[index] - lse), {ix},
                   [ix, allowed, index, lse](Tape& t, std::size_t s) {
                     if (!t.requires_grad(ix)) return;
                     const double g = t.grad_of(s)[0];
                     const Tensor& xv = t.value_of(ix);
                     Tensor& gx = t.grad_slot(ix);
                     for (std::size_t i = 0; i < xv.cols(); ++i) {
                       if (!allowed[i]) continue;
                       const double p = std::exp(xv[i] - lse);
                       gx[i] += g * ((i == index ? 1.0 : 0.0) - p);
                     }
                   });
}

Var concat(const std::vector<Var>& parts, int axis) {
  if (parts.empty()) throw ContractError("concat of zero tensors");
  if (axis != 0 && axis != 1) {
    throw DimensionError("concat: axis must be 0 or 1, got " +
                         std::to_string(axis));
  }
  Tape& tape = tape_of(parts[0]);
  const Tensor& first = parts[0].value();
  std::size_t rows = 0, cols = 0;
  for (const Var& p : parts) {
    if (p.tape() != &tape) throw ContractError("concat across tapes");
    const Tensor& v = p.value();
    if (axis == 1) {
      if (v.rows() != first.rows()) {
        throw DimensionError("concat: row counts differ for " +
                             shapes(first, v));
      }
      cols += v.cols();
    } else {
      if (v.cols() != first.cols()) {
        throw DimensionError("concat: column counts differ for " +
                             shapes(first, v));
      }
      rows += v.rows();
    }
  }
  if (axis == 1) rows = first.rows();
  else cols = first.cols();

  Tensor out(rows, cols);
  std::vector<std::size_t> ids;
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    for (std::size_t r = 0; r < v.rows(); ++r) {
      for (std::size_t c = 0; c < v.cols(); ++c) {
        if (axis == 1) out(r, offset + c) = v(r, c);
        else out(offset + r, c) = v(r, c);
      }
    }
    ids.push_back(p.id());
    offsets.push_back(offset);
    offset += axis == 1 ? v.cols() : v.rows();
  }
  std::vector<std::size_t> parents = ids;
  return tape.push(std::move(out), std::move(parents),
                   [ids, offsets, axis](Tape& t, std::size_t s) {
                     const Tensor& g = t.grad_of(s);
                     for (std::size_t k = 0; k < ids.size(); ++k) {
                       if (!t.requires_grad(ids[k])) continue;
                       Tensor& gp = t.grad_slot(ids[k]);
                       for (std::size_t r = 0; r < gp.rows(); ++r) {
                         for (std::size_t c = 0; c < gp.cols(); ++c) {
                           gp(r, c) += axis == 1 ? g(r, offsets[k] + c)
                                                 : g(offsets[k] + r, c);
                         }
                       }
                     }
                   });
}

Var slice_cols(Var x, std::size_t start, std::size_t count) {
  Tape& tape = tape_of(x);
  const Tensor& xv = x.value();
  if (start + count > xv.cols()) {
    throw DimensionError("slice_cols: [" + std::to_string(start) + ", " +
                         std::to_string(start + count) + ") exceeds " +
                         xv.shape_string());
  }
  Tensor out(xv.rows(), count);
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    for (std::size_t c = 0; c < count; ++c) out(r, c) = xv(r, start + c);
  }
  const std::size_t ix = x.id();
  return tape.push(std::move(out), {ix}, [ix, start](Tape& t, std::size_t s) {
    if (!t.requires_grad(ix)) return;
    const Tensor& g = t.grad_of(s);
    Tensor& gx = t.grad_slot(ix);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) gx(r, start + c) += g(r, c);
    }
  });
}

Var row_of(Var x, std::size_t r) {
  Tape& tape = tape_of(x);
  const Tensor& xv = x.value();
  if (r >= xv.rows()) {
    throw IndexError("row_of: row " + std::to_string(r) + " out of range for " +
                     xv.shape_string());
  }
  Tensor out(1, xv.cols());
  for (std::size_t c = 0; c < xv.cols(); ++c) out[c] = xv(r, c);
  const std::size_t ix = x.id();
  return tape.push(std::move(out), {ix}, [ix, r](Tape& t, std::size_t s) {
    if (!t.requires_grad(ix)) return;
    const Tensor& g = t.grad_of(s);
    Tensor& gx = t.grad_slot(ix);
    for (std::size_t c = 0; c < g.cols(); ++c) gx(r, c) += g[c];
  });
}

Var pick(Var x, std::size_t r, std::size_t c) {
  Tape& tape = tape_of(x);
  const Tensor& xv = x.value();
  if (r >= xv.rows() || c >= xv.cols()) {
    throw IndexError("pick: (" + std::to_string(r) + ", " + std::to_string(c) +
                     ") out of range for " + xv.shape_string());
  }
  const std::size_t ix = x.id();
  return tape.push(Tensor::scalar(xv(r, c)), {ix},
                   [ix, r, c](Tape& t, std::size_t s) {
                     if (!t.requires_grad(ix)) return;
                     t.grad_slot(ix)(r, c) += t.grad_of(s)[0];
                   });
}

Var reshape(Var x, std::size_t rows, std::size_t cols) {
  Tape& tape = tape_of(x);
  const Tensor& xv = x.value();
  if (rows * cols != xv.size()) {
    throw DimensionError("reshape: cannot view " + xv.shape_string() + " as " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  Tensor out(rows, cols, xv.values());
  const std::size_t ix = x.id();
  return tape.push(std::move(out), {ix}, [ix](Tape& t, std::size_t s) {
    accumulate(t, ix, t.grad_of(s));
  });
}

Var transpose(Var x) {
  Tape& tape = tape_of(x);
  const Tensor& xv = x.value();
  Tensor out(xv.cols(), xv.rows());
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    for (std::size_t c = 0; c < xv.cols(); ++c) out(c, r) = xv(r, c);
  }
  const std::size_t ix = x.id();
  return tape.push(std::move(out), {ix}, [ix](Tape& t, std::size_t s) {
    if (!t.requires_grad(ix)) return;
    const Tensor& g = t.grad_of(s);
    Tensor& gx = t.grad_slot(ix);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) gx(c, r) += g(r, c);
    }
  });
}

Var lookup(Var table, std::span<const int> ids) {
  Tape& tape = tape_of(table);
  const Tensor& tv = table.value();
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= tv.rows()) {
      throw IndexError("lookup: id " + std::to_string(id) +
                       " out of range for table with " +
                       std::to_string(tv.rows()) + " rows");
    }
  }
  Tensor out(ids.size(), tv.cols());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    for (std::size_t c = 0; c < tv.cols(); ++c) {
      out(r, c) = tv(static_cast<std::size_t>(ids[r]), c);
    }
  }
  std::vector<int> rows(ids.begin(), ids.end());
  const std::size_t it = table.id();
  return tape.push(std::move(out), {it}, [it, rows](Tape& t, std::size_t s) {
    if (!t.requires_grad(it)) return;
    const Tensor& g = t.grad_of(s);
    Tensor& gt = t.grad_slot(it);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) {
        gt(static_cast<std::size_t>(rows[r]), c) += g(r, c);
      }
    }
  });
}

Var sum(Var x) {
  Tape& tape = tape_of(x);
  double total = 0.0;
  for (double v : x.value().data()) total += v;
  const std::size_t ix = x.id();
  return tape.push(Tensor::scalar(total), {ix}, [ix](Tape& t, std::size_t s) {
    if (!t.requires_grad(ix)) return;
    const double g = t.grad_of(s)[0];
    Tensor& gx = t.grad_slot(ix);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g;
  });
}

Var mean(Var x) {
  if (x.value().empty()) throw ContractError("mean of an empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(x.value().size()));
}

Var mean_rows(Var x) {
  Tape& tape = tape_of(x);
  const Tensor& xv = x.value();
  if (xv.rows() == 0) throw ContractError("mean_rows of a tensor with 0 rows");
  Tensor out(1, xv.cols());
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    for (std::size_t c = 0; c < xv.cols(); ++c) out[c] += xv(r, c);
  }
  const double inv = 1.0 / static_cast<double>(xv.rows());
  for (std::size_t c = 0; c < xv.cols(); ++c) out[c] *= inv;
  const std::size_t ix = x.id();
  return tape.push(std::move(out), {ix}, [ix, inv](Tape& t, std::size_t s) {
    if (!t.requires_grad(ix)) return;
    const Tensor& g = t.grad_of(s);
    Tensor& gx = t.grad_slot(ix);
    for (std::size_t r = 0; r < gx.rows(); ++r) {
      for (std::size_t c = 0; c < gx.cols(); ++c) gx(r, c) += g[c] * inv;
    }
  });
}

}  // namespace titlegan
