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
#include <string>

#include "doctest.h"
#include "errors.h"
#include "rng.h"
#include "support/gradcheck.h"
#include "support/random_graph.h"
#include "tensor.h"

using namespace titlegan;

namespace {

void check_close(const Tensor& got, const Tensor& want, double tol = 1e-12) {
  REQUIRE(got.rows() == want.rows());
  REQUIRE(got.cols() == want.cols());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i] == doctest::Approx(want[i]).epsilon(tol));
  }
}

}  // namespace

TEST_CASE("matmul fixtures") {
  const Tensor a = Tensor::from_rows({{1, 2}, {3, 4}});
  check_close(matmul(Tensor::identity(2), a), a);
  check_close(matmul(a, Tensor(2, 2)), Tensor(2, 2));
  check_close(matmul(a, Tensor::from_rows({{5, 6}, {7, 8}})),
              Tensor::from_rows({{19, 22}, {43, 50}}));
}

TEST_CASE("matmul shape mismatch names both shapes") {
  Tape tape;
  Var a = tape.constant(Tensor(2, 3));
  Var b = tape.constant(Tensor(2, 3));
  try {
    matmul(a, b);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("2x3") != std::string::npos);
  }
  CHECK_THROWS_AS(add(a, tape.constant(Tensor(3, 2))), DimensionError);
}

TEST_CASE("elementwise fixtures") {
  Tape tape;
  CHECK(tanh(tape.constant(Tensor::scalar(0.0))).value()[0] == 0.0);
  CHECK(sigmoid(tape.constant(Tensor::scalar(0.0))).value()[0] == 0.5);
  CHECK(tanh(tape.constant(Tensor::scalar(1.0))).value()[0] ==
        doctest::Approx(0.7615941559557649).epsilon(1e-15));
  CHECK(sigmoid(tape.constant(Tensor::scalar(-800.0))).value()[0] >= 0.0);
  CHECK(sigmoid(tape.constant(Tensor::scalar(800.0))).value()[0] == 1.0);
  CHECK_THROWS_AS(log(tape.constant(Tensor::scalar(0.0))), DomainError);
  CHECK_THROWS_AS(log(tape.constant(Tensor::row({1.0, -2.0}))), DomainError);
}

TEST_CASE("softmax fixtures and invariants") {
  check_close(softmax(Tensor::row({0, 0}), 1), Tensor::row({0.5, 0.5}));
  for (double c : {-50.0, 0.0, 3.5, 700.0}) {
    check_close(softmax(Tensor::row({c, c, c}), 1),
                Tensor::row({1.0 / 3, 1.0 / 3, 1.0 / 3}));
  }
  check_close(softmax(Tensor::row({1, 2}), 1),
              Tensor::row({0.2689414213699951, 0.7310585786300049}), 1e-14);

  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor x = testing::random_tensor(3, 5, rng, -20.0, 20.0);
    const double c = rng.uniform(-100.0, 100.0);
    Tensor shifted = x;
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += c;
    const Tensor p = softmax(x, 1);
    const Tensor q = softmax(shifted, 1);
    for (std::size_t r = 0; r < 3; ++r) {
      double total = 0.0;
      for (std::size_t k = 0; k < 5; ++k) {
        total += p(r, k);
        CHECK(std::abs(p(r, k) - q(r, k)) <= 1e-12);
      }
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("masked softmax gives masked entries exactly zero") {
  Tape tape;
  Var x = tape.constant(Tensor::row({5.0, 1.0, 2.0}));
  const Tensor p = masked_softmax(x, {false, true, true}).value();
  CHECK(p[0] == 0.0);
  CHECK(p[1] + p[2] == doctest::Approx(1.0));
  CHECK_THROWS_AS(masked_softmax(x, {false, false, false}), ContractError);
  CHECK_THROWS_AS(log_softmax_at(x, {false, true, true}, 0), DomainError);
}

TEST_CASE("concat fixtures") {
  Tape tape;
  Var a = tape.constant(Tensor::from_rows({{1, 2, 3}, {4, 5, 6}}));
  CHECK(concat({a}, 1).value().bit_equal(a.value()));
  CHECK(concat({tape.constant(Tensor(1, 2)), tape.constant(Tensor(1, 3))}, 1)
            .value()
            .bit_equal(Tensor(1, 5)));
  Var b = tape.constant(
      Tensor::from_rows({{7, 8, 9, 10}, {11, 12, 13, 14}}));
  const Tensor c = concat({a, b}, 1).value();
  REQUIRE(c.rows() == 2);
  REQUIRE(c.cols() == 7);
  check_close(c, Tensor::from_rows({{1, 2, 3, 7, 8, 9, 10},
                                    {4, 5, 6, 11, 12, 13, 14}}));
  CHECK_THROWS_AS(concat({a, tape.constant(Tensor(3, 1))}, 1), DimensionError);
}

TEST_CASE("lookup fixtures") {
  Tape tape;
  Var table = tape.variable(Tensor::from_rows({{1, 2}, {3, 4}, {5, 6}}));
  check_close(lookup(table, std::vector<int>{0}).value(), Tensor::row({1, 2}));
  const Tensor empty = lookup(table, std::vector<int>{}).value();
  CHECK(empty.rows() == 0);
  CHECK(empty.cols() == 2);
  try {
    lookup(table, std::vector<int>{7});
    FAIL("expected IndexError");
  } catch (const IndexError& e) {
    CHECK(std::string(e.what()).find('7') != std::string::npos);
  }
  Var rows = lookup(table, std::vector<int>{1, 1});
  tape.backward(sum(rows));
  check_close(table.grad(), Tensor::from_rows({{0, 0}, {2, 2}, {0, 0}}));
}

TEST_CASE("backward fixtures") {
  {
    Tape tape;
    Var w = tape.variable(Tensor::from_rows({{1, -2}, {0.5, 3}}));
    tape.backward(sum(w));
    check_close(w.grad(), Tensor::from_rows({{1, 1}, {1, 1}}));
  }
  {
    Tape tape;
    Var w = tape.variable(Tensor::row({1, 2, 3}));
    tape.backward(sum(mul(w, w)));
    check_close(w.grad(), Tensor::row({2, 4, 6}));
  }
}

TEST_CASE("tape contract") {
  Tape tape;
  Var w = tape.variable(Tensor::row({1, 2}));
  CHECK_THROWS_AS(tape.backward(w), ContractError);
  Var loss = sum(w);
  tape.backward(loss);
  CHECK_THROWS_AS(tape.backward(loss), ContractError);

  Tape frozen(Tape::Mode::kNoGrad);
  Var v = frozen.variable(Tensor::scalar(2.0));
  CHECK_THROWS_AS(frozen.backward(v), ContractError);

  Tape other;
  CHECK_THROWS_AS(add(w, other.constant(Tensor::row({1, 2}))), ContractError);
}

TEST_CASE("identical op sequences give bit-identical results") {
  auto run = [] {
    Rng rng(5);
    Tape tape;
    Var a = tape.variable(testing::random_tensor(3, 4, rng));
    Var b = tape.variable(testing::random_tensor(4, 2, rng));
    Var loss = sum(tanh(matmul(a, b)));
    tape.backward(loss);
    return std::pair{loss.value(), a.grad()};
  };
  const auto [l1, g1] = run();
  const auto [l2, g2] = run();
  CHECK(l1.bit_equal(l2));
  CHECK(g1.bit_equal(g2));
}

TEST_CASE("every op passes a finite-difference check") {
  for (int op = 0; op < testing::kGraphOpCount; ++op) {
    CAPTURE(op);
    const testing::RandomGraph g = testing::make_random_graph(1000 + op);
    const auto report = testing::check_leaf_gradients(
        g.leaves, [&](Tape& tape, const std::vector<Var>& leaves) {
          return testing::build_random_graph(tape, leaves, g.seed, op, 1);
        });
    CAPTURE(report.worst);
    CHECK(report.ok());
  }
}

TEST_CASE("random composite graphs pass a finite-difference check") {
  for (int i = 0; i < 20; ++i) {
    CAPTURE(i);
    const testing::RandomGraph g = testing::make_random_graph(i);
    const auto report = testing::check_leaf_gradients(
        g.leaves, [&](Tape& tape, const std::vector<Var>& leaves) {
          return testing::build_random_graph(tape, leaves, g.seed,
                                             (i * 7) % testing::kGraphOpCount,
                                             10);
        });
    CAPTURE(report.worst);
    CHECK(report.ok());
  }
}
