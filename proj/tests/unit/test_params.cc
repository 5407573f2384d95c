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
#include <filesystem>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "errors.h"
#include "params.h"
#include "support/random_graph.h"
#include "support/temp_dir.h"

using namespace titlegan;

TEST_CASE("duplicate parameter names are rejected") {
  ParamStore store;
  store.add("w", Tensor(1, 1));
  CHECK_THROWS_AS(store.add("w", Tensor(1, 1)), ConfigError);
  CHECK_THROWS_AS(store.at("missing"), ConfigError);
}

TEST_CASE("uniform init stays within the fan-in bound") {
  ParamStore store;
  Rng rng(3);
  const Param& p = store.add_uniform("w", 20, 30, 16, rng);
  for (double v : p.value.values()) CHECK(std::abs(v) <= 0.25);
}

TEST_CASE("sgd fixtures") {
  ParamStore store;
  store.add("p", Tensor::scalar(1.0));
  OptimizerConfig sgd;

  sgd.learning_rate = 0.0;
  store.at("p").grad[0] = 123.0;
  optimizer_step(store, sgd);
  CHECK(store.value("p")[0] == 1.0);

  sgd.learning_rate = 0.1;
  store.at("p").grad[0] = 0.5;
  optimizer_step(store, sgd);
  CHECK(store.value("p")[0] == doctest::Approx(0.95));

  store.mutable_value("p")[0] = 1.0;
  for (int step = 0; step < 2; ++step) {
    store.zero_grad();
    Tape tape;
    Var p = tape.param(store, "p");
    tape.backward(sum(mul(p, p)));
    optimizer_step(store, sgd);
  }
  CHECK(store.value("p")[0] == doctest::Approx(0.64));
}

TEST_CASE("adam with zero learning rate leaves parameters unchanged") {
  ParamStore store;
  store.add("p", Tensor::row({1.0, -2.0}));
  store.at("p").grad = Tensor::row({0.3, 0.4});
  OptimizerConfig adam;
  adam.kind = OptimizerConfig::Kind::kAdam;
  adam.learning_rate = 0.0;
  optimizer_step(store, adam);
  CHECK(store.value("p").bit_equal(Tensor::row({1.0, -2.0})));
}

TEST_CASE("non-finite gradient aborts with the parameter name") {
  ParamStore store;
  store.add("a", Tensor::scalar(1.0));
  store.add("bad/w", Tensor::scalar(1.0));
  store.at("a").grad[0] = 1.0;
  store.at("bad/w").grad[0] = std::numeric_limits<double>::quiet_NaN();
  OptimizerConfig sgd;
  try {
    optimizer_step(store, sgd);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("bad/w") != std::string::npos);
  }
  CHECK(store.value("a")[0] == 1.0);
}

TEST_CASE("global norm clipping") {
  ParamStore store;
  store.add("a", Tensor::row({0.0, 0.0}));
  store.add("b", Tensor::scalar(0.0));
  store.at("a").grad = Tensor::row({3.0, 0.0});
  store.at("b").grad = Tensor::scalar(4.0);
  CHECK(global_grad_norm(store) == doctest::Approx(5.0));
  CHECK(clip_grad_norm(store, 1.0) == doctest::Approx(5.0));
  CHECK(global_grad_norm(store) == doctest::Approx(1.0));
  CHECK(store.at("a").grad[0] == doctest::Approx(0.6));
  clip_grad_norm(store, 10.0);
  CHECK(global_grad_norm(store) == doctest::Approx(1.0));
}

TEST_CASE("checkpoint roundtrip is bit-identical") {
  testing::TempDir dir;
  Rng rng(9);
  ParamStore a, b;
  a.add("gen/w", testing::random_tensor(3, 4, rng, -1e3, 1e3));
  a.mutable_value("gen/w")[0] = -0.0;
  a.mutable_value("gen/w")[1] = 1e-310;
  a.add("gen/b", testing::random_tensor(1, 4, rng));
  b.add("disc/w", testing::random_tensor(2, 2, rng));
  a.set_step(17);
  const std::string path = dir.file("x.ckpt");
  save_checkpoint(path, make_checkpoint({&a, &b}, 42));
  const Checkpoint loaded = load_checkpoint(path);
  CHECK(loaded.seed == 42);
  CHECK(loaded.step == 17);
  CHECK(loaded.tensors.size() == 3);

  ParamStore a2, b2;
  a2.add("gen/w", Tensor(3, 4));
  a2.add("gen/b", Tensor(1, 4));
  b2.add("disc/w", Tensor(2, 2));
  restore(a2, loaded);
  restore(b2, loaded);
  CHECK(a2.values_bit_equal(a));
  CHECK(b2.values_bit_equal(b));
  CHECK(std::signbit(a2.value("gen/w")[0]));
}

TEST_CASE("checkpoint errors") {
  testing::TempDir dir;
  ParamStore a;
  a.add("w", Tensor(2, 3));
  const std::string path = dir.file("a.ckpt");
  save_checkpoint(path, make_checkpoint({&a}, 1));

  ParamStore wrong_shape;
  wrong_shape.add("w", Tensor(3, 2));
  try {
    restore(wrong_shape, load_checkpoint(path));
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("3x2") != std::string::npos);
    CHECK(msg.find("2x3") != std::string::npos);
  }
  ParamStore missing;
  missing.add("v", Tensor(1, 1));
  CHECK_THROWS_AS(restore(missing, load_checkpoint(path)), ConfigError);

  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size - 3);
  CHECK_THROWS_AS(load_checkpoint(path), ParseError);
  {
    std::ofstream out(dir.file("junk.ckpt"), std::ios::binary);
    out << "not a checkpoint at all";
  }
  CHECK_THROWS_AS(load_checkpoint(dir.file("junk.ckpt")), ParseError);
  CHECK_THROWS_AS(load_checkpoint(dir.file("absent.ckpt")), IoError);
  CHECK_THROWS_AS(make_checkpoint({&a, &a}, 1), ConfigError);
}

TEST_CASE("derived seeds are distinct streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  Rng x(7), y(7);
  for (int i = 0; i < 10; ++i) CHECK(x.next_u64() == y.next_u64());
  Rng z(8);
  double total = 0.0;
  for (int i = 0; i < 20000; ++i) total += z.normal();
  CHECK(std::abs(total / 20000.0) < 0.05);
}
