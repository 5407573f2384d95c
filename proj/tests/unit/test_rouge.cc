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
#include "rouge.h"
#include "support/rouge_oracle.h"

using namespace titlegan;

namespace {

void check_score(const RougeScore& got, double recall, double precision) {
  CHECK(got.recall == doctest::Approx(recall).epsilon(1e-15));
  CHECK(got.precision == doctest::Approx(precision).epsilon(1e-15));
}

}  // namespace

TEST_CASE("rouge-n fixtures") {
  const TokenSeq x{"a", "b", "c"};
  const RougeScore same = rouge_n(x, x, 1);
  check_score(same, 1.0, 1.0);
  CHECK(same.f1 == 1.0);
  const RougeScore disjoint = rouge_n({"x", "y"}, x, 1);
  check_score(disjoint, 0.0, 0.0);
  CHECK(disjoint.f1 == 0.0);
  check_score(rouge_n(x, {"a", "b", "d"}, 1), 2.0 / 3, 2.0 / 3);
  check_score(rouge_n(x, {"a", "b", "d"}, 2), 0.5, 0.5);
  check_score(rouge_n({}, x, 1), 0.0, 0.0);
  CHECK_THROWS_AS(rouge_n(x, {}, 1), ContractError);
  CHECK_THROWS_AS(rouge_n(x, x, 0), ContractError);
}

TEST_CASE("rouge-l fixtures") {
  const TokenSeq abc{"a", "b", "c"};
  check_score(rouge_l(abc, abc), 1.0, 1.0);
  CHECK(lcs_length({"a", "c"}, abc) == 2);
  check_score(rouge_l({"a", "c"}, abc), 2.0 / 3, 1.0);
  const RougeScore empty = rouge_l({}, abc);
  check_score(empty, 0.0, 0.0);
  CHECK(empty.f1 == 0.0);
  CHECK_THROWS_AS(rouge_l(abc, {}), ContractError);
}

TEST_CASE("f1 definition") {
  CHECK(make_rouge_score(0.0, 0.0).f1 == 0.0);
  CHECK(make_rouge_score(0.5, 1.0).f1 == doctest::Approx(2.0 / 3));
}

TEST_CASE("corpus aggregation") {
  const TokenSeq abc{"a", "b", "c"};
  const CorpusRouge one = corpus_rouge({{{"a", "c"}, abc}});
  CHECK(one.pairs == 1);
  CHECK(one.rougeL.recall == rouge_l({"a", "c"}, abc).recall);
  const CorpusRouge two = corpus_rouge({{abc, abc}, {{"z"}, abc}});
  CHECK(two.rouge1.recall == doctest::Approx(0.5));
  CHECK_THROWS_AS(corpus_rouge({}), ContractError);
}

TEST_CASE("clipping and bounds") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const TokenSeq ref = testing::random_tokens(rng, 1, 8);
    TokenSeq cand = testing::random_tokens(rng, 0, 8);
    const double before = rouge_n(cand, ref, 1).recall;
    cand.push_back(cand.empty() ? ref.front() : cand.front());
    cand.push_back(cand.front());
    cand.push_back(cand.front());
    const double after = rouge_n(cand, ref, 1).recall;
    if (std::count(cand.begin(), cand.end(), cand.front()) >
        std::count(ref.begin(), ref.end(), cand.front()) + 2) {
      CHECK(after <= before + 1e-15);
    }
    const std::size_t lcs = lcs_length(cand, ref);
    CHECK(lcs <= std::min(cand.size(), ref.size()));
    const RougeScore l = rouge_l(cand, ref);
    CHECK(l.recall >= 0.0);
    CHECK(l.recall <= 1.0);
    CHECK(l.precision <= 1.0);
    if (ref.size() >= 2) {
      const RougeScore self = rouge_n(ref, ref, 2);
      CHECK(self.recall == 1.0);
      CHECK(self.precision == 1.0);
    }
  }
}

TEST_CASE("matches the naive oracle") {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const TokenSeq cand = testing::random_tokens(rng, 0, 8);
    const TokenSeq ref = testing::random_tokens(rng, 1, 8);
    CAPTURE(trial);
    CHECK(lcs_length(cand, ref) == testing::naive_lcs(cand, ref));
    for (std::size_t n : {1u, 2u, 3u}) {
      const RougeScore a = rouge_n(cand, ref, n);
      const RougeScore b = testing::naive_rouge_n(cand, ref, n);
      CHECK(std::abs(a.recall - b.recall) <= 1e-12);
      CHECK(std::abs(a.precision - b.precision) <= 1e-12);
      CHECK(std::abs(a.f1 - b.f1) <= 1e-12);
    }
  }
}
