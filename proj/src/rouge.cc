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

#include "rouge.h"

#include <algorithm>
#include <map>

#include "errors.h"

namespace titlegan {

namespace {

std::map<TokenSeq, std::size_t> ngram_counts(const TokenSeq& tokens,
                                             std::size_t n) {
  std::map<TokenSeq, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[TokenSeq(tokens.begin() + i, tokens.begin() + i + n)];
  }
  return counts;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

RougeScore make_rouge_score(double recall, double precision) {
  RougeScore s;
  s.recall = recall;
  s.precision = precision;
  s.f1 = (recall + precision) > 0.0
             ? 2.0 * precision * recall / (precision + recall)
             : 0.0;
  return s;
}

RougeScore rouge_n(const TokenSeq& candidate, const TokenSeq& reference,
                   std::size_t n) {
  if (n == 0) throw ContractError("rouge_n: n must be >= 1");
  if (reference.empty()) throw ContractError("rouge_n: empty reference");
  const auto cand = ngram_counts(candidate, n);
  const auto ref = ngram_counts(reference, n);
  std::size_t overlap = 0;
  for (const auto& [gram, count] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  const std::size_t ref_total =
      reference.size() >= n ? reference.size() - n + 1 : 0;
  const std::size_t cand_total =
      candidate.size() >= n ? candidate.size() - n + 1 : 0;
  return make_rouge_score(ratio(overlap, ref_total),
                          ratio(overlap, cand_total));
}

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(const TokenSeq& candidate, const TokenSeq& reference) {
  if (reference.empty()) throw ContractError("rouge_l: empty reference");
  const std::size_t lcs = lcs_length(candidate, reference);
  return make_rouge_score(ratio(lcs, reference.size()),
                          ratio(lcs, candidate.size()));
}

CorpusRouge corpus_rouge(
    const std::vector<std::pair<TokenSeq, TokenSeq>>& pairs) {
  if (pairs.empty()) throw ContractError("corpus_rouge: no pairs");
  CorpusRouge out;
  out.pairs = pairs.size();
  auto add = [](RougeScore& acc, const RougeScore& s) {
    acc.recall += s.recall;
    acc.precision += s.precision;
    acc.f1 += s.f1;
  };
  for (const auto& [cand, ref] : pairs) {
    add(out.rouge1, rouge_n(cand, ref, 1));
    add(out.rouge2, rouge_n(cand, ref, 2));
    add(out.rougeL, rouge_l(cand, ref));
  }
  const double inv = 1.0 / static_cast<double>(pairs.size());
  for (RougeScore* s : {&out.rouge1, &out.rouge2, &out.rougeL}) {
    s->recall *= inv;
    s->precision *= inv;
    s->f1 *= inv;
  }
  return out;
}

}  // namespace titlegan
