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

// ROUGE-N with clipped n-gram counts and LCS-based ROUGE-L. Tokens are
// compared as opaque strings: no stemming, no stopword removal.

#ifndef TITLEGAN_ROUGE_H_
#define TITLEGAN_ROUGE_H_

#include <string>
#include <utility>
#include <vector>

namespace titlegan {

using TokenSeq = std::vector<std::string>;

struct RougeScore {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

// f1 = 2pr / (p + r), and 0 when both are 0.
RougeScore make_rouge_score(double recall, double precision);

// Throws ContractError for n == 0 or an empty reference.
RougeScore rouge_n(const TokenSeq& candidate, const TokenSeq& reference,
                   std::size_t n);
RougeScore rouge_l(const TokenSeq& candidate, const TokenSeq& reference);

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b);

struct CorpusRouge {
  RougeScore rouge1;
  RougeScore rouge2;
  RougeScore rougeL;
  std::size_t pairs = 0;
};

// Unweighted mean of the per-pair scores. pairs are (candidate, reference).
CorpusRouge corpus_rouge(const std::vector<std::pair<TokenSeq, TokenSeq>>& pairs);

}  // namespace titlegan

#endif  // TITLEGAN_ROUGE_H_
