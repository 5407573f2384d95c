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

// Product records, vocabulary, corpus files and the synthetic corpus
// generator.

#ifndef TITLEGAN_CORPUS_H_
#define TITLEGAN_CORPUS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace titlegan {

using TokenId = int;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kBosId = 1;
inline constexpr TokenId kEosId = 2;
inline constexpr TokenId kUnkId = 3;
inline constexpr int kNumReserved = 4;

inline constexpr const char* kPadToken = "<pad>";
inline constexpr const char* kBosToken = "<bos>";
inline constexpr const char* kEosToken = "<eos>";
inline constexpr const char* kUnkToken = "<unk>";

bool is_reserved_token(const std::string& token);

struct ProductRecord {
  std::vector<std::string> long_title;
  std::vector<std::string> short_title;
  std::vector<std::string> attr_tags;
  std::vector<double> image_features;

  bool operator==(const ProductRecord&) const = default;
};

// Throws ContractError when 1 <= N <= K fails or a feature is not finite.
void validate_record(const ProductRecord& record);

enum class DecodeMode {
  kStrip,  // drop BOS, stop at the first EOS
  kKeep,   // keep BOS / EOS / UNK spellings
};

class Vocab {
 public:
  // Reserved tokens only.
  Vocab();
  // Reserved tokens followed by `tokens` in the given order.
  explicit Vocab(const std::vector<std::string>& tokens);

  std::size_t size() const { return id_to_token_.size(); }
  bool contains(const std::string& token) const;
  // UNK for unknown tokens.
  TokenId id(const std::string& token) const;
  // Throws IndexError for ids outside [0, size).
  const std::string& token(TokenId id) const;
  const std::vector<std::string>& tokens() const { return id_to_token_; }

  std::vector<TokenId> encode(const std::vector<std::string>& tokens) const;
  // PAD is never emitted.
  std::vector<std::string> decode(std::span<const TokenId> ids,
                                  DecodeMode mode = DecodeMode::kStrip) const;

  // One token per line in id order, reserved tokens included.
  void save(const std::string& path) const;
  static Vocab load(const std::string& path);

  bool operator==(const Vocab& other) const {
    return id_to_token_ == other.id_to_token_;
  }

 private:
  std::vector<std::string> id_to_token_;
  std::map<std::string, TokenId> token_to_id_;
};

// Every token whose frequency over long_title, short_title and attr_tags is
// at least min_freq, ordered by frequency (descending) then lexicographically.
Vocab build_vocab(const std::vector<ProductRecord>& records, int min_freq);

struct SynthConfig {
  std::size_t n_records = 500;
  std::vector<std::string> brands;
  std::vector<std::string> categories;
  // Each pair holds two modifiers that contradict each other. A record uses
  // at most one side of any pair as a true modifier.
  std::vector<std::pair<std::string, std::string>> modifier_pairs;
  std::vector<std::string> noise_words;
  std::vector<std::string> extra_tags;
  std::size_t min_modifiers = 1;
  std::size_t max_modifiers = 3;
  std::size_t min_noise_words = 2;
  std::size_t max_noise_words = 5;
  std::size_t min_extra_tags = 0;
  std::size_t max_extra_tags = 3;
  std::size_t image_dim = 16;
  // Probability that a long title also carries the contradicting partner of
  // one of its true modifiers.
  double noise_prob = 0.3;
  double image_noise = 0.1;
  std::uint64_t seed = 1;

  // Pools sized for a vocabulary of about 60 tokens.
  static SynthConfig defaults();
  // Throws ConfigError when pools overlap, use reserved tokens, or the length
  // ranges cannot be met.
  void validate() const;
};

std::vector<ProductRecord> synth_generate(const SynthConfig& config);

// Canonical order of a true short title: brand, modifiers in pool order,
// category.
std::vector<std::string> canonical_short_title(
    const SynthConfig& config, const std::string& brand,
    const std::vector<std::string>& modifiers, const std::string& category);

// Corpus files hold one JSON object per line with keys long_title,
// short_title, attr_tags (string arrays) and image_features (number array).
std::string record_to_line(const ProductRecord& record);
// line_number is used in error messages only.
ProductRecord record_from_line(const std::string& line, std::size_t line_number);
void save_corpus(const std::vector<ProductRecord>& records,
                 const std::string& path);
std::vector<ProductRecord> load_corpus(const std::string& path);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
  std::vector<std::size_t> test;
};

// Ranks record indices by a seeded hash; the first floor(n * valid_fraction)
// go to valid, the next floor(n * test_fraction) to test, the remainder to
// train. Each list is returned in ascending index order.
SplitIndices split_indices(std::size_t n, std::uint64_t seed,
                           double valid_fraction = 0.1,
                           double test_fraction = 0.1);

}  // namespace titlegan

#endif  // TITLEGAN_CORPUS_H_
