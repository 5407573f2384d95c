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

#include "corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "errors.h"
#include "json.hpp"
#include "rng.h"

namespace titlegan {

namespace {

using ordered_json = nlohmann::ordered_json;

const std::vector<std::string>& reserved_tokens() {
  static const std::vector<std::string> kReserved = {kPadToken, kBosToken,
                                                     kEosToken, kUnkToken};
  return kReserved;
}

// Stream tags keep the per-purpose random streams independent.
constexpr std::uint64_t kImageBasisStream = 0x696d616765ULL;

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng.below(i)]);
  }
}

// k distinct indices from [0, n), in draw order.
std::vector<std::size_t> sample_distinct(std::size_t n, std::size_t k,
                                         Rng& rng) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + rng.below(n - i)]);
  }
  pool.resize(k);
  return pool;
}

std::size_t draw_between(std::size_t lo, std::size_t hi, Rng& rng) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

std::vector<std::string> string_array(const ordered_json& obj, const char* key,
                                      std::size_t line_number) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) {
    throw ParseError("line " + std::to_string(line_number) + ": field '" +
                     key + "' missing or not an array");
  }
  std::vector<std::string> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw ParseError("line " + std::to_string(line_number) + ": field '" +
                       key + "' holds a non-string token");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

bool is_reserved_token(const std::string& token) {
  const auto& r = reserved_tokens();
  return std::find(r.begin(), r.end(), token) != r.end();
}

void validate_record(const ProductRecord& record) {
  if (record.short_title.empty()) {
    throw ContractError("record has an empty short title");
  }
  if (record.short_title.size() > record.long_title.size()) {
    throw ContractError("short title longer than long title (" +
                        std::to_string(record.short_title.size()) + " > " +
                        std::to_string(record.long_title.size()) + ")");
  }
  for (double v : record.image_features) {
    if (!std::isfinite(v)) {
      throw ContractError("record has a non-finite image feature");
    }
  }
}

// ---------------------------------------------------------------------------
// Vocab

Vocab::Vocab() : Vocab(std::vector<std::string>{}) {}

Vocab::Vocab(const std::vector<std::string>& tokens) {
  id_to_token_ = reserved_tokens();
  id_to_token_.insert(id_to_token_.end(), tokens.begin(), tokens.end());
  for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
    if (!token_to_id_.emplace(id_to_token_[i], static_cast<TokenId>(i))
             .second) {
      throw ContractError("duplicate vocabulary token '" + id_to_token_[i] +
                          "'");
    }
  }
}

bool Vocab::contains(const std::string& token) const {
  return token_to_id_.count(token) != 0;
}

TokenId Vocab::id(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnkId : it->second;
}

const std::string& Vocab::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw IndexError("token id " + std::to_string(id) +
                     " outside vocabulary of size " +
                     std::to_string(id_to_token_.size()));
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

std::vector<TokenId> Vocab::encode(
    const std::vector<std::string>& tokens) const {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

std::vector<std::string> Vocab::decode(std::span<const TokenId> ids,
                                       DecodeMode mode) const {
  std::vector<std::string> out;
  for (TokenId id : ids) {
    if (id == kPadId) continue;
    if (mode == DecodeMode::kStrip) {
      if (id == kEosId) break;
      if (id == kBosId) continue;
    }
    out.push_back(token(id));
  }
  return out;
}

void Vocab::save(const std::string& path) const {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& t : id_to_token_) f << t << '\n';
  if (!f) throw IoError("write failed for '" + path + "'");
}

Vocab Vocab::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open vocabulary '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) lines.push_back(line);
  const auto& reserved = reserved_tokens();
  if (lines.size() < reserved.size() ||
      !std::equal(reserved.begin(), reserved.end(), lines.begin())) {
    throw ParseError(path + ": vocabulary must start with the reserved tokens");
  }
  try {
    return Vocab(std::vector<std::string>(lines.begin() + kNumReserved,
                                          lines.end()));
  } catch (const ContractError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Vocab build_vocab(const std::vector<ProductRecord>& records, int min_freq) {
  if (min_freq < 1) throw ConfigError("min_freq must be >= 1");
  if (records.empty()) throw ContractError("cannot build a vocabulary from an empty corpus");
  std::map<std::string, std::size_t> counts;
  for (const auto& r : records) {
    for (const auto* field : {&r.long_title, &r.short_title, &r.attr_tags}) {
      for (const auto& t : *field) {
        if (!is_reserved_token(t)) ++counts[t];
      }
    }
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [token, n] : counts) {
    if (n >= static_cast<std::size_t>(min_freq)) kept.emplace_back(token, n);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  std::vector<std::string> tokens;
  tokens.reserve(kept.size());
  for (auto& [token, n] : kept) tokens.push_back(std::move(token));
  return Vocab(tokens);
}

// ---------------------------------------------------------------------------
// Synthetic corpus

SynthConfig SynthConfig::defaults() {
  SynthConfig c;
  c.brands = {"artka",  "lumina", "norvik",  "hanxi",
              "velora", "quanta", "mirelle", "taiga"};
  c.categories = {"shirt",   "skirt", "dress", "jacket",
                  "sweater", "coat",  "jeans", "hoodie"};
  c.modifier_pairs = {{"wild", "delicate"}, {"retro", "modern"},
                      {"loose", "slim"},    {"summer", "winter"},
                      {"casual", "formal"}, {"plain", "floral"}};
  c.noise_words = {"new",     "hot",     "sale",   "official", "genuine",
                   "promo",   "trendy",  "style",  "korean",   "women",
                   "2024",    "shipping", "deal",  "store",    "limited",
                   "classic", "premium", "gift",   "fashion",  "brand"};
  c.extra_tags = {"round-neck", "long-sleeve", "pullover",
                  "commuting",  "off-white",   "cotton"};
  return c;
}

void SynthConfig::validate() const {
  if (brands.empty() || categories.empty()) {
    throw ConfigError("synth: brand and category pools must be nonempty");
  }
  std::set<std::string> seen;
  auto check_pool = [&seen](const std::string& t) {
    if (t.empty()) throw ConfigError("synth: empty token in a pool");
    if (is_reserved_token(t)) {
      throw ConfigError("synth: pool token '" + t + "' is reserved");
    }
    if (!seen.insert(t).second) {
      throw ConfigError("synth: token '" + t + "' appears in two pools");
    }
  };
  for (const auto& t : brands) check_pool(t);
  for (const auto& t : categories) check_pool(t);
  for (const auto& [a, b] : modifier_pairs) {
    check_pool(a);
    check_pool(b);
  }
  for (const auto& t : noise_words) check_pool(t);
  for (const auto& t : extra_tags) check_pool(t);

  auto range = [](const char* what, std::size_t lo, std::size_t hi,
                  std::size_t available) {
    if (lo > hi) {
      throw ConfigError(std::string("synth: unsatisfiable ") + what +
                        " range [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
    }
    if (hi > available) {
      throw ConfigError(std::string("synth: unsatisfiable ") + what +
                        " range: at most " + std::to_string(available) +
                        " available, asked for up to " + std::to_string(hi));
    }
  };
  range("modifier", min_modifiers, max_modifiers, modifier_pairs.size());
  range("noise word", min_noise_words, max_noise_words, noise_words.size());
  range("extra tag", min_extra_tags, max_extra_tags, extra_tags.size());
  if (image_dim == 0) throw ConfigError("synth: image_dim must be positive");
  if (!(noise_prob >= 0.0 && noise_prob <= 1.0)) {
    throw ConfigError("synth: noise_prob must lie in [0, 1]");
  }
  if (!(image_noise >= 0.0) || !std::isfinite(image_noise)) {
    throw ConfigError("synth: image_noise must be finite and >= 0");
  }
}

std::vector<std::string> canonical_short_title(
    const SynthConfig& config, const std::string& brand,
    const std::vector<std::string>& modifiers, const std::string& category) {
  std::vector<std::string> out{brand};
  for (const auto& [a, b] : config.modifier_pairs) {
    for (const auto* m : {&a, &b}) {
      if (std::find(modifiers.begin(), modifiers.end(), *m) !=
          modifiers.end()) {
        out.push_back(*m);
      }
    }
  }
  out.push_back(category);
  return out;
}

std::vector<ProductRecord> synth_generate(const SynthConfig& config) {
  config.validate();
  const std::size_t z = config.image_dim;

  // One basis vector per category; independent of the record seed so that a
  // category keeps its "look" across corpora.
  std::vector<std::vector<double>> basis(config.categories.size());
  for (std::size_t c = 0; c < basis.size(); ++c) {
    Rng rng(derive_seed(kImageBasisStream, c));
    basis[c].resize(z);
    for (double& v : basis[c]) v = rng.normal();
  }

  Rng rng(config.seed);
  std::vector<ProductRecord> records;
  records.reserve(config.n_records);
  for (std::size_t r = 0; r < config.n_records; ++r) {
    const std::string& brand = config.brands[rng.below(config.brands.size())];
    const std::size_t cat = rng.below(config.categories.size());
    const std::string& category = config.categories[cat];

    const std::size_t n_mods =
        draw_between(config.min_modifiers, config.max_modifiers, rng);
    std::vector<std::string> modifiers;
    std::vector<std::string> partners;
    for (std::size_t p :
         sample_distinct(config.modifier_pairs.size(), n_mods, rng)) {
      const auto& pair = config.modifier_pairs[p];
      const bool first = rng.bernoulli(0.5);
      modifiers.push_back(first ? pair.first : pair.second);
      partners.push_back(first ? pair.second : pair.first);
    }

    ProductRecord rec;
    rec.short_title = canonical_short_title(config, brand, modifiers, category);
    rec.long_title = rec.short_title;
    const std::size_t n_noise =
        draw_between(config.min_noise_words, config.max_noise_words, rng);
    for (std::size_t i :
         sample_distinct(config.noise_words.size(), n_noise, rng)) {
      rec.long_title.push_back(config.noise_words[i]);
    }
    // Drawn unconditionally so that noise_prob does not shift the stream.
    const double u = rng.uniform();
    const std::size_t which = partners.empty() ? 0 : rng.below(partners.size());
    if (!partners.empty() && u < config.noise_prob) {
      rec.long_title.push_back(partners[which]);
    }
    shuffle(rec.long_title, rng);

    rec.attr_tags = modifiers;
    rec.attr_tags.push_back(category);
    const std::size_t n_extra =
        draw_between(config.min_extra_tags, config.max_extra_tags, rng);
    for (std::size_t i :
         sample_distinct(config.extra_tags.size(), n_extra, rng)) {
      rec.attr_tags.push_back(config.extra_tags[i]);
    }
    shuffle(rec.attr_tags, rng);

    rec.image_features.resize(z);
    for (std::size_t k = 0; k < z; ++k) {
      rec.image_features[k] = basis[cat][k] + config.image_noise * rng.normal();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

// ---------------------------------------------------------------------------
// Corpus files

std::string record_to_line(const ProductRecord& record) {
  ordered_json j;
  j["long_title"] = record.long_title;
  j["short_title"] = record.short_title;
  j["attr_tags"] = record.attr_tags;
  j["image_features"] = record.image_features;
  return j.dump();
}

ProductRecord record_from_line(const std::string& line,
                               std::size_t line_number) {
  const std::string where = "line " + std::to_string(line_number);
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(where + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(where + ": expected a JSON object");
  ProductRecord rec;
  rec.long_title = string_array(j, "long_title", line_number);
  rec.short_title = string_array(j, "short_title", line_number);
  rec.attr_tags = string_array(j, "attr_tags", line_number);
  auto it = j.find("image_features");
  if (it == j.end() || !it->is_array()) {
    throw ParseError(where + ": field 'image_features' missing or not an array");
  }
  for (const auto& v : *it) {
    if (!v.is_number()) {
      throw ParseError(where + ": non-numeric image feature");
    }
    rec.image_features.push_back(v.get<double>());
  }
  try {
    validate_record(rec);
  } catch (const ContractError& e) {
    throw ParseError(where + ": " + e.what());
  }
  return rec;
}

void save_corpus(const std::vector<ProductRecord>& records,
                 const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& r : records) f << record_to_line(r) << '\n';
  if (!f) throw IoError("write failed for '" + path + "'");
}

std::vector<ProductRecord> load_corpus(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open corpus '" + path + "'");
  std::vector<ProductRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(f, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(record_from_line(line, line_number));
    if (records.back().image_features.size() !=
        records.front().image_features.size()) {
      throw ParseError(path + ": line " + std::to_string(line_number) +
                       ": image feature length " +
                       std::to_string(records.back().image_features.size()) +
                       " differs from " +
                       std::to_string(records.front().image_features.size()));
    }
  }
  return records;
}

SplitIndices split_indices(std::size_t n, std::uint64_t seed,
                           double valid_fraction, double test_fraction) {
  if (valid_fraction < 0 || test_fraction < 0 ||
      valid_fraction + test_fraction > 1.0) {
    throw ConfigError("split fractions must be nonnegative and sum to <= 1");
  }
  std::vector<std::pair<std::uint64_t, std::size_t>> ranked(n);
  for (std::size_t i = 0; i < n; ++i) ranked[i] = {derive_seed(seed, i), i};
  std::sort(ranked.begin(), ranked.end());
  const auto count = [n](double fraction) {
    return static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * fraction + 1e-9));
  };
  const std::size_t n_valid = count(valid_fraction);
  const std::size_t n_test = count(test_fraction);
  SplitIndices out;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t idx = ranked[k].second;
    if (k < n_valid) {
      out.valid.push_back(idx);
    } else if (k < n_valid + n_test) {
      out.test.push_back(idx);
    } else {
      out.train.push_back(idx);
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.valid.begin(), out.valid.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace titlegan
