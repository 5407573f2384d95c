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

#include "params.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "errors.h"

namespace titlegan {

Param& ParamStore::add(const std::string& name, Tensor init) {
  if (params_.count(name) != 0) {
    throw ConfigError("duplicate parameter name '" + name + "'");
  }
  Param p;
  p.grad = Tensor(init.rows(), init.cols());
  p.value = std::move(init);
  return params_.emplace(name, std::move(p)).first->second;
}

Param& ParamStore::add_uniform(const std::string& name, std::size_t rows,
                               std::size_t cols, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Tensor t(rows, cols);
  for (double& v : t.data()) v = rng.uniform(-bound, bound);
  return add(name, std::move(t));
}

bool ParamStore::contains(const std::string& name) const {
  return params_.count(name) != 0;
}

Param& ParamStore::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) {
    throw ConfigError("unknown parameter '" + name + "'");
  }
  return it->second;
}

const Param& ParamStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) {
    throw ConfigError("unknown parameter '" + name + "'");
  }
  return it->second;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, p] : params_) n += p.value.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& [name, p] : params_) {
    if (!p.grad.same_shape(p.value)) {
      p.grad = Tensor(p.value.rows(), p.value.cols());
    } else {
      p.grad.fill(0.0);
    }
  }
}

bool ParamStore::values_bit_equal(const ParamStore& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (const auto& [name, p] : params_) {
    auto it = other.params_.find(name);
    if (it == other.params_.end() || !p.value.bit_equal(it->second.value)) {
      return false;
    }
  }
  return true;
}

void optimizer_step(ParamStore& store, const OptimizerConfig& config) {
  for (const auto& [name, p] : store.params()) {
    if (!p.grad.all_finite()) {
      throw NumericError("non-finite gradient in parameter '" + name + "'");
    }
  }
  const std::uint64_t t = store.step() + 1;
  for (auto& [name, p] : store.params()) {
    if (config.kind == OptimizerConfig::Kind::kSgd) {
      for (std::size_t i = 0; i < p.value.size(); ++i) {
        p.value[i] -= config.learning_rate * p.grad[i];
      }
      continue;
    }
    if (!p.first_moment.same_shape(p.value)) {
      p.first_moment = Tensor(p.value.rows(), p.value.cols());
      p.second_moment = Tensor(p.value.rows(), p.value.cols());
    }
    const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      double& m = p.first_moment[i];
      double& v = p.second_moment[i];
      m = config.beta1 * m + (1.0 - config.beta1) * g;
      v = config.beta2 * v + (1.0 - config.beta2) * g * g;
      p.value[i] -= config.learning_rate * (m / c1) /
                    (std::sqrt(v / c2) + config.epsilon);
    }
  }
  store.set_step(t);
}

double global_grad_norm(const ParamStore& store) {
  double total = 0.0;
  for (const auto& [name, p] : store.params()) {
    for (double g : p.grad.data()) total += g * g;
  }
  return std::sqrt(total);
}

double clip_grad_norm(ParamStore& store, double max_norm) {
  const double norm = global_grad_norm(store);
  if (max_norm > 0.0 && norm > max_norm) scale_grads(store, max_norm / norm);
  return norm;
}

void scale_grads(ParamStore& store, double factor) {
  for (auto& [name, p] : store.params()) {
    for (double& g : p.grad.data()) g *= factor;
  }
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kMagic[8] = {'T', 'G', 'C', 'K', 'P', 'T', '\0', '\1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

class Reader {
 public:
  Reader(const std::string& bytes, const std::string& path)
      : bytes_(bytes), path_(path) {}

  std::uint64_t u64() { return read_le(8); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(read_le(4)); }
  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::uint64_t read_le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(
               static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  void need(std::size_t n) {
    if (bytes_.size() - pos_ < n) {
      throw ParseError(path_ + ": truncated checkpoint at byte " +
                       std::to_string(pos_));
    }
  }

  const std::string& bytes_;
  const std::string& path_;
  std::size_t pos_ = 0;
};

}  // namespace

Checkpoint make_checkpoint(std::initializer_list<const ParamStore*> stores,
                           std::uint64_t seed) {
  Checkpoint ckpt;
  ckpt.seed = seed;
  for (const ParamStore* store : stores) {
    ckpt.step = std::max(ckpt.step, store->step());
    for (const auto& [name, p] : store->params()) {
      if (!ckpt.tensors.emplace(name, p.value).second) {
        throw ConfigError("parameter '" + name + "' appears in two stores");
      }
    }
  }
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::string out(kMagic, sizeof(kMagic));
  put_u32(out, kCheckpointVersion);
  put_u64(out, checkpoint.seed);
  put_u64(out, checkpoint.step);
  put_u32(out, static_cast<std::uint32_t>(checkpoint.tensors.size()));
  for (const auto& [name, t] : checkpoint.tensors) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_u32(out, 2);
    put_u64(out, t.rows());
    put_u64(out, t.cols());
    for (double v : t.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(f)),
                          std::istreambuf_iterator<char>());
  Reader in(bytes, path);
  if (in.str(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw ParseError(path + ": not a checkpoint file (bad magic)");
  }
  const std::uint32_t version = in.u32();
  if (version != kCheckpointVersion) {
    throw ParseError(path + ": unsupported checkpoint version " +
                     std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.seed = in.u64();
  ckpt.step = in.u64();
  const std::uint32_t count = in.u32();
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::string name = in.str(in.u32());
    const std::uint32_t rank = in.u32();
    if (rank != 2) {
      throw ParseError(path + ": tensor '" + name + "' has unsupported rank " +
                       std::to_string(rank));
    }
    const std::uint64_t rows = in.u64();
    const std::uint64_t cols = in.u64();
    if (cols != 0 && rows > (bytes.size() / 8) / cols) {
      throw ParseError(path + ": tensor '" + name + "' shape exceeds file");
    }
    std::vector<double> data(rows * cols);
    for (double& v : data) v = std::bit_cast<double>(in.u64());
    ckpt.tensors.emplace(name, Tensor(rows, cols, std::move(data)));
  }
  if (!in.done()) throw ParseError(path + ": trailing bytes after tensors");
  return ckpt;
}

void restore(ParamStore& store, const Checkpoint& checkpoint) {
  for (const auto& [name, p] : store.params()) {
    auto it = checkpoint.tensors.find(name);
    if (it == checkpoint.tensors.end()) {
      throw ConfigError("checkpoint is missing parameter '" + name + "'");
    }
    if (!it->second.same_shape(p.value)) {
      throw DimensionError("parameter '" + name + "': expected " +
                           p.value.shape_string() + ", found " +
                           it->second.shape_string());
    }
  }
  for (auto& [name, p] : store.params()) {
    p.value = checkpoint.tensors.at(name);
    p.grad = Tensor(p.value.rows(), p.value.cols());
  }
  store.set_step(checkpoint.step);
}

}  // namespace titlegan
