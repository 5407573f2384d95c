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

#ifndef TITLEGAN_PARAMS_H_
#define TITLEGAN_PARAMS_H_

#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>

#include "rng.h"
#include "tensor.h"

namespace titlegan {

struct Param {
  Tensor value;
  Tensor grad;
  // Adam moment accumulators, allocated lazily.
  Tensor first_moment;
  Tensor second_moment;
};

// Named learnable tensors with their gradient accumulators. Iteration order
// is lexicographic by name, which fixes the order of every reduction over
// parameters.
class ParamStore {
 public:
  Param& add(const std::string& name, Tensor init);
  // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  Param& add_uniform(const std::string& name, std::size_t rows,
                     std::size_t cols, std::size_t fan_in, Rng& rng);

  bool contains(const std::string& name) const;
  Param& at(const std::string& name);
  const Param& at(const std::string& name) const;
  const Tensor& value(const std::string& name) const { return at(name).value; }
  Tensor& mutable_value(const std::string& name) { return at(name).value; }

  std::map<std::string, Param>& params() { return params_; }
  const std::map<std::string, Param>& params() const { return params_; }
  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();
  std::uint64_t step() const { return step_; }
  void set_step(std::uint64_t step) { step_ = step; }

  bool values_bit_equal(const ParamStore& other) const;

 private:
  std::map<std::string, Param> params_;
  std::uint64_t step_ = 0;
};

struct OptimizerConfig {
  enum class Kind { kSgd, kAdam };
  Kind kind = Kind::kSgd;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Applies one update from the accumulated gradients and increments the store
// step counter. Throws NumericError naming the first parameter whose
// gradient holds a NaN or infinity; in that case no parameter is modified.
void optimizer_step(ParamStore& store, const OptimizerConfig& config);

double global_grad_norm(const ParamStore& store);
// Rescales all gradients so their global L2 norm is at most max_norm.
// Returns the norm before clipping. max_norm <= 0 disables clipping.
double clip_grad_norm(ParamStore& store, double max_norm);
void scale_grads(ParamStore& store, double factor);

// ---------------------------------------------------------------------------
// Checkpoint container.
//
// Layout (all integers and floats little-endian):
//   8 bytes   magic "TGCKPT\0\1"
//   u32       format version
//   u64       rng seed
//   u64       step counter
//   u32       tensor count
//   per tensor, in name order:
//     u32 name length, name bytes (UTF-8)
//     u32 rank (always 2), u64 rows, u64 cols
//     rows*cols IEEE-754 binary64 values

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::map<std::string, Tensor> tensors;
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
};

Checkpoint make_checkpoint(std::initializer_list<const ParamStore*> stores,
                           std::uint64_t seed);
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

// Copies every parameter of store from the checkpoint. Throws ConfigError
// when a name is missing and DimensionError (expected vs found) on a shape
// mismatch; the store is unchanged on failure.
void restore(ParamStore& store, const Checkpoint& checkpoint);

}  // namespace titlegan

#endif  // TITLEGAN_PARAMS_H_
