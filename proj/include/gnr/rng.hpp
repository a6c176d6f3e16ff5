// Copyright 2026 The gnrimpute Authors
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

#ifndef GNR_RNG_HPP
#define GNR_RNG_HPP

#include "gnr/tensor.hpp"

#include <cstdint>
#include <span>
#include <string_view>

namespace gnr {

/// Counter-based random source. Output i is SplitMix64's finalizer applied to
/// seed + i * 0x9E3779B97F4A7C15, so a stream is fully determined by
/// (seed, counter) on every platform. Normals use the Box-Muller transform on
/// two consecutive uniforms; both outputs are used.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform integer on [0, n); n must be positive.
  std::uint64_t index(std::uint64_t n);

  Tensor normal_tensor(Eigen::Index rows, Eigen::Index cols);
  template <class T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(index(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  /// Independent stream keyed by an integer, e.g. a row index or seed slot.
  SeededRng substream(std::uint64_t key) const;
  /// Independent stream keyed by a purpose label such as "init" or "noise".
  SeededRng substream(std::string_view label) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace gnr

#endif  // GNR_RNG_HPP
