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

#ifndef GNR_TENSOR_HPP
#define GNR_TENSOR_HPP

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>

namespace gnr {

// Dense row-major matrix of reals. Every numeric buffer in the library uses
// this layout, so a (batch x K x dim) block is stored as (batch*K) x dim with
// draw k of row b at row b*K + k.
using Tensor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline Tensor zeros(Eigen::Index rows, Eigen::Index cols) { return Tensor::Zero(rows, cols); }

inline bool all_finite(const Tensor& t) { return t.allFinite(); }

}  // namespace gnr

#endif  // GNR_TENSOR_HPP
