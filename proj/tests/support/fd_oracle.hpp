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

#ifndef GNR_TESTS_FD_ORACLE_HPP
#define GNR_TESTS_FD_ORACLE_HPP

// Central finite-difference oracle for the differentiation engine.

#include "gnr/autodiff.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gnr::testing {

/// Builds the primitive's output from one graph leaf per input tensor.
using Builder = std::function<ad::Var(ad::Graph&, const std::vector<ad::Var>&)>;

struct Instance {
  std::vector<Tensor> inputs;
  Builder build;
};

struct PrimitiveCase {
  std::string name;
  /// Draws a random instance.
  std::function<Instance(SeededRng&)> draw;
};

/// Every differentiable primitive with a domain-respecting instance sampler.
std::vector<PrimitiveCase> primitive_cases();

/// Evaluates sum(out * projection) for a fixed random projection.
double projected_value(const Instance& inst, const Tensor& projection, const std::vector<Tensor>& inputs);

/// Relative error ||analytic - numeric|| / max(||analytic||, ||numeric||) over
/// all inputs, with central differences of step h. Both norms below 1e-10
/// count as agreement.
double gradient_error(const Instance& inst, SeededRng& rng, double h = 1e-4);

struct CaseResult {
  std::string name;
  int instances = 0;
  int passed = 0;
  double worst = 0.0;
};

CaseResult check_case(const PrimitiveCase& c, int instances, double tolerance, std::uint64_t seed);

}  // namespace gnr::testing

#endif  // GNR_TESTS_FD_ORACLE_HPP
