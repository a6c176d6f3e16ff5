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

#ifndef GNR_MASK_SYNTH_HPP
#define GNR_MASK_SYNTH_HPP

#include "gnr/missing.hpp"
#include "gnr/rng.hpp"

#include <string>
#include <vector>

namespace gnr {

enum class MissingKind { mcar, self_mask, star, mixed };

/// A missingness mechanism.
///
///   mcar       every entry missing independently with `probability`
///   self_mask  entries of `features` strictly above their column mean are
///              missing with `probability`
///   star       feature 0 missing where above its mean, feature 1 missing where
///              below its mean, both with certainty
///   mixed      union of mcar(`mcar_probability`) over all features and
///              self_mask(`probability`) over `features`
///
/// An empty `features` list means the first ceil(d/2) features.
struct MissingSpec {
  MissingKind kind = MissingKind::self_mask;
  double probability = 0.8;
  std::vector<std::size_t> features;
  double mcar_probability = 0.0;

  void validate(std::size_t d) const;
  std::vector<std::size_t> resolved_features(std::size_t d) const;
  /// Short column label used in reports, e.g. "self_mask:0.8".
  std::string label() const;
};

MissingKind parse_missing_kind(const std::string& text);
std::string to_string(MissingKind kind);
/// Parses a report label back into a spec ("mcar:0.2", "self_mask:0.8",
/// "star", "mixed:0.8:0.2").
MissingSpec parse_missing_label(const std::string& label);

std::vector<std::size_t> default_self_mask_features(std::size_t d);

/// n i.i.d. rows of N(mean, cov) via the Cholesky factor of cov. Throws
/// ErrorCode::numeric when cov is not symmetric positive definite.
CompleteMatrix gaussian_synth(std::size_t n, const Vector& mean, const Tensor& cov, SeededRng& rng);

/// Unit-variance covariance with `correlation` on every off-diagonal.
Tensor equicorrelated_cov(std::size_t d, double correlation);

Mask mcar_mask(std::size_t n, std::size_t d, double p_miss, SeededRng& rng);
Mask self_mask(const CompleteMatrix& x, const std::vector<std::size_t>& features, double k, SeededRng& rng);
Mask star_mask(const CompleteMatrix& x, SeededRng& rng);
Mask mixed_mask(const CompleteMatrix& x, const std::vector<std::size_t>& features, double k_mnar, double p_mcar,
                SeededRng& rng);
Mask apply_missing(const CompleteMatrix& x, const MissingSpec& spec, SeededRng& rng);

}  // namespace gnr

#endif  // GNR_MASK_SYNTH_HPP
