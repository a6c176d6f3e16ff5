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

#ifndef GNR_MODEL_HPP
#define GNR_MODEL_HPP

// Conjunction-model imputer: an amortized Gaussian encoder q(z | x_obs) and two
// parameter-disjoint decoders, p(x | z) (Gaussian) and p(m | z) (Bernoulli),
// fitted by maximizing an importance-weighted bound on log p(x_obs, m) whose
// mask likelihood is tempered by alpha.

#include "gnr/autodiff.hpp"
#include "gnr/missing.hpp"
#include "gnr/rng.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gnr {

enum class EncoderVariant { zero_impute, set_function };

/// parallel: the mask decoder reads z (conjunction model).
/// serial: a single dense+sigmoid layer reads the decoded data mean
/// (selection-model baseline).
enum class MaskPathway { parallel, serial };

std::string to_string(EncoderVariant v);
std::string to_string(MaskPathway p);
EncoderVariant parse_encoder_variant(const std::string& text);
MaskPathway parse_mask_pathway(const std::string& text);

struct GnrConfig {
  std::size_t latent_dim = 1;
  std::vector<std::size_t> hidden_sizes{128, 128};
  std::size_t importance_samples = 20;   // K, training
  std::size_t imputation_samples = 1000; // L, imputation
  double alpha = 1.0;
  double learning_rate = 1e-3;
  std::size_t iterations = 10000;
  std::size_t batch_size = 128;
  EncoderVariant encoder = EncoderVariant::zero_impute;
  std::size_t embedding_size = 20;
  std::size_t code_size = 50;
  MaskPathway mask_pathway = MaskPathway::parallel;
  /// Rating mode squashes the data-mean head into [rating_low, rating_high].
  bool rating_mode = false;
  double rating_low = 0.0;
  double rating_high = 1.0;
  std::uint64_t seed = 0;
  /// Iterations between training-trace entries.
  std::size_t log_interval = 100;

  void validate() const;
};

inline constexpr double kStdFloor = 1e-3;
inline constexpr double kStdCap = 1e3;
inline constexpr double kProbFloor = 1e-6;

struct DenseLayer {
  Tensor weights;  // in x out
  Tensor bias;     // 1 x out
};

struct ParamBlock {
  std::vector<DenseLayer> layers;
  /// Per-feature embedding of the set-function encoder (features x
  /// embedding_size); empty otherwise.
  Tensor embedding;
};

/// Layer layout per block:
///   encoder       zero_impute: trunk..., mean head, std head
///                 set_function: element map (1+E -> C), mean head, std head
///   data_decoder  trunk..., mean head, std head
///   mask_decoder  parallel: trunk..., logit head; serial: one d -> d layer
struct GnrParams {
  std::size_t features = 0;
  ParamBlock encoder;       // gamma
  ParamBlock data_decoder;  // phi1
  ParamBlock mask_decoder;  // phi2

  std::size_t parameter_count() const;
  Vector flatten() const;
  void assign(const Vector& flat);
};

/// Visits every tensor in canonical order: encoder, data decoder, mask decoder;
/// within a block the embedding first, then weights and bias per layer.
void for_each_tensor(GnrParams& params, const std::function<void(Tensor&)>& fn);
void for_each_tensor(const GnrParams& params, const std::function<void(const Tensor&)>& fn);

GnrParams init_params(const GnrConfig& config, std::size_t features, SeededRng& rng);

struct LatentBatch {
  Tensor mean;     // rows x latent
  Tensor std;      // rows x latent
  Tensor noise;    // (rows*draws) x latent
  Tensor samples;  // (rows*draws) x latent, mean + std * noise
  std::size_t draws = 0;
};

/// All tensors are rows x K.
struct ImportanceWeightSet {
  Tensor log_w;
  Tensor normalized;
  Tensor data_term;
  Tensor mask_term;  // already multiplied by alpha
  Tensor prior_term;
  Tensor posterior_term;  // log q(z | x_obs), entering log_w with a minus sign
};

struct ImputationResult {
  CompleteMatrix imputed;
  Tensor probabilistic_mask;
  std::vector<CompleteMatrix> draws;
  /// Posterior means of z per row.
  Tensor latent_mean;
  /// rows x L self-normalized weights; filled on request only.
  Tensor weights;
};

struct TrainingLog {
  std::vector<std::size_t> iterations;
  /// Entry 0 is the bound at iteration 0; later entries average the minibatch
  /// bound over the preceding interval.
  std::vector<double> bound;
};

struct TrainedModel {
  GnrConfig config;
  GnrParams params;
  TrainingLog log;
};

// -- Differentiable pieces --------------------------------------------------

struct LayerVars {
  ad::Var weights;
  ad::Var bias;
};

struct BlockVars {
  std::vector<LayerVars> layers;
  ad::Var embedding;
  bool has_embedding = false;
};

struct ParamVars {
  BlockVars encoder;
  BlockVars data_decoder;
  BlockVars mask_decoder;
};

/// Puts params on the graph; trainable leaves when `trainable`.
ParamVars bind(ad::Graph& graph, const GnrParams& params, bool trainable);
/// Gradients of the last backward() in GnrParams layout.
GnrParams gradients(const ParamVars& vars, const GnrParams& shape);

struct EncoderVars {
  ad::Var mean;
  ad::Var std;
};
struct DataDecoderVars {
  ad::Var mean;
  ad::Var std;
};

EncoderVars encode(ad::Graph& g, const ParamVars& p, const IncompleteMatrix& x_obs, const GnrConfig& config);
DataDecoderVars decode_data(ad::Graph& g, const ParamVars& p, ad::Var z, const GnrConfig& config);
/// For the serial pathway `data_mean` must be the decoded data mean of z.
ad::Var decode_mask(ad::Graph& g, const ParamVars& p, ad::Var z, ad::Var data_mean, const GnrConfig& config);

/// The four log-terms and log_w, each (rows*K) x 1.
struct BoundTerms {
  ad::Var data;
  ad::Var mask;
  ad::Var prior;
  ad::Var posterior;
  ad::Var log_w;
  ad::Var z;
  ad::Var data_mean;
  ad::Var data_std;
  ad::Var mask_prob;  // default Var when the mask pathway was skipped
  bool mask_evaluated = false;
};

/// Terms for explicitly supplied latent draws. mean_rep/std_rep are the
/// posterior parameters repeated K times per row, z the draws themselves.
BoundTerms bound_terms_at(ad::Graph& g, const ParamVars& p, const IncompleteMatrix& x_obs, ad::Var mean_rep,
                          ad::Var std_rep, ad::Var z, std::size_t draws, const GnrConfig& config,
                          bool skip_untempered_mask = false);

/// Builds log w_k for every row and draw. noise is (rows*K) x latent. When
/// `skip_untempered_mask` and alpha == 0 the mask pathway is not evaluated and
/// the mask term is the constant 0.
BoundTerms bound_terms(ad::Graph& g, const ParamVars& p, const IncompleteMatrix& x_obs, const Tensor& noise,
                       std::size_t draws, const GnrConfig& config, bool skip_untempered_mask = false);
/// Batch mean of log((1/K) sum_k w_k).
ad::Var bound_from_log_weights(ad::Var log_w, std::size_t rows, std::size_t draws);

// -- Tensor-level operations ------------------------------------------------

/// (mean_z, std_z) for every row.
std::pair<Tensor, Tensor> encode(const IncompleteMatrix& x_obs, const GnrParams& params, const GnrConfig& config);
LatentBatch sample_latent(const Tensor& mean, const Tensor& std, std::size_t draws, SeededRng& rng);
std::pair<Tensor, Tensor> decode_data(const Tensor& z, const GnrParams& params, const GnrConfig& config);
Tensor decode_mask(const Tensor& z, const GnrParams& params, const GnrConfig& config);

/// Throws ErrorCode::numeric naming the first non-finite component.
ImportanceWeightSet importance_log_weights(const IncompleteMatrix& x_obs, const LatentBatch& latent,
                                           const GnrParams& params, const GnrConfig& config);
/// Monte Carlo estimate of the bound from explicit standard-normal noise
/// ((rows*K) x latent).
double gnr_bound(const IncompleteMatrix& x_obs, const GnrParams& params, const GnrConfig& config,
                 const Tensor& noise, std::size_t draws);
double gnr_bound(const IncompleteMatrix& x_obs, const GnrParams& params, const GnrConfig& config, SeededRng& rng);

enum class BoundComponent { bound, data, mask, prior, posterior };
/// Gradient of the batch-summed component (or of the bound) w.r.t. all params.
GnrParams component_gradient(const IncompleteMatrix& x_obs, const GnrParams& params, const GnrConfig& config,
                             const Tensor& noise, std::size_t draws, BoundComponent component);

/// Maximizes the bound with Adam. Throws ErrorCode::numeric with the iteration
/// and offending component if the bound becomes non-finite. `progress`, when
/// set, is called after every iteration.
TrainedModel train(const IncompleteMatrix& dataset, const GnrConfig& config,
                   const std::function<void(std::size_t, double)>& progress = {});

struct ImputeOptions {
  bool keep_weights = false;
};

/// Self-normalized importance-sampling imputation with L draws per row.
/// Observed entries are copied bit-exactly from the input.
ImputationResult impute(const IncompleteMatrix& x_obs, const GnrParams& params, const GnrConfig& config,
                        const ImputeOptions& options = {});
/// Sampling-importance-resampling: n_draws completed matrices, each drawing a
/// latent index per row with probability equal to its normalized weight, then
/// x_mis from the data decoder at that latent. Uses the same latent draws as
/// impute().
std::vector<CompleteMatrix> multiple_impute(const IncompleteMatrix& x_obs, const GnrParams& params,
                                            const GnrConfig& config, std::size_t n_draws);

}  // namespace gnr

#endif  // GNR_MODEL_HPP
