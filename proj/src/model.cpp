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

#include "gnr/model.hpp"

#include "gnr/error.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace gnr {

namespace {

// Every iteration allocates and frees the same multi-megabyte tensors. With
// glibc defaults each of them is a fresh mmap, and page faults dominate the
// run time.
void keep_large_blocks_resident() {
#if defined(__GLIBC__)
  static const bool once = [] {
    mallopt(M_MMAP_THRESHOLD, 256 << 20);
    mallopt(M_TRIM_THRESHOLD, 512 << 20);
    return true;
  }();
  (void)once;
#endif
}

}  // namespace

using ad::Activation;
using ad::Axis;
using ad::Graph;
using ad::Var;

std::string to_string(EncoderVariant v) { return v == EncoderVariant::zero_impute ? "zero_impute" : "set_function"; }
std::string to_string(MaskPathway p) { return p == MaskPathway::parallel ? "parallel" : "serial"; }

EncoderVariant parse_encoder_variant(const std::string& text) {
  if (text == "zero_impute") return EncoderVariant::zero_impute;
  if (text == "set_function") return EncoderVariant::set_function;
  fail(ErrorCode::invalid_argument, "unknown encoder variant '" + text + "'");
}

MaskPathway parse_mask_pathway(const std::string& text) {
  if (text == "parallel") return MaskPathway::parallel;
  if (text == "serial") return MaskPathway::serial;
  fail(ErrorCode::invalid_argument, "unknown mask pathway '" + text + "'");
}

void GnrConfig::validate() const {
  auto check = [](bool ok, const char* what) { require(ok, ErrorCode::invalid_argument, what); };
  check(latent_dim >= 1, "latent_dim must be >= 1");
  check(importance_samples >= 1, "K (importance_samples) must be >= 1");
  check(imputation_samples >= 1, "L (imputation_samples) must be >= 1");
  check(std::isfinite(alpha) && alpha >= 0.0, "alpha must be finite and >= 0");
  check(std::isfinite(learning_rate) && learning_rate > 0.0, "learning_rate must be positive");
  check(batch_size >= 1, "batch_size must be >= 1");
  check(log_interval >= 1, "log_interval must be >= 1");
  check(std::all_of(hidden_sizes.begin(), hidden_sizes.end(), [](std::size_t h) { return h > 0; }),
        "hidden sizes must be positive");
  check(embedding_size >= 1 && code_size >= 1, "embedding and code sizes must be >= 1");
  check(rating_high > rating_low, "rating_high must exceed rating_low");
}

// -- parameters ---------------------------------------------------------------

namespace {

void visit_block(ParamBlock& block, const std::function<void(Tensor&)>& fn) {
  if (block.embedding.size() > 0) fn(block.embedding);
  for (auto& layer : block.layers) {
    fn(layer.weights);
    fn(layer.bias);
  }
}

void visit_block(const ParamBlock& block, const std::function<void(const Tensor&)>& fn) {
  if (block.embedding.size() > 0) fn(block.embedding);
  for (const auto& layer : block.layers) {
    fn(layer.weights);
    fn(layer.bias);
  }
}

DenseLayer make_layer(std::size_t in, std::size_t out, SeededRng& rng) {
  const auto i = static_cast<Eigen::Index>(in);
  const auto o = static_cast<Eigen::Index>(out);
  return {ad::glorot_uniform(i, o, rng), Tensor::Zero(1, o)};
}

// Trunk of tanh layers followed by `heads` output layers of width `out`.
std::vector<DenseLayer> make_mlp(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out,
                                 std::size_t heads, SeededRng& rng) {
  std::vector<DenseLayer> layers;
  std::size_t width = in;
  for (const auto h : hidden) {
    layers.push_back(make_layer(width, h, rng));
    width = h;
  }
  for (std::size_t k = 0; k < heads; ++k) layers.push_back(make_layer(width, out, rng));
  return layers;
}

}  // namespace

void for_each_tensor(GnrParams& params, const std::function<void(Tensor&)>& fn) {
  visit_block(params.encoder, fn);
  visit_block(params.data_decoder, fn);
  visit_block(params.mask_decoder, fn);
}

void for_each_tensor(const GnrParams& params, const std::function<void(const Tensor&)>& fn) {
  visit_block(params.encoder, fn);
  visit_block(params.data_decoder, fn);
  visit_block(params.mask_decoder, fn);
}

std::size_t GnrParams::parameter_count() const {
  std::size_t n = 0;
  for_each_tensor(*this, [&](const Tensor& t) { n += static_cast<std::size_t>(t.size()); });
  return n;
}

Vector GnrParams::flatten() const {
  Vector flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index offset = 0;
  for_each_tensor(*this, [&](const Tensor& t) {
    flat.segment(offset, t.size()) = Eigen::Map<const Vector>(t.data(), t.size());
    offset += t.size();
  });
  return flat;
}

void GnrParams::assign(const Vector& flat) {
  if (flat.size() != static_cast<Eigen::Index>(parameter_count()))
    fail(ErrorCode::dimension, "flat parameter vector has the wrong length");
  Eigen::Index offset = 0;
  for_each_tensor(*this, [&](Tensor& t) {
    Eigen::Map<Vector>(t.data(), t.size()) = flat.segment(offset, t.size());
    offset += t.size();
  });
}

GnrParams init_params(const GnrConfig& config, std::size_t features, SeededRng& rng) {
  config.validate();
  require(features >= 1, ErrorCode::dimension, "model needs at least one feature");
  GnrParams p;
  p.features = features;
  const auto latent = config.latent_dim;
  if (config.encoder == EncoderVariant::zero_impute) {
    p.encoder.layers = make_mlp(features, config.hidden_sizes, latent, 2, rng);
  } else {
    p.encoder.embedding = ad::glorot_uniform(static_cast<Eigen::Index>(features),
                                             static_cast<Eigen::Index>(config.embedding_size), rng);
    p.encoder.layers.push_back(make_layer(1 + config.embedding_size, config.code_size, rng));
    p.encoder.layers.push_back(make_layer(config.code_size, latent, rng));
    p.encoder.layers.push_back(make_layer(config.code_size, latent, rng));
  }
  p.data_decoder.layers = make_mlp(latent, config.hidden_sizes, features, 2, rng);
  if (config.mask_pathway == MaskPathway::parallel) {
    p.mask_decoder.layers = make_mlp(latent, config.hidden_sizes, features, 1, rng);
  } else {
    p.mask_decoder.layers.push_back(make_layer(features, features, rng));
  }
  return p;
}

// -- graph construction -------------------------------------------------------

namespace {

BlockVars bind_block(Graph& g, const ParamBlock& block, bool trainable) {
  auto leaf = [&](const Tensor& t) { return trainable ? g.parameter(t) : g.constant(t); };
  BlockVars vars;
  if (block.embedding.size() > 0) {
    vars.embedding = leaf(block.embedding);
    vars.has_embedding = true;
  }
  for (const auto& layer : block.layers) vars.layers.push_back({leaf(layer.weights), leaf(layer.bias)});
  return vars;
}

void read_block(const BlockVars& vars, ParamBlock& out) {
  auto grad_of = [](const Var& v) {
    return v.requires_grad() ? v.grad() : Tensor(Tensor::Zero(v.rows(), v.cols()));
  };
  if (vars.has_embedding) out.embedding = grad_of(vars.embedding);
  for (std::size_t i = 0; i < vars.layers.size(); ++i) {
    out.layers[i].weights = grad_of(vars.layers[i].weights);
    out.layers[i].bias = grad_of(vars.layers[i].bias);
  }
}

Var apply(const LayerVars& layer, Var input) { return ad::dense(input, layer.weights, layer.bias); }

Var std_head(const LayerVars& layer, Var hidden) {
  return ad::clamp(ad::activate(apply(layer, hidden), Activation::softplus), kStdFloor, kStdCap);
}

Var tanh_trunk(const BlockVars& block, std::size_t trunk_layers, Var h) {
  for (std::size_t i = 0; i < trunk_layers; ++i) h = ad::activate(apply(block.layers[i], h), Activation::tanh);
  return h;
}

Tensor repeat_rows(const Tensor& x, std::size_t times) {
  const auto k = static_cast<Eigen::Index>(times);
  Tensor out(x.rows() * k, x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.middleRows(i * k, k) = x.row(i).replicate(k, 1);
  return out;
}

}  // namespace

ParamVars bind(Graph& graph, const GnrParams& params, bool trainable) {
  return {bind_block(graph, params.encoder, trainable), bind_block(graph, params.data_decoder, trainable),
          bind_block(graph, params.mask_decoder, trainable)};
}

GnrParams gradients(const ParamVars& vars, const GnrParams& shape) {
  GnrParams out = shape;
  read_block(vars.encoder, out.encoder);
  read_block(vars.data_decoder, out.data_decoder);
  read_block(vars.mask_decoder, out.mask_decoder);
  return out;
}

EncoderVars encode(Graph& g, const ParamVars& p, const IncompleteMatrix& x_obs, const GnrConfig& config) {
  const auto& enc = p.encoder;
  if (config.encoder == EncoderVariant::zero_impute) {
    require(enc.layers.size() == config.hidden_sizes.size() + 2, ErrorCode::consistency,
            "encoder layout does not match configuration");
    // The mask is deliberately not an encoder input.
    Var h = tanh_trunk(enc, config.hidden_sizes.size(), g.constant(x_obs.zero_filled()));
    const std::size_t heads = config.hidden_sizes.size();
    return {apply(enc.layers[heads], h), std_head(enc.layers[heads + 1], h)};
  }
  require(enc.has_embedding && enc.layers.size() == 3, ErrorCode::consistency,
          "encoder layout does not match the set-function configuration");
  const Eigen::Index rows = x_obs.rows();
  const Eigen::Index d = x_obs.cols();
  if (enc.embedding.rows() != d) fail(ErrorCode::dimension, "encoder embedding does not match feature count");
  // One element per (row, feature) pair, row-major: element r*d + j.
  const Tensor values = x_obs.zero_filled();
  const Tensor flat_values = Eigen::Map<const Tensor>(values.data(), rows * d, 1);
  const Tensor flat_mask = Eigen::Map<const Tensor>(x_obs.mask().as_tensor().eval().data(), rows * d, 1);
  Var elements = ad::concat_cols(g.constant(flat_values), ad::tile_rows(enc.embedding, rows));
  Var h = ad::activate(apply(enc.layers[0], elements), Activation::tanh);
  Var code = ad::group_sum_rows(ad::scale_rows(h, flat_mask), d);
  return {apply(enc.layers[1], code), std_head(enc.layers[2], code)};
}

DataDecoderVars decode_data(Graph& /*g*/, const ParamVars& p, Var z, const GnrConfig& config) {
  const auto& dec = p.data_decoder;
  const std::size_t trunk = config.hidden_sizes.size();
  require(dec.layers.size() == trunk + 2, ErrorCode::consistency, "data decoder layout does not match configuration");
  Var h = tanh_trunk(dec, trunk, z);
  Var mean = apply(dec.layers[trunk], h);
  if (config.rating_mode) {
    mean = ad::affine(ad::activate(mean, Activation::sigmoid), config.rating_high - config.rating_low,
                      config.rating_low);
  }
  return {mean, std_head(dec.layers[trunk + 1], h)};
}

Var decode_mask(Graph& /*g*/, const ParamVars& p, Var z, Var data_mean, const GnrConfig& config) {
  const auto& dec = p.mask_decoder;
  Var logits;
  if (config.mask_pathway == MaskPathway::parallel) {
    const std::size_t trunk = config.hidden_sizes.size();
    require(dec.layers.size() == trunk + 1, ErrorCode::consistency, "mask decoder layout does not match configuration");
    logits = apply(dec.layers[trunk], tanh_trunk(dec, trunk, z));
  } else {
    require(dec.layers.size() == 1, ErrorCode::consistency, "serial mask head must be a single layer");
    logits = apply(dec.layers[0], data_mean);
  }
  return ad::clamp(ad::activate(logits, Activation::sigmoid), kProbFloor, 1.0 - kProbFloor);
}

BoundTerms bound_terms_at(Graph& g, const ParamVars& p, const IncompleteMatrix& x_obs, Var mean_rep, Var std_rep,
                          Var z, std::size_t draws, const GnrConfig& config, bool skip_untempered_mask) {
  BoundTerms t;
  t.z = z;
  const Tensor x_rep = repeat_rows(x_obs.zero_filled(), draws);
  const Tensor m_rep = repeat_rows(x_obs.mask().as_tensor(), draws);
  const DataDecoderVars dec = decode_data(g, p, z, config);
  t.data_mean = dec.mean;
  t.data_std = dec.std;
  // Observed entries only; masked-out terms never see sentinel content since
  // x_rep is zero-filled.
  t.data = ad::sum(ad::mul(ad::gaussian_log_density(x_rep, dec.mean, dec.std), m_rep), Axis::cols);
  if (skip_untempered_mask && config.alpha == 0.0) {
    t.mask = g.constant(Tensor::Zero(z.rows(), 1));
  } else {
    t.mask_prob = decode_mask(g, p, z, dec.mean, config);
    t.mask_evaluated = true;
    t.mask = ad::scale(ad::sum(ad::bernoulli_log_density(m_rep, t.mask_prob), Axis::cols), config.alpha);
  }
  const Var zero = g.constant(Tensor::Zero(z.rows(), z.cols()));
  const Var one = g.constant(Tensor::Ones(z.rows(), z.cols()));
  t.prior = ad::sum(ad::gaussian_log_density(z, zero, one), Axis::cols);
  t.posterior = ad::sum(ad::gaussian_log_density(z, mean_rep, std_rep), Axis::cols);
  t.log_w = ad::sub(ad::add(ad::add(t.data, t.mask), t.prior), t.posterior);
  return t;
}

BoundTerms bound_terms(Graph& g, const ParamVars& p, const IncompleteMatrix& x_obs, const Tensor& noise,
                       std::size_t draws, const GnrConfig& config, bool skip_untempered_mask) {
  require(draws >= 1, ErrorCode::invalid_argument, "at least one importance sample is required");
  const auto k = static_cast<Eigen::Index>(draws);
  if (noise.rows() != x_obs.rows() * k || noise.cols() != static_cast<Eigen::Index>(config.latent_dim))
    fail(ErrorCode::dimension, "noise must be (rows*K) x latent_dim");
  const EncoderVars enc = encode(g, p, x_obs, config);
  const Var mean_rep = ad::repeat_rows(enc.mean, k);
  const Var std_rep = ad::repeat_rows(enc.std, k);
  const Var z = ad::reparameterize(mean_rep, std_rep, noise);
  return bound_terms_at(g, p, x_obs, mean_rep, std_rep, z, draws, config, skip_untempered_mask);
}

Var bound_from_log_weights(Var log_w, std::size_t rows, std::size_t draws) {
  const auto r = static_cast<Eigen::Index>(rows);
  const auto k = static_cast<Eigen::Index>(draws);
  const Var per_row = ad::log_sum_exp(ad::reshape(log_w, r, k), Axis::cols);
  return ad::mean_all(ad::affine(per_row, 1.0, -std::log(static_cast<double>(draws))));
}

// -- tensor-level API ---------------------------------------------------------

namespace {

Tensor per_row(const Tensor& column, std::size_t rows, std::size_t draws) {
  return Eigen::Map<const Tensor>(column.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(draws));
}

Tensor softmax_rows(const Tensor& log_w) {
  Tensor out(log_w.rows(), log_w.cols());
  for (Eigen::Index i = 0; i < log_w.rows(); ++i) {
    const double mx = log_w.row(i).maxCoeff();
    if (!std::isfinite(mx))
      fail(ErrorCode::numeric, "importance weights of row " + std::to_string(i) + " cannot be normalized");
    out.row(i) = (log_w.row(i).array() - mx).exp();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

void check_component(const Tensor& t, const char* name, const std::string& where = {}) {
  if (!t.allFinite()) fail(ErrorCode::numeric, "non-finite " + std::string(name) + " term" + where);
}

void check_terms(const BoundTerms& t, const std::string& where = {}) {
  check_component(t.data.value(), "data log-likelihood", where);
  check_component(t.mask.value(), "mask log-likelihood", where);
  check_component(t.prior.value(), "prior log-density", where);
  check_component(t.posterior.value(), "posterior log-density", where);
}

}  // namespace

std::pair<Tensor, Tensor> encode(const IncompleteMatrix& x_obs, const GnrParams& params, const GnrConfig& config) {
  if (static_cast<std::size_t>(x_obs.cols()) != params.features)
    fail(ErrorCode::consistency, "data feature count does not match the model");
  Graph g;
  const ParamVars p = bind(g, params, false);
  const EncoderVars enc = encode(g, p, x_obs, config);
  return {enc.mean.value(), enc.std.value()};
}

LatentBatch sample_latent(const Tensor& mean, const Tensor& std, std::size_t draws, SeededRng& rng) {
  if (mean.rows() != std.rows() || mean.cols() != std.cols()) fail(ErrorCode::dimension, "mean/std shape mismatch");
  require(draws >= 1, ErrorCode::invalid_argument, "at least one latent draw is required");
  if (!(std.array() > 0.0).all()) fail(ErrorCode::domain, "latent std must be strictly positive");
  LatentBatch batch;
  batch.mean = mean;
  batch.std = std;
  batch.draws = draws;
  batch.noise = rng.normal_tensor(mean.rows() * static_cast<Eigen::Index>(draws), mean.cols());
  batch.samples = (repeat_rows(mean, draws).array() + repeat_rows(std, draws).array() * batch.noise.array()).matrix();
  return batch;
}

std::pair<Tensor, Tensor> decode_data(const Tensor& z, const GnrParams& params, const GnrConfig& config) {
  Graph g;
  const ParamVars p = bind(g, params, false);
  const DataDecoderVars dec = decode_data(g, p, g.constant(z), config);
  return {dec.mean.value(), dec.std.value()};
}

Tensor decode_mask(const Tensor& z, const GnrParams& params, const GnrConfig& config) {
  Graph g;
  const ParamVars p = bind(g, params, false);
  const Var zv = g.constant(z);
  Var data_mean;
  if (config.mask_pathway == MaskPathway::serial) data_mean = decode_data(g, p, zv, config).mean;
  return decode_mask(g, p, zv, data_mean, config).value();
}

ImportanceWeightSet importance_log_weights(const IncompleteMatrix& x_obs, const LatentBatch& latent,
                                           const GnrParams& params, const GnrConfig& config) {
  const auto rows = static_cast<std::size_t>(x_obs.rows());
  if (latent.mean.rows() != x_obs.rows() || latent.samples.rows() != x_obs.rows() * static_cast<Eigen::Index>(latent.draws))
    fail(ErrorCode::dimension, "latent batch does not match the data rows");
  if (static_cast<std::size_t>(x_obs.cols()) != params.features)
    fail(ErrorCode::consistency, "data feature count does not match the model");
  Graph g;
  const ParamVars p = bind(g, params, false);
  const Var mean_rep = g.constant(repeat_rows(latent.mean, latent.draws));
  const Var std_rep = g.constant(repeat_rows(latent.std, latent.draws));
  const BoundTerms t =
      bound_terms_at(g, p, x_obs, mean_rep, std_rep, g.constant(latent.samples), latent.draws, config, false);
  check_terms(t);
  ImportanceWeightSet w;
  w.data_term = per_row(t.data.value(), rows, latent.draws);
  w.mask_term = per_row(t.mask.value(), rows, latent.draws);
  w.prior_term = per_row(t.prior.value(), rows, latent.draws);
  w.posterior_term = per_row(t.posterior.value(), rows, latent.draws);
  w.log_w = per_row(t.log_w.value(), rows, latent.draws);
  w.normalized = softmax_rows(w.log_w);
  return w;
}

double gnr_bound(const IncompleteMatrix& x_obs, const GnrParams& params, const GnrConfig& config,
                 const Tensor& noise, std::size_t draws) {
  Graph g;
  const ParamVars p = bind(g, params, false);
  const BoundTerms t = bound_terms(g, p, x_obs, noise, draws, config, false);
  check_terms(t);
  return bound_from_log_weights(t.log_w, static_cast<std::size_t>(x_obs.rows()), draws).value()(0, 0);
}

double gnr_bound(const IncompleteMatrix& x_obs, const GnrParams& params, const GnrConfig& config, SeededRng& rng) {
  const Tensor noise = rng.normal_tensor(x_obs.rows() * static_cast<Eigen::Index>(config.importance_samples),
                                         static_cast<Eigen::Index>(config.latent_dim));
  return gnr_bound(x_obs, params, config, noise, config.importance_samples);
}

GnrParams component_gradient(const IncompleteMatrix& x_obs, const GnrParams& params, const GnrConfig& config,
                             const Tensor& noise, std::size_t draws, BoundComponent component) {
  Graph g;
  const ParamVars p = bind(g, params, true);
  const BoundTerms t = bound_terms(g, p, x_obs, noise, draws, config, false);
  Var target;
  switch (component) {
    case BoundComponent::bound:
      target = bound_from_log_weights(t.log_w, static_cast<std::size_t>(x_obs.rows()), draws);
      break;
    case BoundComponent::data: target = ad::sum_all(t.data); break;
    case BoundComponent::mask: target = ad::sum_all(t.mask); break;
    case BoundComponent::prior: target = ad::sum_all(t.prior); break;
    case BoundComponent::posterior: target = ad::sum_all(t.posterior); break;
  }
  g.backward(target);
  return gradients(p, params);
}

TrainedModel train(const IncompleteMatrix& dataset, const GnrConfig& config,
                   const std::function<void(std::size_t, double)>& progress) {
  config.validate();
  const Eigen::Index n = dataset.rows();
  require(n >= 1, ErrorCode::dimension, "training data has no rows");
  keep_large_blocks_resident();
  const SeededRng root(config.seed);
  SeededRng init_rng = root.substream("init");
  SeededRng batch_rng = root.substream("batches");
  SeededRng noise_rng = root.substream("noise");

  TrainedModel model{config, init_params(config, static_cast<std::size_t>(dataset.cols()), init_rng), {}};
  ad::AdamState adam = ad::AdamState::for_size(model.params.parameter_count());
  Vector flat = model.params.flatten();

  const auto batch = static_cast<Eigen::Index>(std::min<std::size_t>(config.batch_size, static_cast<std::size_t>(n)));
  const auto draws = config.importance_samples;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  batch_rng.shuffle(std::span<Eigen::Index>(order));
  std::size_t cursor = 0;
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(batch));

  double interval_sum = 0.0;
  std::size_t interval_count = 0;
  for (std::size_t it = 0; it < config.iterations; ++it) {
    // Seeded shuffling with wraparound epochs.
    for (auto& r : rows) {
      if (cursor == order.size()) {
        batch_rng.shuffle(std::span<Eigen::Index>(order));
        cursor = 0;
      }
      r = order[cursor++];
    }
    const IncompleteMatrix x = dataset.select_rows(rows);
    const Tensor noise = noise_rng.normal_tensor(batch * static_cast<Eigen::Index>(draws),
                                                 static_cast<Eigen::Index>(config.latent_dim));
    Graph g;
    const ParamVars p = bind(g, model.params, true);
    const BoundTerms t = bound_terms(g, p, x, noise, draws, config, true);
    const Var bound = bound_from_log_weights(t.log_w, static_cast<std::size_t>(batch), draws);
    const double value = bound.value()(0, 0);
    if (!std::isfinite(value)) {
      check_terms(t, " at iteration " + std::to_string(it));
      fail(ErrorCode::numeric, "non-finite bound at iteration " + std::to_string(it));
    }
    g.backward(bound, -1.0);
    const Vector grad = gradients(p, model.params).flatten();
    if (!grad.allFinite()) fail(ErrorCode::numeric, "non-finite gradient at iteration " + std::to_string(it));
    ad::adam_step(std::span<double>(flat.data(), static_cast<std::size_t>(flat.size())),
                  std::span<const double>(grad.data(), static_cast<std::size_t>(grad.size())), adam,
                  config.learning_rate);
    model.params.assign(flat);

    if (it == 0) {
      model.log.iterations.push_back(0);
      model.log.bound.push_back(value);
    } else {
      interval_sum += value;
      ++interval_count;
      if (it % config.log_interval == 0) {
        model.log.iterations.push_back(it);
        model.log.bound.push_back(interval_sum / static_cast<double>(interval_count));
        interval_sum = 0.0;
        interval_count = 0;
      }
    }
    if (progress) progress(it, value);
  }
  if (interval_count > 0) {
    model.log.iterations.push_back(config.iterations - 1);
    model.log.bound.push_back(interval_sum / static_cast<double>(interval_count));
  }
  return model;
}

// -- imputation ---------------------------------------------------------------

namespace {

// Posterior draws for a contiguous block of rows: normalized weights plus the
// decoder outputs for each of the L latents.
struct PosteriorBlock {
  Tensor weights;     // rows x L
  Tensor data_mean;   // (rows*L) x d
  Tensor data_std;    // (rows*L) x d
  Tensor mask_prob;   // (rows*L) x d, empty when the mask pathway was skipped
  Tensor latent_mean; // rows x latent
};

PosteriorBlock posterior_block(const IncompleteMatrix& x_obs, Eigen::Index begin, Eigen::Index count,
                               const GnrParams& params, const GnrConfig& config) {
  const std::size_t draws = config.imputation_samples;
  const auto l = static_cast<Eigen::Index>(draws);
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(count));
  std::iota(rows.begin(), rows.end(), begin);
  const IncompleteMatrix block = x_obs.select_rows(rows);

  // Row i always uses the same latent noise, whatever the blocking.
  const SeededRng root = SeededRng(config.seed).substream("impute");
  Tensor noise(count * l, static_cast<Eigen::Index>(config.latent_dim));
  for (Eigen::Index r = 0; r < count; ++r) {
    SeededRng row_rng = root.substream(static_cast<std::uint64_t>(begin + r));
    noise.middleRows(r * l, l) = row_rng.normal_tensor(l, noise.cols());
  }

  Graph g;
  const ParamVars p = bind(g, params, false);
  const EncoderVars enc = encode(g, p, block, config);
  const Var mean_rep = ad::repeat_rows(enc.mean, l);
  const Var std_rep = ad::repeat_rows(enc.std, l);
  const Var z = ad::reparameterize(mean_rep, std_rep, noise);
  const BoundTerms t = bound_terms_at(g, p, block, mean_rep, std_rep, z, draws, config, true);
  check_terms(t, " during imputation");

  PosteriorBlock out;
  out.weights = softmax_rows(per_row(t.log_w.value(), static_cast<std::size_t>(count), draws));
  out.data_mean = t.data_mean.value();
  out.data_std = t.data_std.value();
  if (t.mask_evaluated) out.mask_prob = t.mask_prob.value();
  out.latent_mean = enc.mean.value();
  return out;
}

Eigen::Index rows_per_block(const GnrConfig& config) {
  constexpr std::size_t kMaxLatentRows = 16384;
  return static_cast<Eigen::Index>(std::max<std::size_t>(1, kMaxLatentRows / config.imputation_samples));
}

void check_model_input(const IncompleteMatrix& x_obs, const GnrParams& params, const GnrConfig& config) {
  config.validate();
  if (static_cast<std::size_t>(x_obs.cols()) != params.features)
    fail(ErrorCode::consistency, "data has " + std::to_string(x_obs.cols()) + " features but the model expects " +
                                     std::to_string(params.features));
}

}  // namespace

ImputationResult impute(const IncompleteMatrix& x_obs, const GnrParams& params, const GnrConfig& config,
                        const ImputeOptions& options) {
  check_model_input(x_obs, params, config);
  keep_large_blocks_resident();
  const Eigen::Index n = x_obs.rows();
  const Eigen::Index d = x_obs.cols();
  const auto l = static_cast<Eigen::Index>(config.imputation_samples);
  ImputationResult result;
  result.imputed = x_obs.raw_values();
  result.probabilistic_mask = Tensor::Constant(n, d, 0.5);
  result.latent_mean.resize(n, static_cast<Eigen::Index>(config.latent_dim));
  if (options.keep_weights) result.weights.resize(n, l);

  const Eigen::Index step = rows_per_block(config);
  for (Eigen::Index begin = 0; begin < n; begin += step) {
    const Eigen::Index count = std::min(step, n - begin);
    const PosteriorBlock post = posterior_block(x_obs, begin, count, params, config);
    for (Eigen::Index r = 0; r < count; ++r) {
      const Eigen::Index i = begin + r;
      const auto w = post.weights.row(r);
      const Tensor expected_x = w * post.data_mean.middleRows(r * l, l);
      for (Eigen::Index j = 0; j < d; ++j) {
        if (!x_obs.observed(i, j)) result.imputed(i, j) = expected_x(0, j);
      }
      if (post.mask_prob.size() > 0) result.probabilistic_mask.row(i) = w * post.mask_prob.middleRows(r * l, l);
      if (options.keep_weights) result.weights.row(i) = w;
    }
    result.latent_mean.middleRows(begin, count) = post.latent_mean;
  }
  return result;
}

std::vector<CompleteMatrix> multiple_impute(const IncompleteMatrix& x_obs, const GnrParams& params,
                                            const GnrConfig& config, std::size_t n_draws) {
  require(n_draws >= 1, ErrorCode::invalid_argument, "multiple imputation needs at least one draw");
  check_model_input(x_obs, params, config);
  keep_large_blocks_resident();
  const Eigen::Index n = x_obs.rows();
  const Eigen::Index d = x_obs.cols();
  const auto l = static_cast<Eigen::Index>(config.imputation_samples);
  std::vector<CompleteMatrix> out(n_draws, x_obs.raw_values());
  const SeededRng resample_root = SeededRng(config.seed).substream("resample");

  const Eigen::Index step = rows_per_block(config);
  std::vector<double> cumulative(static_cast<std::size_t>(l));
  for (Eigen::Index begin = 0; begin < n; begin += step) {
    const Eigen::Index count = std::min(step, n - begin);
    const PosteriorBlock post = posterior_block(x_obs, begin, count, params, config);
    for (Eigen::Index r = 0; r < count; ++r) {
      const Eigen::Index i = begin + r;
      std::partial_sum(post.weights.row(r).data(), post.weights.row(r).data() + l, cumulative.begin());
      SeededRng rng = resample_root.substream(static_cast<std::uint64_t>(i));
      for (auto& draw : out) {
        const double u = rng.uniform() * cumulative.back();
        const auto pick = std::min<Eigen::Index>(
            l - 1, static_cast<Eigen::Index>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                             cumulative.begin()));
        const Eigen::Index src = r * l + pick;
        for (Eigen::Index j = 0; j < d; ++j) {
          const double eps = rng.normal();
          if (!x_obs.observed(i, j)) draw(i, j) = post.data_mean(src, j) + post.data_std(src, j) * eps;
        }
      }
    }
  }
  return out;
}

}  // namespace gnr
