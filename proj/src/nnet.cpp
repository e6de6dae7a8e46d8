/*
 * Copyright (C) 2026 The adaskip Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "adaskip/nnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adaskip/error.hpp"
#include "adaskip/kernels.hpp"
#include "adaskip/rng.hpp"

namespace adaskip {

// ---------------------------------------------------------------------------
// Spec and index map

std::size_t NetworkSpec::total_blocks() const {
  std::size_t total = 0;
  for (const auto &seg : segments) {
    total += seg.blocks;
  }
  return total;
}

std::size_t NetworkSpec::skippable_blocks() const {
  return total_blocks() - segments.size();
}

void NetworkSpec::validate() const {
  if (input_dim == 0) {
    throw ValidationError("invalid_spec", "input_dim must be positive");
  }
  if (num_classes == 0) {
    throw ValidationError("invalid_spec", "num_classes must be positive");
  }
  if (segments.empty()) {
    throw ValidationError("invalid_spec", "network needs at least one segment");
  }
  for (std::size_t k = 0; k < segments.size(); ++k) {
    if (segments[k].blocks == 0 || segments[k].width == 0) {
      throw ValidationError("invalid_spec",
                            "segment " + std::to_string(k) +
                                " has zero blocks or zero width");
    }
  }
}

BlockIndexMap::BlockIndexMap(const NetworkSpec &spec) {
  for (const auto &seg : spec.segments) {
    for (std::size_t j = 0; j < seg.blocks; ++j) {
      if (j == 0) {
        global_to_skip_.push_back(std::nullopt);
      } else {
        global_to_skip_.push_back(skip_to_global_.size());
        skip_to_global_.push_back(global_to_skip_.size() - 1);
      }
    }
  }
}

std::optional<std::size_t> BlockIndexMap::skip_index(std::size_t global) const {
  if (global >= global_to_skip_.size()) {
    throw ValidationError("block_index", "global block index out of range");
  }
  return global_to_skip_[global];
}

std::size_t BlockIndexMap::global_index(std::size_t skip_index) const {
  if (skip_index >= skip_to_global_.size()) {
    throw ValidationError("block_index", "skippable block index out of range");
  }
  return skip_to_global_[skip_index];
}

Parameters Parameters::zeros_like() const {
  Parameters out = *this;
  for_each_affine(out, [](Affine &a) {
    std::fill(a.weight.begin(), a.weight.end(), 0.0);
    std::fill(a.bias.begin(), a.bias.end(), 0.0);
  });
  return out;
}

void Dataset::validate() const {
  if (labels.empty()) {
    throw ValidationError("empty_dataset", "dataset has no examples");
  }
  if (features.rows() != labels.size()) {
    throw ValidationError("dataset_shape", "feature rows and labels disagree");
  }
  std::vector<bool> seen(num_classes, false);
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
      throw ValidationError("dataset_label", "label out of range");
    }
    seen[static_cast<std::size_t>(label)] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ValidationError("dataset_label", "some class has no examples");
  }
}

// ---------------------------------------------------------------------------
// Initialization

namespace {

void fill_uniform(Affine &a, double bound, Rng &rng) {
  for (double &w : a.weight) {
    w = rng.uniform(-bound, bound);
  }
}

double he_bound(std::size_t fan_in) {
  return std::sqrt(6.0 / static_cast<double>(fan_in));
}

} // namespace

ResidualModel init_model(const NetworkSpec &spec) {
  spec.validate();
  ResidualModel model;
  model.spec = spec;
  model.index_map = BlockIndexMap(spec);

  Rng rng(spec.init_seed);
  const double branch_scale =
      1.0 / std::sqrt(static_cast<double>(spec.total_blocks()));

  auto &p = model.params;
  p.stem = Affine(spec.input_dim, spec.segments.front().width);
  fill_uniform(p.stem, he_bound(spec.input_dim), rng);

  std::size_t prev_width = spec.segments.front().width;
  for (std::size_t k = 0; k < spec.segments.size(); ++k) {
    const std::size_t width = spec.segments[k].width;
    for (std::size_t j = 0; j < spec.segments[k].blocks; ++j) {
      Block block;
      block.segment = k;
      if (j == 0 && k > 0) {
        block.transition = Affine(prev_width, width);
        fill_uniform(*block.transition, std::sqrt(3.0 / static_cast<double>(prev_width)),
                     rng);
      }
      block.first = Affine(width, width);
      fill_uniform(block.first, he_bound(width), rng);
      block.second = Affine(width, width);
      fill_uniform(block.second, he_bound(width) * branch_scale, rng);
      p.blocks.push_back(std::move(block));
    }
    prev_width = width;
  }

  p.head = Affine(prev_width, spec.num_classes);
  fill_uniform(p.head, he_bound(prev_width), rng);
  return model;
}

// ---------------------------------------------------------------------------
// Masks

void validate_mask(const ResidualModel &model, const BlockMask &mask) {
  const auto &map = model.index_map;
  if (mask.keep.size() != map.total_blocks()) {
    throw ValidationError("mask_length", "block mask length " +
                                             std::to_string(mask.keep.size()) +
                                             " != " +
                                             std::to_string(map.total_blocks()));
  }
  for (std::size_t g = 0; g < mask.keep.size(); ++g) {
    if (!mask.keep[g] && !map.skip_index(g)) {
      throw ValidationError("mask_unskippable",
                            "block " + std::to_string(g) +
                                " starts a segment and cannot be skipped");
    }
  }
}

BlockMask to_block_mask(const BlockIndexMap &map, const SkipConfig &skip) {
  if (skip.size() != map.skippable_blocks()) {
    throw ValidationError("skip_length", "skip configuration length " +
                                             std::to_string(skip.size()) +
                                             " != " +
                                             std::to_string(map.skippable_blocks()));
  }
  BlockMask mask = BlockMask::all_true(map.total_blocks());
  for (std::size_t i = 0; i < skip.size(); ++i) {
    mask.keep[map.global_index(i)] = skip.bits[i] != 0;
  }
  return mask;
}

SkipConfig to_skip_config(const BlockIndexMap &map, const BlockMask &mask) {
  SkipConfig skip = SkipConfig::all_ones(map.skippable_blocks());
  for (std::size_t i = 0; i < skip.size(); ++i) {
    skip.bits[i] = mask.keep.at(map.global_index(i)) ? 1 : 0;
  }
  return skip;
}

// ---------------------------------------------------------------------------
// Forward / backward

namespace {

struct BlockTrace {
  Matrix input;      // block input before transition
  Matrix branch_in;  // after transition
  Matrix hidden_pre; // first(branch_in)
  Matrix hidden;     // relu(hidden_pre)
};

struct ForwardTrace {
  std::vector<BlockTrace> blocks;
  Matrix final_pre; // h before the head activation
  Matrix final_act;
  Matrix logits;
};

void check_batch(const ResidualModel &model, const Matrix &batch,
                 const BlockMask &mask) {
  if (batch.cols() != model.spec.input_dim) {
    throw ValidationError("dimension_mismatch",
                          "batch width " + std::to_string(batch.cols()) +
                              " != input_dim " +
                              std::to_string(model.spec.input_dim));
  }
  validate_mask(model, mask);
}

double branch_multiplier(const ResidualModel &model, std::size_t g) {
  return model.branch_scale.empty() ? 1.0 : model.branch_scale[g];
}

// Runs the network; when trace is non-null, keeps what backward needs.
Matrix run_forward(const ResidualModel &model, const Matrix &batch,
                   const BlockMask &mask, ForwardTrace *trace) {
  const auto &p = model.params;
  Matrix h;
  kernels::affine_forward(batch, p.stem.weight, p.stem.bias, h);
  if (trace != nullptr) {
    trace->blocks.resize(p.blocks.size());
  }

  Matrix hidden;
  Matrix branch;
  for (std::size_t g = 0; g < p.blocks.size(); ++g) {
    const Block &block = p.blocks[g];
    BlockTrace *bt = trace != nullptr ? &trace->blocks[g] : nullptr;
    if (block.transition) {
      if (bt != nullptr) {
        bt->input = h;
      }
      Matrix t;
      kernels::affine_forward(h, block.transition->weight, block.transition->bias, t);
      h = std::move(t);
    }
    if (!mask.keep[g]) {
      continue;
    }
    if (bt != nullptr) {
      bt->branch_in = h;
    }
    kernels::affine_forward(h, block.first.weight, block.first.bias, hidden);
    if (bt != nullptr) {
      bt->hidden_pre = hidden;
    }
    kernels::relu_inplace(hidden);
    kernels::affine_forward(hidden, block.second.weight, block.second.bias, branch);
    if (bt != nullptr) {
      bt->hidden = hidden;
    }
    auto &hv = h.data();
    const auto &bv = branch.data();
    if (model.branch_scale.empty()) {
      for (std::size_t i = 0; i < hv.size(); ++i) {
        hv[i] += bv[i];
      }
    } else {
      const double scale = branch_multiplier(model, g);
      for (std::size_t i = 0; i < hv.size(); ++i) {
        hv[i] += scale * bv[i];
      }
    }
  }

  if (trace != nullptr) {
    trace->final_pre = h;
  }
  kernels::relu_inplace(h);
  Matrix logits;
  kernels::affine_forward(h, p.head.weight, p.head.bias, logits);
  if (trace != nullptr) {
    trace->final_act = std::move(h);
  }
  return logits;
}

} // namespace

Matrix forward(const ResidualModel &model, const Matrix &batch,
               const BlockMask &mask) {
  check_batch(model, batch, mask);
  return run_forward(model, batch, mask, nullptr);
}

LossGradients loss_and_gradients(const ResidualModel &model, const Matrix &batch,
                                 std::span<const int> labels,
                                 const BlockMask &mask) {
  check_batch(model, batch, mask);
  const std::size_t n = batch.rows();
  const std::size_t classes = model.spec.num_classes;
  if (labels.size() != n || n == 0) {
    throw ValidationError("dimension_mismatch", "labels do not match batch rows");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw ValidationError("dataset_label", "label out of range");
    }
  }

  ForwardTrace trace;
  const Matrix logits = run_forward(model, batch, mask, &trace);

  // Softmax cross-entropy, mean over the batch.
  LossGradients out;
  out.grad = model.params.zeros_like();
  Matrix grad(n, classes);
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const auto z = logits.row(s);
    const double zmax = *std::max_element(z.begin(), z.end());
    double denom = 0.0;
    for (double v : z) {
      denom += std::exp(v - zmax);
    }
    const double lse = zmax + std::log(denom);
    const auto y = static_cast<std::size_t>(labels[s]);
    total += lse - z[y];
    for (std::size_t c = 0; c < classes; ++c) {
      grad(s, c) = std::exp(z[c] - lse) * inv_n;
    }
    grad(s, y) -= inv_n;
  }
  out.loss = total * inv_n;

  auto &gp = out.grad;
  const auto &p = model.params;
  Matrix dh;
  kernels::affine_backward(trace.final_act, p.head.weight, grad, gp.head.weight,
                           gp.head.bias, &dh);
  kernels::relu_backward_inplace(trace.final_pre, dh);

  Matrix d_branch;
  Matrix d_hidden;
  Matrix d_in;
  for (std::size_t g = p.blocks.size(); g-- > 0;) {
    const Block &block = p.blocks[g];
    Block &gblock = gp.blocks[g];
    const BlockTrace &bt = trace.blocks[g];
    if (mask.keep[g]) {
      d_branch = dh;
      const double scale = branch_multiplier(model, g);
      if (scale != 1.0) {
        for (double &v : d_branch.data()) {
          v *= scale;
        }
      }
      kernels::affine_backward(bt.hidden, block.second.weight, d_branch,
                               gblock.second.weight, gblock.second.bias, &d_hidden);
      kernels::relu_backward_inplace(bt.hidden_pre, d_hidden);
      kernels::affine_backward(bt.branch_in, block.first.weight, d_hidden,
                               gblock.first.weight, gblock.first.bias, &d_in);
      auto &dv = dh.data();
      const auto &iv = d_in.data();
      for (std::size_t i = 0; i < dv.size(); ++i) {
        dv[i] += iv[i];
      }
    }
    if (block.transition) {
      kernels::affine_backward(bt.input, block.transition->weight, dh,
                               gblock.transition->weight, gblock.transition->bias,
                               &d_in);
      dh = d_in;
    }
  }
  kernels::affine_backward(batch, p.stem.weight, dh, gp.stem.weight, gp.stem.bias,
                           nullptr);
  return out;
}

void sgd_step(ResidualModel &model, const Parameters &grad, double lr) {
  if (!(lr >= 0.0) || !std::isfinite(lr)) {
    throw ValidationError("invalid_lr", "learning rate must be finite and >= 0");
  }
  std::vector<const Affine *> gradients;
  for_each_affine(grad, [&](const Affine &a) { gradients.push_back(&a); });
  std::vector<Affine *> weights;
  for_each_affine(model.params, [&](Affine &a) { weights.push_back(&a); });
  if (gradients.size() != weights.size()) {
    throw ValidationError("gradient_shape", "gradient set does not match model");
  }
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const Affine &g = *gradients[k];
    if (g.weight.size() != weights[k]->weight.size() ||
        g.bias.size() != weights[k]->bias.size()) {
      throw ValidationError("gradient_shape", "gradient tensor " + std::to_string(k) +
                                                  " has the wrong shape");
    }
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(g.weight.begin(), g.weight.end(), finite) ||
        !std::all_of(g.bias.begin(), g.bias.end(), finite)) {
      throw ValidationError("non_finite_gradient",
                            "gradient tensor " + std::to_string(k) +
                                " contains NaN or Inf");
    }
  }
  for (std::size_t k = 0; k < weights.size(); ++k) {
    Affine &w = *weights[k];
    const Affine &g = *gradients[k];
    for (std::size_t i = 0; i < w.weight.size(); ++i) {
      w.weight[i] -= lr * g.weight[i];
    }
    for (std::size_t i = 0; i < w.bias.size(); ++i) {
      w.bias[i] -= lr * g.bias[i];
    }
  }
}

// ---------------------------------------------------------------------------
// Evaluation and cost

std::vector<int> predict(const ResidualModel &model, const Matrix &features,
                         const BlockMask &mask) {
  check_batch(model, features, mask);
  const Matrix logits = run_forward(model, features, mask, nullptr);
  std::vector<int> out(logits.rows());
  for (std::size_t s = 0; s < logits.rows(); ++s) {
    const auto z = logits.row(s);
    // max_element returns the first maximum: ties go to the lowest class.
    out[s] = static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
  }
  return out;
}

double evaluate(const ResidualModel &model, const Dataset &data,
                const BlockMask &mask) {
  if (data.size() == 0) {
    throw ValidationError("empty_dataset", "cannot evaluate on an empty dataset");
  }
  const auto predictions = predict(model, data.features, mask);
  std::size_t correct = 0;
  for (std::size_t s = 0; s < predictions.size(); ++s) {
    correct += predictions[s] == data.labels[s] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double evaluate(const ResidualModel &model, const Dataset &data,
                const SkipConfig &skip) {
  return evaluate(model, data, to_block_mask(model.index_map, skip));
}

std::uint64_t stem_cost(const ResidualModel &model) {
  return model.params.stem.in_dim * model.params.stem.out_dim;
}

std::uint64_t head_cost(const ResidualModel &model) {
  return model.params.head.in_dim * model.params.head.out_dim;
}

std::uint64_t block_cost(const ResidualModel &model, std::size_t global_block) {
  const Block &b = model.params.blocks.at(global_block);
  std::uint64_t macs = b.first.in_dim * b.first.out_dim +
                       b.second.in_dim * b.second.out_dim;
  if (b.transition) {
    macs += b.transition->in_dim * b.transition->out_dim;
  }
  return macs;
}

std::uint64_t model_cost(const ResidualModel &model, const SkipConfig &skip) {
  const BlockMask mask = to_block_mask(model.index_map, skip);
  std::uint64_t total = stem_cost(model) + head_cost(model);
  for (std::size_t g = 0; g < mask.keep.size(); ++g) {
    if (mask.keep[g]) {
      total += block_cost(model, g);
    }
  }
  return total;
}

} // namespace adaskip
