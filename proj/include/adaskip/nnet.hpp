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

#pragma once

// Segmented residual classifier with per-block skip gates.
//
// The network is a stack of dense residual blocks instead of the usual
// Conv3x3 pairs. Inputs here are feature vectors, and what matters is how a
// skipped block behaves (it becomes the identity), not the convolution:
//
//   h_0     = stem(x)
//   h_in    = transition(h) for the first block of segments k > 0, else h
//   h_out   = h_in + second(relu(first(h_in)))     (block executed)
//   h_out   = h_in                                 (block skipped)
//   logits  = head(relu(h_final))
//
// Every block except the first of each segment is skippable. The first block
// owns the width change, so skipping is never asked to bridge two widths.
//
// Indices are 0-based throughout: global blocks 0..B-1, skippable blocks
// 0..B_s-1 in network order.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adaskip/skip_config.hpp"
#include "adaskip/tensor.hpp"

namespace adaskip {

enum class Activation { relu };

struct SegmentSpec {
  std::size_t blocks = 1;
  std::size_t width = 1;

  bool operator==(const SegmentSpec &) const = default;
};

struct NetworkSpec {
  std::size_t input_dim = 1;
  std::size_t num_classes = 2;
  std::vector<SegmentSpec> segments;
  Activation activation = Activation::relu;
  std::uint64_t init_seed = 0;

  /// B: total residual blocks.
  std::size_t total_blocks() const;
  /// B_s = B - number of segments.
  std::size_t skippable_blocks() const;

  /// Throws ValidationError on empty segments or zero sizes.
  void validate() const;

  bool operator==(const NetworkSpec &) const = default;
};

/// Identifier of the weight initialization scheme, recorded in manifests and
/// checkpoints. Bump it whenever init_model draws change.
inline constexpr const char *kInitScheme = "he-uniform-residual-scaled/v1";

struct Affine {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> weight; // out_dim x in_dim, row-major
  std::vector<double> bias;   // out_dim

  Affine() = default;
  Affine(std::size_t in, std::size_t out)
      : in_dim(in), out_dim(out), weight(in * out, 0.0), bias(out, 0.0) {}

  bool operator==(const Affine &) const = default;
};

struct Block {
  std::size_t segment = 0;
  std::optional<Affine> transition; // present on first block of segments k > 0
  Affine first;
  Affine second;

  bool operator==(const Block &) const = default;
};

/// All trainable tensors. Gradients use the same type.
struct Parameters {
  Affine stem;
  std::vector<Block> blocks;
  Affine head;

  /// Same shapes, every value zero.
  Parameters zeros_like() const;

  bool operator==(const Parameters &) const = default;
};

/// Visits every affine of a parameter set in a fixed order
/// (stem, then per block: transition, first, second, then head).
template <class Params, class Fn> void for_each_affine(Params &params, Fn &&fn) {
  fn(params.stem);
  for (auto &block : params.blocks) {
    if (block.transition) {
      fn(*block.transition);
    }
    fn(block.first);
    fn(block.second);
  }
  fn(params.head);
}

/// Mapping between global block positions and skippable positions.
class BlockIndexMap {
public:
  BlockIndexMap() = default;
  explicit BlockIndexMap(const NetworkSpec &spec);

  std::size_t total_blocks() const noexcept { return global_to_skip_.size(); }
  std::size_t skippable_blocks() const noexcept { return skip_to_global_.size(); }

  /// Skippable index of a global block, or nullopt for segment-first blocks.
  std::optional<std::size_t> skip_index(std::size_t global) const;
  std::size_t global_index(std::size_t skip_index) const;

  bool operator==(const BlockIndexMap &) const = default;

private:
  std::vector<std::optional<std::size_t>> global_to_skip_;
  std::vector<std::size_t> skip_to_global_;
};

/// Global keep mask over all B blocks. Unmapped (segment-first) positions are
/// always true.
struct BlockMask {
  std::vector<bool> keep;

  static BlockMask all_true(std::size_t total_blocks) {
    return BlockMask{std::vector<bool>(total_blocks, true)};
  }

  bool operator==(const BlockMask &) const = default;
};

struct ResidualModel {
  NetworkSpec spec;
  Parameters params;
  BlockIndexMap index_map;
  /// Optional per-global-block multiplier on the residual branch. Empty means
  /// unscaled execution, which is the default and matches skip semantics.
  std::vector<double> branch_scale;

  bool operator==(const ResidualModel &) const = default;
};

enum class Split { train, test };

struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::size_t num_classes = 0;
  Split split = Split::train;

  std::size_t size() const noexcept { return labels.size(); }
  /// Labels in range, at least one example per class, shapes consistent.
  void validate() const;
};

ResidualModel init_model(const NetworkSpec &spec);

/// Throws ValidationError unless the mask has length B and every unmapped
/// position is true.
void validate_mask(const ResidualModel &model, const BlockMask &mask);

BlockMask to_block_mask(const BlockIndexMap &map, const SkipConfig &skip);
SkipConfig to_skip_config(const BlockIndexMap &map, const BlockMask &mask);

Matrix forward(const ResidualModel &model, const Matrix &batch,
               const BlockMask &mask);

struct LossGradients {
  double loss = 0.0;
  Parameters grad;
};

/// Mean softmax cross-entropy and its gradient with respect to every weight.
LossGradients loss_and_gradients(const ResidualModel &model, const Matrix &batch,
                                 std::span<const int> labels,
                                 const BlockMask &mask);

/// w <- w - lr * g. Rejects non-finite gradients before touching the model.
void sgd_step(ResidualModel &model, const Parameters &grad, double lr);

/// Argmax predictions; ties go to the lowest class index.
std::vector<int> predict(const ResidualModel &model, const Matrix &features,
                         const BlockMask &mask);

/// TOP-1 accuracy of the model with the given skip configuration.
double evaluate(const ResidualModel &model, const Dataset &data,
                const SkipConfig &skip);
double evaluate(const ResidualModel &model, const Dataset &data,
                const BlockMask &mask);

/// Multiply-accumulate counts at batch size 1.
std::uint64_t stem_cost(const ResidualModel &model);
std::uint64_t head_cost(const ResidualModel &model);
std::uint64_t block_cost(const ResidualModel &model, std::size_t global_block);
std::uint64_t model_cost(const ResidualModel &model, const SkipConfig &skip);

} // namespace adaskip
