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

#include <cstddef>
#include <cstdint>
#include <string>

#include "adaskip/nnet.hpp"

namespace adaskip {

/// Synthetic classification data. Generators:
///   "spirals"           interleaved 2-D spiral arms, one per class
///   "rings"             concentric noisy rings, one radius per class
///   "gaussian_mixture"  one isotropic Gaussian blob per class
/// The 2-D generators pad the remaining input_dim - 2 features with noise.
/// Labels cycle 0, 1, ..., C-1 so every split is balanced.
struct DatasetSpec {
  std::string generator = "spirals";
  std::size_t num_classes = 3;
  std::size_t input_dim = 2;
  std::size_t train_size = 1000;
  std::size_t test_size = 500;
  double noise = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const DatasetSpec &) const = default;
};

struct DatasetPair {
  Dataset train;
  Dataset test;
};

DatasetPair synthesize(const DatasetSpec &spec);

} // namespace adaskip
