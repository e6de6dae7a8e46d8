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

// Stochastic-depth training. Each mini-batch runs on a random sub-network:
// skippable block l (1-based, l = 1..L with L = B_s) is kept with probability
//
//   p_l = 1 - (l / L) * (1 - p_L)
//
// and dropped blocks act as the identity, exactly like a skipped block at
// inference time. Segment-first blocks are never dropped.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "adaskip/nnet.hpp"
#include "adaskip/rng.hpp"

namespace adaskip {

/// Survival probability of droppable block l (1-based) out of L.
double survival_probability(std::size_t l, std::size_t num_droppable,
                            double p_last);

struct SurvivalSchedule {
  double p_last = 1.0;
  /// p[i] is the survival probability of skippable block i (0-based).
  std::vector<double> p;

  static SurvivalSchedule linear_decay(std::size_t num_droppable, double p_last);
};

/// Independent Bernoulli(p_l) keep decisions for every skippable block.
BlockMask sample_drop_pattern(const SurvivalSchedule &schedule,
                              const BlockIndexMap &map, Rng &rng);

enum class TrainMode { baseline, stochastic };

struct LrPhase {
  std::size_t begin_epoch = 0; // inclusive
  std::size_t end_epoch = 0;   // exclusive
  double lr = 0.1;

  bool operator==(const LrPhase &) const = default;
};

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  std::vector<LrPhase> lr_schedule;
  TrainMode mode = TrainMode::baseline;
  std::optional<double> p_last;
  std::uint64_t rng_seed = 0;
  /// Scale residual branches by p_l after training. Off by default so that
  /// training-time drops and inference-time skips mean the same thing.
  bool test_time_scaling = false;

  /// Phases partition [0, epochs); p_last present iff mode is stochastic.
  void validate() const;
  double lr_at(std::size_t epoch) const;

  bool operator==(const TrainConfig &) const = default;
};

/// Three-phase schedule over 50% / 35% / 15% of the epochs with rates
/// base, base / 10, base / 1000 (0.1 / 0.01 / 1e-4 at the default base).
std::vector<LrPhase> default_lr_schedule(std::size_t epochs, double base_lr = 0.1);

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0.0;
  double train_accuracy = 0.0;
  std::optional<double> test_accuracy;
};

struct TrainResult {
  ResidualModel model;
  std::vector<EpochStats> history;
};

/// Mini-batch SGD. Deterministic for a fixed (model, data, cfg). Evaluation
/// inside the loop always uses the full network.
TrainResult train(ResidualModel model, const Dataset &train_set,
                  const TrainConfig &cfg, const Dataset *test_set = nullptr);

} // namespace adaskip
