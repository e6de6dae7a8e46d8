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

// Design-time exploration of the skipping space: per-block sensitivity
// ranking, the nested "skip the N least sensitive blocks" family, operating
// point evaluation and Pareto filtering.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "adaskip/nnet.hpp"
#include "adaskip/skip_config.hpp"

namespace adaskip {

/// Test-set accuracy of skip configurations for one trained model. Counts
/// every evaluation so callers can audit how much work a method costs.
class ConfigEvaluator {
public:
  ConfigEvaluator(const ResidualModel &model, const Dataset &test_set)
      : model_(model), test_set_(test_set) {}

  ConfigEvaluator(const ConfigEvaluator &) = delete;
  ConfigEvaluator &operator=(const ConfigEvaluator &) = delete;

  double accuracy(const SkipConfig &skip) const;

  std::size_t evaluations() const noexcept { return count_.load(); }
  std::size_t skippable_blocks() const noexcept {
    return model_.index_map.skippable_blocks();
  }
  const ResidualModel &model() const noexcept { return model_; }

private:
  const ResidualModel &model_;
  const Dataset &test_set_;
  mutable std::atomic<std::size_t> count_{0};
};

/// Latency and energy of a configuration. The default provider counts MACs;
/// a measured-timing provider can replace it.
class CostProvider {
public:
  virtual ~CostProvider() = default;
  virtual double latency_cost(const SkipConfig &skip) const = 0;
  virtual double energy_cost(const SkipConfig &skip) const = 0;
};

class MacCostProvider final : public CostProvider {
public:
  MacCostProvider(const ResidualModel &model, double energy_per_mac)
      : model_(model), energy_per_mac_(energy_per_mac) {}

  double latency_cost(const SkipConfig &skip) const override;
  double energy_cost(const SkipConfig &skip) const override;
  double energy_per_mac() const noexcept { return energy_per_mac_; }

private:
  const ResidualModel &model_;
  double energy_per_mac_;
};

struct SensitivityEntry {
  std::size_t skip_index = 0;
  double accuracy = 0.0; // accuracy with only this block skipped

  bool operator==(const SensitivityEntry &) const = default;
};

/// Ascending accuracy: most important block first, least important last.
/// Equal accuracies keep the shallower block first, so the deeper one is
/// skipped earlier by n_least_sensitive_config.
struct SensitivityList {
  std::vector<SensitivityEntry> entries;

  /// Throws ValidationError unless it is a permutation of 0..B_s-1 in the
  /// documented order.
  void validate(std::size_t skippable_blocks) const;

  bool operator==(const SensitivityList &) const = default;
};

/// Pluggable ranking method; sensitivity_scan is the default.
using BlockRanker = std::function<SensitivityList(const ConfigEvaluator &)>;

/// Exactly B_s evaluations, one per single-zero configuration.
SensitivityList sensitivity_scan(const ConfigEvaluator &evaluator);

/// Orders raw (index, accuracy) pairs by the SensitivityList rule.
SensitivityList make_sensitivity_list(std::vector<SensitivityEntry> entries);

/// Zeros at the N least sensitive blocks (the last N list entries).
SkipConfig n_least_sensitive_config(const SensitivityList &list, std::size_t n);

/// Configurations for N = 0..B_s, in that order.
std::vector<SkipConfig> sensitivity_family(const SensitivityList &list);

/// C(B_s, N) in exact integer arithmetic; B_s <= 64 never overflows.
std::uint64_t count_configurations(std::size_t skippable, std::size_t n);

struct OperatingPoint {
  SkipConfig skip;
  std::size_t n_skipped = 0;
  double accuracy = 0.0;
  double latency_cost = 0.0;
  double energy_cost = 0.0;

  bool operator==(const OperatingPoint &) const = default;
};

/// One point per configuration, in input order. Configurations are evaluated
/// in parallel when `parallel` is set; results do not depend on it.
std::vector<OperatingPoint> evaluate_operating_points(
    const ConfigEvaluator &evaluator, const CostProvider &cost,
    std::span<const SkipConfig> configs, bool parallel = true);

/// True when a has accuracy >= and latency <= b's with one strict.
bool dominates(const OperatingPoint &a, const OperatingPoint &b);

struct ParetoSet {
  /// Sorted by n_skipped ascending (ties: higher latency first).
  std::vector<OperatingPoint> points;

  /// Throws ValidationError if empty, unsorted or internally dominated.
  void validate() const;

  bool operator==(const ParetoSet &) const = default;
};

/// Maximal non-dominated subset. Points with identical objectives keep only
/// the one with the lowest n_skipped.
ParetoSet pareto_filter(std::span<const OperatingPoint> points);

/// Area dominated by the points in (accuracy up, latency down) space,
/// bounded by accuracy 0 and latency `reference_latency`.
double hypervolume(std::span<const OperatingPoint> points, double reference_latency);

/// All 2^B_s configurations, B_s <= 16.
std::vector<SkipConfig> enumerate_all_configs(std::size_t skippable);

/// Uniform random configurations with exactly N skipped blocks, N = 0..B_s.
struct SkipCountStats {
  std::size_t n_skipped = 0;
  std::size_t samples = 0;
  double min_accuracy = 0.0;
  double mean_accuracy = 0.0;
  double max_accuracy = 0.0;
};

std::vector<SkipCountStats> random_config_stats(const ConfigEvaluator &evaluator,
                                                std::size_t samples_per_n,
                                                std::uint64_t seed);

/// Trapezoidal area under accuracy vs N for points ordered by N = 0..B_s.
double accuracy_curve_area(std::span<const double> accuracy_by_n);

} // namespace adaskip
