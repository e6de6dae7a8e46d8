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

#include "adaskip/skip_analysis.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <tuple>

#include "adaskip/error.hpp"
#include "adaskip/rng.hpp"

namespace adaskip {

double ConfigEvaluator::accuracy(const SkipConfig &skip) const {
  const double acc = evaluate(model_, test_set_, skip);
  count_.fetch_add(1);
  return acc;
}

double MacCostProvider::latency_cost(const SkipConfig &skip) const {
  return static_cast<double>(model_cost(model_, skip));
}

double MacCostProvider::energy_cost(const SkipConfig &skip) const {
  return energy_per_mac_ * latency_cost(skip);
}

// ---------------------------------------------------------------------------
// Sensitivity ranking

namespace {

bool sensitivity_before(const SensitivityEntry &a, const SensitivityEntry &b) {
  if (a.accuracy != b.accuracy) {
    return a.accuracy < b.accuracy;
  }
  return a.skip_index < b.skip_index;
}

} // namespace

void SensitivityList::validate(std::size_t skippable_blocks) const {
  if (entries.size() != skippable_blocks) {
    throw ValidationError("sensitivity_list", "list length != B_s");
  }
  std::vector<bool> seen(skippable_blocks, false);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto idx = entries[i].skip_index;
    if (idx >= skippable_blocks || seen[idx]) {
      throw ValidationError("sensitivity_list",
                            "list is not a permutation of the skippable blocks");
    }
    seen[idx] = true;
    if (i > 0 && !sensitivity_before(entries[i - 1], entries[i])) {
      throw ValidationError("sensitivity_list", "list is not in sensitivity order");
    }
  }
}

SensitivityList make_sensitivity_list(std::vector<SensitivityEntry> entries) {
  std::sort(entries.begin(), entries.end(), sensitivity_before);
  return SensitivityList{std::move(entries)};
}

SensitivityList sensitivity_scan(const ConfigEvaluator &evaluator) {
  const std::size_t skippable = evaluator.skippable_blocks();
  std::vector<SensitivityEntry> entries(skippable);
  const auto count = static_cast<std::int64_t>(skippable);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    SkipConfig single = SkipConfig::all_ones(skippable);
    single.bits[static_cast<std::size_t>(i)] = 0;
    entries[static_cast<std::size_t>(i)] = {static_cast<std::size_t>(i),
                                            evaluator.accuracy(single)};
  }
  return make_sensitivity_list(std::move(entries));
}

SkipConfig n_least_sensitive_config(const SensitivityList &list, std::size_t n) {
  const std::size_t skippable = list.entries.size();
  if (n > skippable) {
    throw ValidationError("skip_count", "N=" + std::to_string(n) +
                                            " exceeds B_s=" + std::to_string(skippable));
  }
  SkipConfig skip = SkipConfig::all_ones(skippable);
  for (std::size_t k = 0; k < n; ++k) {
    skip.bits[list.entries[skippable - 1 - k].skip_index] = 0;
  }
  return skip;
}

std::vector<SkipConfig> sensitivity_family(const SensitivityList &list) {
  std::vector<SkipConfig> family;
  family.reserve(list.entries.size() + 1);
  for (std::size_t n = 0; n <= list.entries.size(); ++n) {
    family.push_back(n_least_sensitive_config(list, n));
  }
  return family;
}

std::uint64_t count_configurations(std::size_t skippable, std::size_t n) {
  if (n > skippable) {
    throw ValidationError("skip_count", "N exceeds B_s");
  }
  if (skippable > 64) {
    throw ValidationError("skip_count", "B_s above 64 is not supported");
  }
  const std::size_t r = std::min(n, skippable - n);
  unsigned __int128 result = 1;
  for (std::size_t i = 1; i <= r; ++i) {
    // result * (B_s - r + i) / i is C(B_s - r + i, i): always exact.
    result = result * (skippable - r + i) / i;
  }
  return static_cast<std::uint64_t>(result);
}

// ---------------------------------------------------------------------------
// Operating points and Pareto front

std::vector<OperatingPoint> evaluate_operating_points(
    const ConfigEvaluator &evaluator, const CostProvider &cost,
    std::span<const SkipConfig> configs, bool parallel) {
  for (const auto &skip : configs) {
    if (skip.size() != evaluator.skippable_blocks()) {
      throw ValidationError("skip_length", "configuration length != B_s");
    }
  }
  std::vector<OperatingPoint> points(configs.size());
  const auto count = static_cast<std::int64_t>(configs.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t i = 0; i < count; ++i) {
    const SkipConfig &skip = configs[static_cast<std::size_t>(i)];
    OperatingPoint &pt = points[static_cast<std::size_t>(i)];
    pt.skip = skip;
    pt.n_skipped = skip.n_skipped();
    pt.accuracy = evaluator.accuracy(skip);
    pt.latency_cost = cost.latency_cost(skip);
    pt.energy_cost = cost.energy_cost(skip);
  }
  return points;
}

bool dominates(const OperatingPoint &a, const OperatingPoint &b) {
  return a.accuracy >= b.accuracy && a.latency_cost <= b.latency_cost &&
         (a.accuracy > b.accuracy || a.latency_cost < b.latency_cost);
}

namespace {

bool front_order(const OperatingPoint &a, const OperatingPoint &b) {
  return std::tie(a.n_skipped, b.latency_cost, a.skip) <
         std::tie(b.n_skipped, a.latency_cost, b.skip);
}

} // namespace

void ParetoSet::validate() const {
  if (points.empty()) {
    throw ValidationError("pareto_empty", "Pareto set is empty");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].n_skipped != points[i].skip.n_skipped()) {
      throw ValidationError("pareto_invalid", "n_skipped disagrees with skip bits");
    }
    if (i > 0 && front_order(points[i], points[i - 1])) {
      throw ValidationError("pareto_invalid", "points not sorted by n_skipped");
    }
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i == j) {
        continue;
      }
      const bool same = points[i].accuracy == points[j].accuracy &&
                        points[i].latency_cost == points[j].latency_cost;
      if (dominates(points[j], points[i]) || same) {
        throw ValidationError("pareto_dominated",
                              "point " + points[i].skip.to_string() +
                                  " is dominated by " + points[j].skip.to_string());
      }
    }
  }
}

ParetoSet pareto_filter(std::span<const OperatingPoint> points) {
  std::vector<const OperatingPoint *> order;
  order.reserve(points.size());
  for (const auto &p : points) {
    order.push_back(&p);
  }
  // Cheapest first; among equal latency the most accurate, then the
  // representative that should survive an exact objective tie.
  std::sort(order.begin(), order.end(), [](const OperatingPoint *a, const OperatingPoint *b) {
    return std::tie(a->latency_cost, b->accuracy, a->n_skipped, a->skip) <
           std::tie(b->latency_cost, a->accuracy, b->n_skipped, b->skip);
  });

  ParetoSet front;
  double best = -std::numeric_limits<double>::infinity();
  for (const OperatingPoint *p : order) {
    if (p->accuracy > best) {
      front.points.push_back(*p);
      best = p->accuracy;
    }
  }
  std::sort(front.points.begin(), front.points.end(), front_order);
  return front;
}

double hypervolume(std::span<const OperatingPoint> points, double reference_latency) {
  std::vector<std::pair<double, double>> pts; // (latency, accuracy)
  for (const auto &p : points) {
    if (p.latency_cost < reference_latency && p.accuracy > 0.0) {
      pts.emplace_back(p.latency_cost, p.accuracy);
    }
  }
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    best = std::max(best, pts[i].second);
    const double next = i + 1 < pts.size() ? pts[i + 1].first : reference_latency;
    area += (next - pts[i].first) * best;
  }
  return area;
}

std::vector<SkipConfig> enumerate_all_configs(std::size_t skippable) {
  if (skippable > 16) {
    throw ValidationError("enumeration_size", "exhaustive enumeration limited to B_s <= 16");
  }
  std::vector<SkipConfig> all;
  all.reserve(std::size_t{1} << skippable);
  for (std::uint32_t code = 0; code < (1u << skippable); ++code) {
    SkipConfig skip = SkipConfig::all_zeros(skippable);
    for (std::size_t i = 0; i < skippable; ++i) {
      skip.bits[i] = (code >> i) & 1u;
    }
    all.push_back(std::move(skip));
  }
  return all;
}

std::vector<SkipCountStats> random_config_stats(const ConfigEvaluator &evaluator,
                                                std::size_t samples_per_n,
                                                std::uint64_t seed) {
  const std::size_t skippable = evaluator.skippable_blocks();
  Rng rng(seed);
  std::vector<SkipConfig> configs;
  std::vector<std::size_t> indices(skippable);
  for (std::size_t n = 0; n <= skippable; ++n) {
    for (std::size_t s = 0; s < samples_per_n; ++s) {
      std::iota(indices.begin(), indices.end(), 0);
      SkipConfig skip = SkipConfig::all_ones(skippable);
      // Partial Fisher-Yates: the first n picks are a uniform n-subset.
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = k + rng.uniform_index(skippable - k);
        std::swap(indices[k], indices[j]);
        skip.bits[indices[k]] = 0;
      }
      configs.push_back(std::move(skip));
    }
  }

  std::vector<double> acc(configs.size());
  const auto count = static_cast<std::int64_t>(configs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    acc[static_cast<std::size_t>(i)] = evaluator.accuracy(configs[static_cast<std::size_t>(i)]);
  }

  std::vector<SkipCountStats> stats;
  for (std::size_t n = 0; n <= skippable; ++n) {
    SkipCountStats st;
    st.n_skipped = n;
    st.samples = samples_per_n;
    if (samples_per_n > 0) {
      const auto first = acc.begin() + static_cast<std::ptrdiff_t>(n * samples_per_n);
      const auto last = first + static_cast<std::ptrdiff_t>(samples_per_n);
      st.min_accuracy = *std::min_element(first, last);
      st.max_accuracy = *std::max_element(first, last);
      st.mean_accuracy = std::accumulate(first, last, 0.0) / static_cast<double>(samples_per_n);
    }
    stats.push_back(st);
  }
  return stats;
}

double accuracy_curve_area(std::span<const double> accuracy_by_n) {
  double area = 0.0;
  for (std::size_t i = 1; i < accuracy_by_n.size(); ++i) {
    area += 0.5 * (accuracy_by_n[i - 1] + accuracy_by_n[i]);
  }
  return area;
}

} // namespace adaskip
