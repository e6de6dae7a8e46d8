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

// Runtime adaptation over a Pareto list of skip configurations, simulated in
// virtual time.
//
// On every arrival:
//   - device busy (t < busy_until): drop the request and move one step
//     toward more skipping, saturating at the last configuration;
//   - otherwise: if the device has been idle for more than delta_req since
//     the last processed request, move one step toward less skipping
//     (saturating at the first), then process with the current configuration.
//
// An arrival exactly at busy_until finds the device free. The first request
// has no previous one, so it never triggers the idle rule.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adaskip/skip_analysis.hpp"

namespace adaskip {

/// Keeps points with accuracy strictly above min_acc, order preserved.
/// Throws ValidationError("no_operable_config") if nothing survives.
ParetoSet filter_by_accuracy(const ParetoSet &pareto, double min_acc);

struct RuntimePolicy {
  ParetoSet pareto; // already filtered
  double delta_req = 0.0;
  double min_acc = 0.0;

  /// Filters the front and checks delta_req > 0.
  static RuntimePolicy make(const ParetoSet &front, double delta_req, double min_acc);
};

/// Maps a configuration to virtual service time: latency_cost * time_scale.
struct ServiceModel {
  double time_scale = 1.0;

  double service_time(const OperatingPoint &point) const {
    return point.latency_cost * time_scale;
  }
};

struct RuntimeState {
  std::size_t current_index = 0;
  std::optional<double> t_last;
  double busy_until = -std::numeric_limits<double>::infinity();
  std::optional<double> t_prev_event;
  std::size_t processed = 0;
  std::size_t dropped = 0;
  std::size_t increases = 0;
  std::size_t decreases = 0;
  std::vector<std::size_t> usage; // processed requests per Pareto index

  static RuntimeState initial(const RuntimePolicy &policy);

  bool operator==(const RuntimeState &) const = default;
};

enum class Action { processed, dropped };

struct StepResult {
  RuntimeState state;
  Action action = Action::processed;
  /// Configuration that served the request, or the index after a drop.
  std::size_t index = 0;
  bool idle_decrease = false;
};

/// One arrival. Pure: the input state is not modified.
StepResult step(const RuntimeState &state, const RuntimePolicy &policy, double t_now,
                const ServiceModel &service);

struct WorkloadTrace {
  std::vector<double> arrivals;
  std::size_t count = 0;
  double base_period = 0.0;
  double deviation = 0.0;
  std::uint64_t seed = 0;
};

/// Arrivals start at t = 0. Gaps equal base_period except every 10th gap,
/// which is multiplied by u ~ U[1 - deviation, 1 + deviation).
WorkloadTrace generate_trace(std::size_t count, double base_period, double deviation,
                             std::uint64_t seed);

/// Checks arrivals are finite and strictly increasing.
void validate_trace(std::span<const double> arrivals);

struct EventRecord {
  double t = 0.0;
  Action action = Action::processed;
  std::size_t index = 0;
  std::string config_bits;
  bool idle_decrease = false;

  bool operator==(const EventRecord &) const = default;
};

struct SimReport {
  std::size_t processed = 0;
  std::size_t dropped = 0;
  double average_accuracy = 0.0;
  double total_cost = 0.0; // energy cost of processed requests
  double inferences_per_cost = 0.0;
  std::size_t increases = 0;
  std::size_t decreases = 0;
  std::vector<std::size_t> usage;
  std::vector<EventRecord> events;

  bool operator==(const SimReport &) const = default;
};

SimReport simulate(const RuntimePolicy &policy, std::span<const double> arrivals,
                   const ServiceModel &service);

/// Recomputes every counter of a report from its event log alone.
SimReport replay_events(const RuntimePolicy &policy, std::span<const EventRecord> events);

/// Static runtime that always serves the unskipped model. The no-skip point is
/// passed explicitly: it need not be on the filtered front, since a config
/// with skips can dominate it.
RuntimePolicy static_policy(const RuntimePolicy &adaptive, const OperatingPoint &no_skip);

} // namespace adaskip
