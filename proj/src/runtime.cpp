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

#include "adaskip/runtime.hpp"

#include <cmath>

#include "adaskip/error.hpp"
#include "adaskip/rng.hpp"

namespace adaskip {

ParetoSet filter_by_accuracy(const ParetoSet &pareto, double min_acc) {
  ParetoSet out;
  for (const auto &p : pareto.points) {
    if (p.accuracy > min_acc) {
      out.points.push_back(p);
    }
  }
  if (out.points.empty()) {
    throw ValidationError("no_operable_config",
                          "no configuration has accuracy above min_acc=" +
                              std::to_string(min_acc));
  }
  return out;
}

RuntimePolicy RuntimePolicy::make(const ParetoSet &front, double delta_req,
                                  double min_acc) {
  if (!(delta_req > 0.0) || !std::isfinite(delta_req)) {
    throw ValidationError("runtime_policy", "delta_req must be positive");
  }
  RuntimePolicy policy;
  policy.pareto = filter_by_accuracy(front, min_acc);
  policy.delta_req = delta_req;
  policy.min_acc = min_acc;
  return policy;
}

RuntimeState RuntimeState::initial(const RuntimePolicy &policy) {
  RuntimeState s;
  s.usage.assign(policy.pareto.points.size(), 0);
  return s;
}

StepResult step(const RuntimeState &state, const RuntimePolicy &policy, double t_now,
                const ServiceModel &service) {
  const std::size_t size = policy.pareto.points.size();
  if (size == 0) {
    throw ValidationError("no_operable_config", "runtime policy has no configurations");
  }
  if (!std::isfinite(t_now) || (state.t_prev_event && t_now < *state.t_prev_event)) {
    throw ValidationError("event_order", "arrival events must be fed in time order");
  }

  StepResult r{state, Action::processed, state.current_index, false};
  RuntimeState &s = r.state;
  s.t_prev_event = t_now;
  if (s.usage.size() != size) {
    s.usage.resize(size, 0);
  }

  if (t_now < s.busy_until) {
    ++s.dropped;
    if (s.current_index + 1 < size) {
      ++s.current_index;
      ++s.increases;
    }
    r.action = Action::dropped;
    r.index = s.current_index;
    return r;
  }

  if (s.t_last && t_now - *s.t_last > policy.delta_req) {
    r.idle_decrease = true;
    if (s.current_index > 0) {
      --s.current_index;
      ++s.decreases;
    }
  }
  const OperatingPoint &cfg = policy.pareto.points[s.current_index];
  s.busy_until = t_now + service.service_time(cfg);
  s.t_last = t_now;
  ++s.processed;
  ++s.usage[s.current_index];
  r.index = s.current_index;
  return r;
}

WorkloadTrace generate_trace(std::size_t count, double base_period, double deviation,
                             std::uint64_t seed) {
  if (count == 0) {
    throw ValidationError("trace_params", "trace needs at least one request");
  }
  if (!(base_period > 0.0) || !std::isfinite(base_period)) {
    throw ValidationError("trace_params", "base_period must be positive");
  }
  if (!(deviation >= 0.0 && deviation < 1.0)) {
    throw ValidationError("trace_params", "deviation must be in [0, 1)");
  }
  WorkloadTrace trace;
  trace.count = count;
  trace.base_period = base_period;
  trace.deviation = deviation;
  trace.seed = seed;
  trace.arrivals.reserve(count);

  Rng rng(seed);
  double t = 0.0;
  trace.arrivals.push_back(t);
  for (std::size_t gap = 1; gap < count; ++gap) {
    double width = base_period;
    if (gap % 10 == 0) {
      width = base_period * rng.uniform(1.0 - deviation, 1.0 + deviation);
    }
    t += width;
    trace.arrivals.push_back(t);
  }
  return trace;
}

void validate_trace(std::span<const double> arrivals) {
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    if (!std::isfinite(arrivals[i])) {
      throw ValidationError("trace_format", "non-finite arrival time");
    }
    if (i > 0 && !(arrivals[i] > arrivals[i - 1])) {
      throw ValidationError("trace_format", "arrival times must be strictly increasing");
    }
  }
}

namespace {

void finish_report(const RuntimePolicy &policy, SimReport &report) {
  double acc_sum = 0.0;
  double cost = 0.0;
  for (std::size_t i = 0; i < report.usage.size(); ++i) {
    const auto n = static_cast<double>(report.usage[i]);
    acc_sum += n * policy.pareto.points[i].accuracy;
    cost += n * policy.pareto.points[i].energy_cost;
  }
  report.average_accuracy =
      report.processed > 0 ? acc_sum / static_cast<double>(report.processed) : 0.0;
  report.total_cost = cost;
  report.inferences_per_cost =
      cost > 0.0 ? static_cast<double>(report.processed) / cost : 0.0;
}

} // namespace

SimReport simulate(const RuntimePolicy &policy, std::span<const double> arrivals,
                   const ServiceModel &service) {
  validate_trace(arrivals);
  RuntimeState state = RuntimeState::initial(policy);
  SimReport report;
  report.events.reserve(arrivals.size());
  for (double t : arrivals) {
    StepResult r = step(state, policy, t, service);
    state = std::move(r.state);
    report.events.push_back(EventRecord{t, r.action, r.index,
                                        policy.pareto.points[r.index].skip.to_string(),
                                        r.idle_decrease});
  }
  report.processed = state.processed;
  report.dropped = state.dropped;
  report.increases = state.increases;
  report.decreases = state.decreases;
  report.usage = state.usage;
  finish_report(policy, report);
  return report;
}

SimReport replay_events(const RuntimePolicy &policy, std::span<const EventRecord> events) {
  SimReport report;
  report.usage.assign(policy.pareto.points.size(), 0);
  std::size_t prev = 0;
  for (const auto &e : events) {
    if (e.index >= policy.pareto.points.size() ||
        e.config_bits != policy.pareto.points[e.index].skip.to_string()) {
      throw ValidationError("event_log", "event references an unknown configuration");
    }
    if (e.index > prev) {
      report.increases += e.index - prev;
    } else {
      report.decreases += prev - e.index;
    }
    if (e.action == Action::processed) {
      ++report.processed;
      ++report.usage[e.index];
    } else {
      ++report.dropped;
    }
    prev = e.index;
  }
  report.events.assign(events.begin(), events.end());
  finish_report(policy, report);
  return report;
}

RuntimePolicy static_policy(const RuntimePolicy &adaptive, const OperatingPoint &no_skip) {
  if (no_skip.n_skipped != 0) {
    throw ValidationError("static_policy", "static runtime needs the unskipped configuration");
  }
  RuntimePolicy p = adaptive;
  p.pareto.points = {no_skip};
  return p;
}

} // namespace adaskip
