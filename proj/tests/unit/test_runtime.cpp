#include "doctest.h"

#include "adaskip/error.hpp"
#include "adaskip/runtime.hpp"
#include "test_support.hpp"

using namespace adaskip;
namespace t = adaskip::testing;

namespace {

RuntimePolicy scripted_policy() { return RuntimePolicy::make(t::scripted_front(), 10.0, 0.5); }

// Checks the per-event rules straight from an event log.
void check_log(const RuntimePolicy &policy, const SimReport &report) {
  std::size_t prev = 0;
  for (const auto &e : report.events) {
    REQUIRE(e.index < policy.pareto.points.size());
    const long delta = static_cast<long>(e.index) - static_cast<long>(prev);
    CHECK(std::abs(delta) <= 1);
    if (delta == 1) {
      CHECK(e.action == Action::dropped);
    }
    if (delta == -1) {
      CHECK(e.idle_decrease);
    }
    if (e.action == Action::processed) {
      CHECK(policy.pareto.points[e.index].accuracy > policy.min_acc);
    }
    prev = e.index;
  }
}

} // namespace

TEST_CASE("accuracy filter") {
  const auto front = t::scripted_front();
  CHECK(filter_by_accuracy(front, 0.0) == front);
  const auto f = filter_by_accuracy(front, 0.7);
  REQUIRE(f.points.size() == 3); // 0.70 itself is not strictly above
  CHECK(f.points.back().accuracy == 0.80);
  try {
    filter_by_accuracy(front, 0.95);
    FAIL("expected no_operable_config");
  } catch (const ValidationError &e) {
    CHECK(e.code() == "no_operable_config");
  }
  CHECK_THROWS_AS(RuntimePolicy::make(front, 0.0, 0.5), ValidationError);
}

TEST_CASE("scripted oracle") {
  const auto policy = scripted_policy();
  REQUIRE(policy.pareto.points.size() == 4);
  const ServiceModel service{1.0};
  RuntimeState state = RuntimeState::initial(policy);
  for (const auto &e : t::scripted_events()) {
    const StepResult r = step(state, policy, e.t, service);
    CAPTURE(e.t);
    CHECK(r.action == e.action);
    CHECK(r.index == e.index);
    CHECK(r.idle_decrease == e.idle_decrease);
    state = r.state;
  }
  CHECK(state.processed == 11);
  CHECK(state.dropped == 9);
  CHECK(state.increases == 7);
  CHECK(state.decreases == 5);
  CHECK(state.usage == std::vector<std::size_t>{3, 2, 4, 2});

  std::vector<double> arrivals;
  for (const auto &e : t::scripted_events()) {
    arrivals.push_back(e.t);
  }
  const auto report = simulate(policy, arrivals, service);
  CHECK(report.average_accuracy == doctest::Approx(9.0 / 11.0));
  CHECK(report.total_cost == 78.0);
  CHECK(report.inferences_per_cost == doctest::Approx(11.0 / 78.0));
}

TEST_CASE("step is pure and rejects out-of-order events") {
  const auto policy = scripted_policy();
  const ServiceModel service{1.0};
  const RuntimeState s0 = RuntimeState::initial(policy);
  const auto r1 = step(s0, policy, 5.0, service);
  CHECK(s0 == RuntimeState::initial(policy));
  CHECK(step(s0, policy, 5.0, service).state == r1.state);
  CHECK_THROWS_AS(step(r1.state, policy, 4.0, service), ValidationError);
  CHECK_THROWS_AS(simulate(policy, std::vector<double>{1.0, 1.0}, service), ValidationError);
}

TEST_CASE("burst of drops") {
  const auto policy = scripted_policy();
  const ServiceModel service{1.0};
  for (std::size_t k = 0; k <= 6; ++k) {
    std::vector<double> arrivals{0.0};
    for (std::size_t i = 1; i <= k; ++i) {
      arrivals.push_back(0.5 * static_cast<double>(i)); // all before t = 10
    }
    const auto report = simulate(policy, arrivals, service);
    CHECK(report.dropped == k);
    CHECK(report.events.back().index == std::min<std::size_t>(k, 3));
  }
}

TEST_CASE("underload and overload limits") {
  const auto policy = scripted_policy();
  const auto trace = generate_trace(200, 50.0, 0.25, 3);

  const auto under = simulate(policy, trace.arrivals, ServiceModel{1.0});
  CHECK(under.dropped == 0);
  CHECK(under.usage[0] == 200);
  CHECK(under.average_accuracy == 0.90);

  // Every service time exceeds every gap.
  const auto dense = generate_trace(20, 1.0, 0.0, 0);
  const auto over = simulate(policy, dense.arrivals, ServiceModel{1.0});
  CHECK(over.events[0].action == Action::processed);
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(over.events[i].action == Action::dropped);
    CHECK(over.events[i].index == i);
  }
}

TEST_CASE("properties on random traces") {
  const auto policy = scripted_policy();
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(300);
    const auto trace = generate_trace(n, rng.uniform(1.0, 15.0), rng.uniform(0.0, 0.9),
                                      rng.next_u64());
    const ServiceModel service{rng.uniform(0.2, 2.0)};
    const auto report = simulate(policy, trace.arrivals, service);
    CHECK(report.processed + report.dropped == n);
    check_log(policy, report);
    CHECK(replay_events(policy, report.events) == report);
    CHECK(simulate(policy, trace.arrivals, service) == report);
    if (report.processed > 0) {
      CHECK(report.average_accuracy > policy.min_acc);
    }
  }
}

TEST_CASE("underload convergence") {
  const auto policy = scripted_policy();
  std::vector<double> arrivals{0.0, 1.0, 2.0, 3.0}; // drive to the last config
  for (int i = 1; i <= 4; ++i) {
    arrivals.push_back(10.0 + 20.0 * i); // gaps of 20 > delta_req
  }
  const auto report = simulate(policy, arrivals, ServiceModel{1.0});
  REQUIRE(report.events[3].index == 3);
  CHECK(report.events.back().index == 0);
}

TEST_CASE("replay rejects foreign logs") {
  const auto policy = scripted_policy();
  std::vector<EventRecord> log{{0.0, Action::processed, 0, "0000", false}};
  CHECK_THROWS_AS(replay_events(policy, log), ValidationError);
  log[0].index = 9;
  CHECK_THROWS_AS(replay_events(policy, log), ValidationError);
}

TEST_CASE("static policy serves the first config only") {
  const auto adaptive = scripted_policy();
  const auto no_skip = t::make_point(0.88, 12, "1111");
  const auto fixed = static_policy(adaptive, no_skip);
  REQUIRE(fixed.pareto.points.size() == 1);
  CHECK(fixed.pareto.points[0] == no_skip);
  CHECK_THROWS_AS(static_policy(adaptive, t::make_point(0.9, 8, "1110")), ValidationError);
  const auto trace = generate_trace(100, 3.0, 0.25, 1);
  const auto report = simulate(fixed, trace.arrivals, ServiceModel{1.0});
  for (const auto &e : report.events) {
    CHECK(e.index == 0);
  }
}

TEST_CASE("trace generation") {
  const auto periodic = generate_trace(50, 5.0, 0.0, 1);
  REQUIRE(periodic.arrivals.size() == 50);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(periodic.arrivals[i] == 5.0 * static_cast<double>(i));
  }

  const auto jittered = generate_trace(500, 5.0, 0.25, 2);
  CHECK(jittered.arrivals.front() == 0.0);
  CHECK_NOTHROW(validate_trace(jittered.arrivals));
  std::size_t deviating = 0;
  for (std::size_t i = 1; i < 500; ++i) {
    const double gap = jittered.arrivals[i] - jittered.arrivals[i - 1];
    CHECK(gap >= 0.75 * 5.0 - 1e-9);
    CHECK(gap <= 1.25 * 5.0 + 1e-9);
    if (i % 10 != 0) {
      CHECK(gap == doctest::Approx(5.0).epsilon(1e-12));
    } else if (std::abs(gap - 5.0) > 1e-9) {
      ++deviating;
    }
  }
  CHECK(deviating > 40);
  CHECK(generate_trace(500, 5.0, 0.25, 2).arrivals == jittered.arrivals);
  CHECK_FALSE(generate_trace(500, 5.0, 0.25, 3).arrivals == jittered.arrivals);

  CHECK_THROWS_AS(generate_trace(0, 5.0, 0.25, 1), ValidationError);
  CHECK_THROWS_AS(generate_trace(5, 0.0, 0.25, 1), ValidationError);
  CHECK_THROWS_AS(generate_trace(5, 5.0, 1.0, 1), ValidationError);
  CHECK_THROWS_AS(validate_trace(std::vector<double>{0.0, 2.0, 1.0}), ValidationError);
}
