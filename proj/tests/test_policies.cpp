#include "powersched/policies.hpp"

#include <random>

#include "doctest.h"
#include "powersched/analysis.hpp"
#include "powersched/feasibility.hpp"

using namespace powersched;

namespace {

EnergyParams params_b(long long ew) {
  return {Rational(ew), Rational(1), Rational(1)};
}

SimulationResult run(Policy& policy, std::vector<Job> jobs, long long ew,
                     Tick horizon) {
  SimulateOptions opts{params_b(ew), horizon, 64};
  return simulate_jobs(policy, jobs, opts);
}

std::vector<Job> random_feasible_set(std::mt19937_64& rng, int max_jobs,
                                     Tick max_deadline, bool unit) {
  auto tick = [&](Tick lo, Tick hi) {
    return std::uniform_int_distribution<Tick>(lo, hi)(rng);
  };
  for (;;) {
    std::vector<Job> set;
    int n = static_cast<int>(tick(1, max_jobs));
    for (int i = 0; i < n; ++i) {
      Tick a = tick(0, max_deadline - 1);
      Tick d = tick(a + 1, max_deadline);
      Tick c = unit ? 1 : tick(1, d - a);
      set.push_back({i, a, d, c});
    }
    if (condition_edf(set).ok) return set;
  }
}

}  // namespace

TEST_SUITE_BEGIN("policies");

TEST_CASE("anchor tick") {
  Rational B(10);
  CHECK(anchor_tick({0, 0, 25, 3}, Rational(1), B) == 15);
  CHECK(anchor_tick({0, 20, 25, 1}, Rational(1), B) == 20);
  CHECK(anchor_tick({0, 0, 100, 1}, default_pair_lambda(), Rational(100)) ==
        16);
}

TEST_CASE("urgency check") {
  std::vector<JobRuntime> queue{{{0, 0, 5, 3}, 3}, {{1, 0, 4, 2}, 2}};
  auto t = urgency_check(queue, 0);
  REQUIRE(t.has_value());
  CHECK(*t == 5);  // 2 due by 4 leaves slack; 5 due by 5 has none
  CHECK_FALSE(urgency_check({}, 0).has_value());
  std::vector<JobRuntime> slack{{{0, 0, 10, 1}, 1}};
  CHECK_FALSE(urgency_check(slack, 0).has_value());
}

TEST_CASE("anchor policy delays a lone job to its anchor") {
  AnchorPolicy policy(params_b(10));
  auto res = run(policy, {{0, 0, 30, 1}}, 10, 32);
  CHECK(res.report.feasible());
  REQUIRE(res.trace.wakes.size() == 1);
  CHECK(res.trace.wakes[0].t == 20);
  const auto& tl = res.trace.segments[0];
  REQUIRE(tl.size() == 4);
  CHECK(tl[1].state == SegmentState::Busy);
  CHECK(tl[1].start == 20);
  CHECK(tl[2].state == SegmentState::Standby);
  CHECK(tl[2].end == 30);  // off exactly break-even after the interval began
  CHECK(res.energy.total() == Rational(20));
  auto ivs = awake_intervals(res.trace);
  REQUIRE(ivs.size() == 1);
  CHECK(ivs[0].right - ivs[0].left == 10);
  CHECK(ivs[0].completed);
}

TEST_CASE("tight fresh work rides the single processor") {
  // The second job fills its whole window the moment it arrives, but it is
  // fresh: one processor handles both in deadline order.
  AnchorPolicy policy(params_b(10));
  auto res = run(policy, {{0, 0, 12, 1}, {1, 2, 4, 2}}, 10, 14);
  CHECK(res.report.feasible());
  CHECK(res.trace.processors() == 1);
  REQUIRE(res.trace.wakes.size() == 1);
  CHECK(res.trace.wakes[0].t == 2);
  const auto& tl = res.trace.segments[0];
  // off [0,2), job 1 [2,4), job 0 [4,5), standby [5,12), off
  REQUIRE(tl.size() == 5);
  CHECK(tl[1].job == 1);
  CHECK(tl[2].job == 0);
  CHECK(tl[3].state == SegmentState::Standby);
  CHECK(tl[3].end == 12);
}

TEST_CASE("carried-over overload wakes the second processor") {
  AnchorPolicy policy(params_b(10));
  auto res = run(policy, {{0, 0, 24, 4}, {1, 16, 24, 6}}, 10, 26);
  CHECK(res.report.feasible());
  REQUIRE(res.trace.processors() == 2);
  REQUIRE(res.trace.wakes.size() == 2);
  CHECK(res.trace.wakes[0].t == 14);  // anchor of the early job
  CHECK(res.trace.wakes[1].t == 16);  // burst entry on the late arrival
  const auto& p0 = res.trace.segments[0];
  REQUIRE(p0.size() == 3);
  CHECK(p0[1].state == SegmentState::Busy);
  CHECK(p0[1].job == 0);
  CHECK(p0[1].start == 14);
  CHECK(p0[1].end == 18);  // backlog drained, first processor retires
  const auto& p1 = res.trace.segments[1];
  // off [0,16), busy job 1 [16,22), standby [22,24), off
  REQUIRE(p1.size() == 4);
  CHECK(p1[1].job == 1);
  CHECK(p1[1].end == 22);
  CHECK(p1[2].state == SegmentState::Standby);
  CHECK(p1[2].end == 24);

  auto ivs = awake_intervals(res.trace);
  REQUIRE(ivs.size() == 1);
  CHECK(ivs[0].left == 14);
  CHECK(ivs[0].right == 24);
  CHECK(ivs[0].wake_count == 2);
  CHECK(ivs[0].executed_jobs == std::vector<int>{0, 1});
  CHECK(res.energy.total() == Rational(20 + 10 + 2));
}

TEST_CASE("zero-slack long job wakes immediately, no anchor wait") {
  AnchorPolicy policy(params_b(10));
  auto res = run(policy, {{0, 5, 20, 15}}, 10, 22);
  CHECK(res.report.feasible());
  REQUIRE(res.trace.wakes.size() == 1);
  CHECK(res.trace.wakes[0].t == 5);
  const auto& tl = res.trace.segments[0];
  // off [0,5), busy [5,20), off [20,22): empty past break-even, instant off
  REQUIRE(tl.size() == 3);
  CHECK(tl[1].state == SegmentState::Busy);
  CHECK(tl[1].end == 20);
  CHECK(res.energy.standby_ticks == 0);
}

TEST_CASE("paired execution drains a backlog two jobs per tick") {
  std::vector<Job> jobs{{0, 0, 5, 1}, {1, 0, 5, 1}, {2, 0, 5, 1},
                        {3, 0, 5, 1}};

  AnchorPolicy paired(params_b(4), {.lambda = Rational(1),
                                    .pair_when_queue_clear = true,
                                    .require_unit_jobs = true});
  auto res = run(paired, jobs, 4, 6);
  CHECK(res.report.feasible());
  REQUIRE(res.trace.wakes.size() == 2);
  CHECK(res.trace.wakes[0].t == 1);
  CHECK(res.trace.wakes[1].t == 1);
  CHECK(res.energy.busy_ticks == 4);
  CHECK(res.energy.standby_ticks == 2);  // survivor waits out break-even
  CHECK(res.energy.total() == Rational(14));

  AnchorPolicy plain(params_b(4));
  auto base = run(plain, jobs, 4, 6);
  CHECK(base.report.feasible());
  CHECK(base.energy.standby_ticks == 4);  // second processor idles instead
  CHECK(base.energy.total() == Rational(16));
}

TEST_CASE("paired mode rejects non-unit jobs") {
  CHECK_THROWS_AS(
      AnchorPolicy(params_b(4), {.lambda = Rational(1),
                                 .pair_when_queue_clear = true,
                                 .require_unit_jobs = false}),
      std::invalid_argument);
  AnchorPolicy policy(params_b(4), {.lambda = Rational(1),
                                    .pair_when_queue_clear = true,
                                    .require_unit_jobs = true});
  CHECK_THROWS_AS(run(policy, {{0, 0, 5, 2}}, 4, 6), std::invalid_argument);
}

TEST_CASE("doomed backlog trips the internal assertion") {
  AnchorPolicy policy(params_b(10));
  CHECK_THROWS_AS(run(policy, {{0, 0, 3, 3}, {1, 0, 3, 3}}, 10, 5),
                  std::logic_error);
}

TEST_CASE("anchor policy namespace stays within two processors") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    auto jobs = random_feasible_set(rng, 6, 20, false);
    AnchorPolicy policy(params_b(7));
    auto res = run(policy, jobs, 7, 40);
    CHECK(res.report.feasible());
    CHECK(res.trace.processors() <= 2);
  }
}

TEST_CASE("unit-job variant stays feasible too") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 200; ++trial) {
    auto jobs = random_feasible_set(rng, 8, 24, true);
    AnchorPolicy policy(params_b(5), {.lambda = default_pair_lambda(),
                                      .pair_when_queue_clear = true,
                                      .require_unit_jobs = true});
    auto res = run(policy, jobs, 5, 40);
    CHECK(res.report.feasible());
    CHECK(res.trace.processors() <= 2);
  }
}

TEST_CASE("latest-start runs a lone job at the last moment") {
  LatestStartPolicy policy(params_b(10));
  auto res = run(policy, {{0, 0, 15, 1}}, 10, 28);
  CHECK(res.report.feasible());
  REQUIRE(res.trace.wakes.size() == 1);
  CHECK(res.trace.wakes[0].t == 14);
  const auto& tl = res.trace.segments[0];
  // off [0,14), busy [14,15), standby [15,25), off
  REQUIRE(tl.size() == 4);
  CHECK(tl[1].state == SegmentState::Busy);
  CHECK(tl[2].state == SegmentState::Standby);
  CHECK(tl[2].end == 25);
}

TEST_CASE("latest-start forces parallel processors under overlap") {
  LatestStartPolicy policy(params_b(10));
  auto res = run(policy, {{0, 0, 3, 3}, {1, 1, 3, 2}}, 10, 14);
  CHECK(res.report.feasible());
  CHECK(res.trace.processors() == 2);
  REQUIRE(res.trace.wakes.size() == 2);
  CHECK(res.trace.wakes[0].t == 0);
  CHECK(res.trace.wakes[1].t == 1);
}

TEST_CASE("latest-start reuses a standby processor inside break-even") {
  LatestStartPolicy policy(params_b(10));
  auto res = run(policy, {{0, 0, 3, 1}, {1, 5, 8, 1}}, 10, 18);
  CHECK(res.report.feasible());
  CHECK(res.trace.wakes.size() == 1);  // gap of 4 < break-even keeps it on
}

TEST_CASE("latest-start powers off across a long gap") {
  LatestStartPolicy policy(params_b(10));
  auto res = run(policy, {{0, 0, 3, 1}, {1, 20, 23, 1}}, 10, 34);
  CHECK(res.report.feasible());
  CHECK(res.trace.wakes.size() == 2);
}

TEST_CASE("latest-start never misses, even on unschedulable streams") {
  std::mt19937_64 rng(303);
  auto tick = [&](Tick lo, Tick hi) {
    return std::uniform_int_distribution<Tick>(lo, hi)(rng);
  };
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Job> jobs;
    int n = static_cast<int>(tick(1, 8));
    for (int i = 0; i < n; ++i) {
      Tick a = tick(0, 15);
      Tick d = tick(a + 1, 20);
      jobs.push_back({i, a, d, tick(1, d - a)});
    }
    LatestStartPolicy policy(params_b(6));
    auto res = run(policy, jobs, 6, 40);
    CHECK(res.report.misses.empty());
  }
}

TEST_CASE("one stream with two processors matches the anchor policy") {
  std::vector<Job> jobs{{0, 0, 30, 1}};
  MultiStreamPolicy ms(params_b(10), 1, 2);
  AnchorPolicy anchor(params_b(10));
  auto a = run(ms, jobs, 10, 32);
  auto b = run(anchor, jobs, 10, 32);
  CHECK(trace_to_json(a.trace) == trace_to_json(b.trace));
}

TEST_CASE("rich budget runs streams independently") {
  // Two streams, four processors: either stream may use two of its own.
  std::vector<Job> jobs{{0, 0, 24, 4, 0}, {1, 16, 24, 6, 0},
                        {2, 0, 24, 4, 1}, {3, 16, 24, 6, 1}};
  MultiStreamPolicy ms(params_b(10), 2, 4);
  auto res = run(ms, jobs, 10, 26);
  CHECK(res.report.feasible());
  CHECK(res.trace.processors() == 4);
  CHECK(res.energy.wake_count == 4);
}

TEST_CASE("scarce budget spills slack jobs to the shared processor") {
  std::vector<Job> jobs{{0, 0, 20, 1, 0}, {1, 1, 21, 1, 1}, {2, 2, 22, 1, 2}};
  MultiStreamPolicy ms(params_b(10), 3, 4);
  auto res = run(ms, jobs, 10, 32);
  CHECK(res.report.feasible());
  CHECK(res.trace.processors() == 1);  // everything fit the shared queue
  CHECK(res.energy.wake_count == 1);
}

TEST_CASE("scarce budget wakes a stream processor when spill is full") {
  std::vector<Job> jobs{{0, 0, 2, 2, 0}, {1, 1, 2, 1, 1}};
  MultiStreamPolicy ms(params_b(10), 3, 4);
  auto res = run(ms, jobs, 10, 24);
  CHECK(res.report.feasible());
  CHECK(res.trace.processors() == 2);
  // The stream processor hangs on until the shared one powers off.
  auto ivs = awake_intervals(res.trace);
  REQUIRE(ivs.size() == 1);
  CHECK(ivs[0].left == 0);
  CHECK(ivs[0].right == 10);
}

TEST_CASE("scarce budget stays within the processor cap") {
  std::vector<Job> jobs{{0, 0, 4, 4, 0}, {1, 0, 4, 4, 1}, {2, 0, 4, 4, 2}};
  MultiStreamPolicy ms(params_b(10), 3, 4);
  auto res = run(ms, jobs, 10, 24);
  CHECK(res.report.feasible());
  CHECK(res.trace.processors() <= 4);
}

TEST_CASE("spill admission sees shared jobs queued after the newcomer") {
  // Jobs 6 and 7 hold shared work due by 9; job 1 arrives with a smaller id,
  // so admission must look past queue order or it oversubscribes the shared
  // processor and dooms job 1.
  std::vector<Job> jobs{
      {0, 1, 10, 3, 0}, {1, 3, 10, 4, 0}, {2, 14, 17, 2, 0},
      {3, 0, 7, 1, 1},  {4, 5, 10, 3, 1}, {5, 8, 18, 3, 1},
      {6, 2, 9, 1, 2},  {7, 1, 9, 2, 2},  {8, 7, 16, 2, 2},
  };
  MultiStreamPolicy ms(params_b(5), 3, 4);
  auto res = run(ms, jobs, 5, 26);
  CHECK(res.report.feasible());
  CHECK(res.trace.processors() <= 4);
}

TEST_CASE("multi-stream configuration errors") {
  CHECK_THROWS_AS(MultiStreamPolicy(params_b(10), 3, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(MultiStreamPolicy(params_b(10), 0, 2),
                  std::invalid_argument);
  MultiStreamPolicy ms(params_b(10), 2, 3);
  CHECK_THROWS_AS(run(ms, {{0, 0, 5, 1, 7}}, 10, 8), std::invalid_argument);
}

TEST_CASE("anchor policy is feasible across random schedulable streams") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 300; ++trial) {
    auto jobs = random_feasible_set(rng, 8, 30, false);
    AnchorPolicy policy(params_b(9));
    auto res = run(policy, jobs, 9, 60);
    CHECK(res.report.feasible());
  }
}

TEST_SUITE_END();
