#include <stdexcept>

#include "doctest.h"
#include "powersched/analysis.hpp"
#include "powersched/feasibility.hpp"
#include "powersched/harness.hpp"
#include "powersched/invariants.hpp"
#include "powersched/policies.hpp"

using namespace powersched;

namespace {

EnergyParams flat_params(long long wake) {
  EnergyParams p;
  p.wake_energy = Rational(wake);
  p.busy_power = Rational(1);
  p.standby_power = Rational(1);
  return p;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("generator is deterministic per seed") {
  auto a = generate_feasible(8, 60, Rational(1, 3), false, 42);
  auto b = generate_feasible(8, 60, Rational(1, 3), false, 42);
  CHECK(jobs_to_json(a.jobs) == jobs_to_json(b.jobs));
  CHECK(trace_to_json(a.witness) == trace_to_json(b.witness));
  auto c = generate_feasible(8, 60, Rational(1, 3), false, 43);
  CHECK(jobs_to_json(a.jobs) != jobs_to_json(c.jobs));
}

TEST_CASE("generated instances pass the demand condition with a live witness") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    int n = 1 + static_cast<int>(seed % 8);
    bool unit = seed % 2 == 0;
    auto gi = generate_feasible(n, 40, Rational(1, 3), unit, seed);
    REQUIRE(gi.jobs.size() == static_cast<size_t>(n));
    CHECK(condition_edf(gi.jobs).ok);
    CHECK(check_trace_against_jobs(gi.witness, gi.jobs).feasible());
    for (const Job& j : gi.jobs) {
      CHECK(j.arrival >= 0);
      CHECK(j.deadline <= 40);
      if (unit) CHECK(j.exec == 1);
    }
  }
}

TEST_CASE("generator rejects impossible packings") {
  CHECK_THROWS_AS(generate_feasible(0, 10, Rational(0), false, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_feasible(5, 4, Rational(0), false, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_feasible(3, 10, Rational(-1, 2), false, 1),
                  std::invalid_argument);
}

TEST_CASE("zero slack and a full horizon force the tight packing") {
  auto gi = generate_feasible(10, 10, Rational(0), true, 5);
  for (int i = 0; i < 10; ++i) {
    CHECK(gi.jobs[i].arrival == i);
    CHECK(gi.jobs[i].deadline == i + 1);
    CHECK(gi.jobs[i].exec == 1);
  }
}

TEST_CASE("stream generator tags streams and renumbers ids") {
  auto gs = generate_feasible_streams(3, 4, 40, Rational(1, 4), false, 11);
  REQUIRE(gs.jobs.size() == 12);
  REQUIRE(gs.parts.size() == 3);
  for (int s = 0; s < 3; ++s) {
    CHECK(condition_edf(gs.parts[s].jobs).ok);
    for (int j = 0; j < 4; ++j) {
      const Job& merged = gs.jobs[s * 4 + j];
      const Job& local = gs.parts[s].jobs[j];
      CHECK(merged.id == s * 4 + j);
      CHECK(merged.stream == s);
      CHECK(local.stream == 0);
      CHECK(merged.arrival == local.arrival);
      CHECK(merged.deadline == local.deadline);
      CHECK(merged.exec == local.exec);
    }
  }
}

TEST_CASE("anchor runs over generated instances keep their invariants") {
  EnergyParams params = flat_params(8);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto gi = generate_feasible(6, 30, Rational(1, 2), false, seed);
    AnchorPolicy policy(params, {});
    SimulateOptions opts;
    opts.params = params;
    opts.horizon = max_deadline(gi.jobs) + 12;
    opts.max_processors = 8;
    auto sim = simulate_jobs(policy, gi.jobs, opts);
    REQUIRE(sim.report.feasible());
    CHECK(check_anchor_invariants(sim.trace, gi.jobs, params).empty());
  }
}

TEST_CASE("invariants flag an interval padded far past its work") {
  EnergyParams params = flat_params(5);
  std::vector<Job> jobs{{0, 0, 40, 1, 0}};
  TraceBuilder tb;
  tb.record_wake(0, 0);
  tb.record(0, 0, SegmentState::Busy, 0);
  for (Tick t = 1; t < 40; ++t) tb.record(0, t, SegmentState::Standby);
  auto trace = tb.finish(41);
  // Overhead 5 + 39 breaks both the general and the single-wake bound.
  auto v = check_anchor_invariants(trace, jobs, params);
  CHECK(v.size() == 2);
}

TEST_CASE("invariants flag a short interval with an unbacked second wake") {
  EnergyParams params = flat_params(10);
  std::vector<Job> jobs{{0, 0, 30, 2, 0}, {1, 0, 30, 1, 0}};
  TraceBuilder tb;
  tb.record_wake(0, 0);
  tb.record(0, 0, SegmentState::Busy, 0);
  tb.record(0, 1, SegmentState::Busy, 0);
  tb.record_wake(1, 1);
  tb.record(1, 1, SegmentState::Busy, 1);
  auto trace = tb.finish(30);
  auto v = check_anchor_invariants(trace, jobs, params);
  // Three executed ticks cannot justify the second wake, and the interval
  // ends well before break-even.
  CHECK(v.size() == 2);
}

TEST_CASE("invariants flag three wakes in one awake interval") {
  EnergyParams params = flat_params(4);
  std::vector<Job> jobs{{0, 0, 30, 6, 0}, {1, 0, 30, 1, 0}, {2, 0, 30, 1, 0}};
  TraceBuilder tb;
  tb.record_wake(0, 0);
  for (Tick t = 0; t < 6; ++t) tb.record(0, t, SegmentState::Busy, 0);
  tb.record_wake(1, 1);
  tb.record(1, 1, SegmentState::Busy, 1);
  tb.record_wake(1, 3);
  tb.record(1, 3, SegmentState::Busy, 2);
  auto trace = tb.finish(30);
  auto v = check_anchor_invariants(trace, jobs, params);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("3 wakes") != std::string::npos);
}

TEST_CASE("paired unit bound catches overhead the general bound tolerates") {
  EnergyParams params = flat_params(10);
  std::vector<Job> jobs;
  for (int i = 0; i < 30; ++i) jobs.push_back({i, 0, 60, 1, 0});
  TraceBuilder tb;
  tb.record_wake(0, 0);
  tb.record_wake(1, 0);
  for (Tick t = 0; t < 15; ++t) {
    tb.record(0, t, SegmentState::Busy, static_cast<int>(t));
    tb.record(1, t, SegmentState::Busy, static_cast<int>(15 + t));
  }
  for (Tick t = 15; t < 25; ++t) tb.record(1, t, SegmentState::Standby);
  auto trace = tb.finish(40);

  InvariantOptions opts;
  opts.lambda = default_pair_lambda();
  CHECK(check_anchor_invariants(trace, jobs, params, opts).empty());
  opts.paired_units = true;
  auto v = check_anchor_invariants(trace, jobs, params, opts);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("paired") != std::string::npos);
}

TEST_CASE("ratio experiment against the exact reference stays within 4x") {
  ExperimentConfig cfg;
  cfg.policy.name = "S";
  cfg.workload.instances = 50;
  cfg.workload.jobs = 4;
  cfg.workload.horizon = 20;
  cfg.workload.slack = Rational(1, 3);
  cfg.params = flat_params(6);
  cfg.seed = 2026;
  auto rows = run_ratio_experiment(cfg);
  REQUIRE(rows.size() == 50);
  for (const RatioRow& r : rows) {
    CHECK(r.error.empty());
    CHECK(r.violations == 0);
    CHECK(r.opt_energy > Rational(0));
    CHECK(r.ratio >= Rational(1));
    CHECK(r.ratio <= Rational(4));
  }
  auto rows2 = run_ratio_experiment(cfg);
  CHECK(ratio_rows_to_csv(rows) == ratio_rows_to_csv(rows2));
}

TEST_CASE("oracle limit failures become error rows and the run continues") {
  ExperimentConfig cfg;
  cfg.policy.name = "S";
  cfg.workload.instances = 3;
  cfg.workload.jobs = 9;
  cfg.workload.horizon = 25;
  cfg.params = flat_params(5);
  auto rows = run_ratio_experiment(cfg);
  REQUIRE(rows.size() == 3);
  for (const RatioRow& r : rows) {
    CHECK(!r.error.empty());
    CHECK(r.ratio == Rational(0));
  }
}

TEST_CASE("alternative references keep the ratio meaningful") {
  ExperimentConfig cfg;
  cfg.policy.name = "L";
  cfg.workload.instances = 20;
  cfg.workload.jobs = 10;
  cfg.workload.horizon = 40;
  cfg.params = flat_params(7);
  cfg.oracle = OracleMode::LowerBound;
  for (const RatioRow& r : run_ratio_experiment(cfg)) {
    CHECK(r.error.empty());
    CHECK(r.ratio >= Rational(1));
  }
  cfg.oracle = OracleMode::Baseline;
  for (const RatioRow& r : run_ratio_experiment(cfg)) {
    CHECK(r.error.empty());
    CHECK(r.opt_energy > Rational(0));
  }
}

TEST_CASE("prefix accounting matches whole-run totals past the horizon") {
  ExperimentConfig cfg;
  cfg.policy.name = "S";
  cfg.workload.instances = 10;
  cfg.workload.jobs = 4;
  cfg.workload.horizon = 20;
  cfg.params = flat_params(6);
  cfg.seed = 7;
  auto full = run_ratio_experiment(cfg);
  cfg.at_time = 100000;
  auto late = run_ratio_experiment(cfg);
  CHECK(ratio_rows_to_csv(full) == ratio_rows_to_csv(late));
  cfg.at_time = 5;
  auto early = run_ratio_experiment(cfg);
  REQUIRE(early.size() == full.size());
  for (size_t i = 0; i < full.size(); ++i)
    CHECK(early[i].policy_energy <= full[i].policy_energy);
}

TEST_CASE("multi-stream experiment sums per-stream optima") {
  ExperimentConfig cfg;
  cfg.policy.name = "MS";
  cfg.policy.streams = 3;
  cfg.policy.processors = 4;
  cfg.workload.instances = 10;
  cfg.workload.jobs = 3;
  cfg.workload.horizon = 18;
  cfg.workload.slack = Rational(1, 3);
  cfg.workload.streams = 3;
  cfg.params = flat_params(5);
  auto rows = run_ratio_experiment(cfg);
  REQUIRE(rows.size() == 10);
  for (const RatioRow& r : rows) {
    CHECK(r.error.empty());
    CHECK(r.violations == 0);
    CHECK(r.ratio > Rational(0));
    CHECK(r.ratio <= Rational(12));
  }

  cfg.workload.streams = 2;
  CHECK_THROWS_AS(run_ratio_experiment(cfg), std::invalid_argument);
}

TEST_CASE("policy specs map to the right policies") {
  EnergyParams params = flat_params(4);
  CHECK(make_policy({.name = "S"}, params)->name() == "anchor");
  CHECK(make_policy({.name = "Sdagger"}, params)->name() == "anchor-pair");
  CHECK(make_policy({.name = "L"}, params)->name() == "latest-start");
  CHECK(!make_policy({.name = "MS"}, params)->name().empty());
  CHECK_THROWS_AS(make_policy({.name = "edf"}, params), std::invalid_argument);
}

TEST_CASE("oracle mode names round-trip") {
  for (auto mode : {OracleMode::Exact, OracleMode::Baseline,
                    OracleMode::LowerBound})
    CHECK(oracle_mode_from_string(to_string(mode)) == mode);
  CHECK_THROWS_AS(oracle_mode_from_string("optimal"), std::invalid_argument);
}

TEST_CASE("csv output quotes error text") {
  std::vector<RatioRow> rows(1);
  rows[0].instance = 3;
  rows[0].policy_energy = Rational(7, 2);
  rows[0].error = "bad \"thing\", twice";
  auto csv = ratio_rows_to_csv(rows);
  CHECK(csv ==
        "instance,policy_energy,opt_energy,ratio,invariant_violations,error\n"
        "3,7/2,0,0,0,\"bad \"\"thing\"\", twice\"\n");
}

}  // TEST_SUITE
