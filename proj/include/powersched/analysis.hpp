#pragma once

#include <span>
#include <string>
#include <vector>

#include "powersched/energy.hpp"
#include "powersched/job.hpp"
#include "powersched/trace.hpp"

namespace powersched {

EnergyBreakdown energy_of_trace(const ScheduleTrace& trace,
                                const EnergyParams& params);

// Same accounting restricted to ticks in [left, right); wakes count if their
// instant lies in the window.
EnergyBreakdown energy_in_window(const ScheduleTrace& trace,
                                 const EnergyParams& params, Tick left,
                                 Tick right);

// Maximal span in which at least one processor is on. Spans separated only by
// a shared boundary tick are distinct; they merge only when they overlap.
struct AwakeInterval {
  Tick left = 0;
  Tick right = 0;          // exclusive
  int wake_count = 0;      // wakes with left <= t < right
  std::vector<int> executed_jobs;  // jobs with at least one busy tick inside
  bool completed = false;  // false when the interval is cut off by the horizon
};

std::vector<AwakeInterval> awake_intervals(const ScheduleTrace& trace);

struct DeadlineMiss {
  int job = 0;
  Tick at = 0;
};

struct TraceCheckReport {
  std::vector<DeadlineMiss> misses;
  std::vector<std::string> violations;  // structural problems, empty when clean
  bool feasible() const { return misses.empty() && violations.empty(); }
};

// Checks the trace executes every job inside its window for exactly its
// execution requirement, never runs one job on two processors in the same
// tick, and never runs unknown jobs.
TraceCheckReport check_trace_against_jobs(const ScheduleTrace& trace,
                                          std::span<const Job> jobs);

}  // namespace powersched
