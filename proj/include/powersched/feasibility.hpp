#pragma once

#include <span>
#include <stdexcept>

#include "powersched/job.hpp"
#include "powersched/trace.hpp"

namespace powersched {

// One demand interval (left, right): demand = total exec of jobs whose whole
// window sits inside it. Violated when demand exceeds the interval length.
struct ConditionWitness {
  Tick left = 0;
  Tick right = 0;
  Tick demand = 0;
  bool satisfied = true;
};

struct ConditionResult {
  bool ok = true;
  ConditionWitness worst;  // interval maximizing demand - (right - left)
};

// Single-processor schedulability test: every interval bounded by an arrival
// on the left and a deadline on the right must have enough room for the jobs
// it fully contains. Checking those intervals suffices since demand only
// changes at arrival/deadline points. O(n^2) over the critical intervals.
ConditionResult condition_edf(std::span<const Job> jobs);

class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const ConditionWitness& w);
  ConditionWitness witness;
};

// Earliest-deadline-first schedule on one processor, ties broken by smaller
// job id. The processor wakes at the first arrival, idles on standby between
// jobs, and powers off once everything is done. Throws InfeasibleError when
// condition_edf fails.
ScheduleTrace edf_schedule(std::span<const Job> jobs);

}  // namespace powersched
