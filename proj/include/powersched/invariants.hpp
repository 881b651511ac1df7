#pragma once

#include <span>
#include <string>
#include <vector>

#include "powersched/energy.hpp"
#include "powersched/job.hpp"
#include "powersched/rational.hpp"
#include "powersched/trace.hpp"

namespace powersched {

struct InvariantOptions {
  Rational lambda{1};
  // Apply the tighter unit-job bound the paired variant guarantees.
  bool paired_units = false;
};

// Per awake interval structure the anchor policy maintains:
//   at most two wakes;
//   a second wake only when the interval executes >= lambda * B work;
//   wake+standby energy <= psi_sigma * (executed work) + (3 - lambda) E_w;
//   single-wake intervals spend at most 2 E_w on wake+standby;
//   paired unit variant spends at most (3 - lambda/2) E_w;
//   completed intervals last at least break-even many ticks.
// Returns one message per violation, empty when the trace is clean.
std::vector<std::string> check_anchor_invariants(
    const ScheduleTrace& trace, std::span<const Job> jobs,
    const EnergyParams& params, const InvariantOptions& opts = {});

}  // namespace powersched
