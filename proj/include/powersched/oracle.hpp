#pragma once

#include <span>
#include <vector>

#include "powersched/energy.hpp"
#include "powersched/job.hpp"
#include "powersched/trace.hpp"

namespace powersched {

// The exact search refuses instances beyond these bounds instead of
// approximating; callers needing bigger instances use opt_lower_bound or a
// witness schedule.
struct OracleLimits {
  int max_jobs = 8;
  Tick max_horizon = 40;
};

struct OracleResult {
  Rational energy;
  ScheduleTrace trace;
};

// Minimum-energy feasible single-processor schedule, found by exact search
// over per-tick decisions (off / standby / run one pending job). The trace
// attains the returned energy. Throws std::invalid_argument past the
// limits and InfeasibleError when no feasible schedule exists.
OracleResult opt_energy_exact(std::span<const Job> jobs,
                              const EnergyParams& params,
                              const OracleLimits& limits = {});

// Every job's work must run at busy power, and any nonempty instance wakes
// at least once: psi_b * total exec + E_w. Never exceeds the exact optimum;
// zero for an empty instance.
Rational opt_lower_bound(std::span<const Job> jobs,
                         const EnergyParams& params);

}  // namespace powersched
