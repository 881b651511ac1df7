#include "powersched/feasibility.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace powersched {

ConditionResult condition_edf(std::span<const Job> jobs) {
  validate_job_set(jobs);
  std::vector<Tick> lefts, rights;
  for (const Job& j : jobs) {
    lefts.push_back(j.arrival);
    rights.push_back(j.deadline);
  }
  std::sort(lefts.begin(), lefts.end());
  lefts.erase(std::unique(lefts.begin(), lefts.end()), lefts.end());
  std::sort(rights.begin(), rights.end());
  rights.erase(std::unique(rights.begin(), rights.end()), rights.end());

  ConditionResult res;
  bool have_witness = false;
  Tick worst_slack = 0;
  for (Tick l : lefts) {
    for (Tick r : rights) {
      if (l >= r) continue;
      Tick demand = 0;
      for (const Job& j : jobs)
        if (l <= j.arrival && j.deadline <= r) demand += j.exec;
      Tick slack = demand - (r - l);  // positive means overload
      if (!have_witness || slack > worst_slack) {
        have_witness = true;
        worst_slack = slack;
        res.worst = {l, r, demand, slack <= 0};
      }
    }
  }
  res.ok = !have_witness || worst_slack <= 0;
  return res;
}

InfeasibleError::InfeasibleError(const ConditionWitness& w)
    : std::runtime_error("no single-processor schedule: interval (" +
                         std::to_string(w.left) + ", " +
                         std::to_string(w.right) + ") needs " +
                         std::to_string(w.demand) + " ticks"),
      witness(w) {}

ScheduleTrace edf_schedule(std::span<const Job> jobs) {
  auto cond = condition_edf(jobs);
  if (!cond.ok) throw InfeasibleError(cond.worst);

  TraceBuilder b;
  Tick horizon = max_deadline(jobs);
  if (jobs.empty()) return b.finish(0);

  std::vector<JobRuntime> pending;
  for (const Job& j : jobs) pending.push_back({j, j.exec});
  std::sort(pending.begin(), pending.end(),
            [](const JobRuntime& a, const JobRuntime& b) {
              return a.job.id < b.job.id;
            });

  Tick start = std::min_element(pending.begin(), pending.end(),
                                [](const JobRuntime& a, const JobRuntime& b) {
                                  return a.job.arrival < b.job.arrival;
                                })
                   ->job.arrival;
  b.record_wake(0, start);
  for (Tick t = start; t < horizon; ++t) {
    JobRuntime* pick = nullptr;
    for (JobRuntime& jr : pending)
      if (jr.job.arrival <= t &&
          (!pick || jr.job.deadline < pick->job.deadline))
        pick = &jr;
    if (pick) {
      b.record(0, t, SegmentState::Busy, pick->job.id);
      if (--pick->remaining == 0)
        pending.erase(pending.begin() + (pick - pending.data()));
    } else if (!pending.empty()) {
      b.record(0, t, SegmentState::Standby);
    } else {
      break;  // hull complete, stay off through the horizon
    }
  }
  return b.finish(horizon);
}

}  // namespace powersched
