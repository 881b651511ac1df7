#include "powersched/analysis.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace powersched {

EnergyBreakdown energy_of_trace(const ScheduleTrace& trace,
                                const EnergyParams& params) {
  return energy_in_window(trace, params, 0, trace.horizon);
}

EnergyBreakdown energy_in_window(const ScheduleTrace& trace,
                                 const EnergyParams& params, Tick left,
                                 Tick right) {
  EnergyBreakdown out;
  for (const auto& timeline : trace.segments) {
    for (const Segment& seg : timeline) {
      Tick lo = std::max(seg.start, left);
      Tick hi = std::min(seg.end, right);
      if (lo >= hi) continue;
      Tick n = hi - lo;
      if (seg.state == SegmentState::Busy)
        out.busy_ticks += n;
      else if (seg.state == SegmentState::Standby)
        out.standby_ticks += n;
    }
  }
  for (const WakeEvent& w : trace.wakes)
    if (left <= w.t && w.t < right) ++out.wake_count;
  out.wake_cost = Rational(out.wake_count) * params.wake_energy;
  out.busy_cost = Rational(out.busy_ticks) * params.busy_power;
  out.standby_cost = Rational(out.standby_ticks) * params.standby_power;
  return out;
}

std::vector<AwakeInterval> awake_intervals(const ScheduleTrace& trace) {
  // Collect per-processor on-spans, then merge overlapping ones.
  struct Span {
    Tick lo, hi;
  };
  std::vector<Span> spans;
  for (const auto& timeline : trace.segments) {
    Tick lo = -1;
    for (const Segment& seg : timeline) {
      if (seg.state != SegmentState::Off) {
        if (lo < 0) lo = seg.start;
      } else if (lo >= 0) {
        spans.push_back({lo, seg.start});
        lo = -1;
      }
    }
    if (lo >= 0) spans.push_back({lo, trace.horizon});
  }
  std::sort(spans.begin(), spans.end(),
            [](const Span& a, const Span& b) { return a.lo < b.lo; });

  std::vector<AwakeInterval> out;
  for (const Span& s : spans) {
    if (!out.empty() && s.lo < out.back().right)
      out.back().right = std::max(out.back().right, s.hi);
    else
      out.push_back({.left = s.lo, .right = s.hi});
  }

  for (AwakeInterval& iv : out) {
    iv.completed = iv.right < trace.horizon;
    for (const WakeEvent& w : trace.wakes)
      if (iv.left <= w.t && w.t < iv.right) ++iv.wake_count;
    std::set<int> jobs;
    for (const auto& timeline : trace.segments)
      for (const Segment& seg : timeline)
        if (seg.state == SegmentState::Busy && seg.start < iv.right &&
            seg.end > iv.left)
          jobs.insert(seg.job);
    iv.executed_jobs.assign(jobs.begin(), jobs.end());
  }
  return out;
}

TraceCheckReport check_trace_against_jobs(const ScheduleTrace& trace,
                                          std::span<const Job> jobs) {
  TraceCheckReport report;
  std::map<int, const Job*> by_id;
  for (const Job& j : jobs) by_id[j.id] = &j;

  std::map<int, Tick> done;
  std::map<Tick, std::set<int>> running_at;  // parallel self-execution check
  for (const auto& timeline : trace.segments) {
    for (const Segment& seg : timeline) {
      if (seg.state != SegmentState::Busy) continue;
      auto it = by_id.find(seg.job);
      if (it == by_id.end()) {
        report.violations.push_back("unknown job " + std::to_string(seg.job) +
                                    " in trace");
        continue;
      }
      const Job& j = *it->second;
      if (seg.start < j.arrival)
        report.violations.push_back("job " + std::to_string(j.id) +
                                    " runs before arrival");
      if (seg.end > j.deadline)
        report.violations.push_back("job " + std::to_string(j.id) +
                                    " runs past deadline");
      for (Tick t = seg.start; t < seg.end; ++t)
        if (!running_at[t].insert(seg.job).second)
          report.violations.push_back("job " + std::to_string(seg.job) +
                                      " on two processors at " +
                                      std::to_string(t));
      done[seg.job] += seg.end - seg.start;
    }
  }
  for (const Job& j : jobs) {
    Tick got = done.count(j.id) ? done[j.id] : 0;
    if (got > j.exec)
      report.violations.push_back("job " + std::to_string(j.id) +
                                  " over-executed");
    else if (got < j.exec)
      report.misses.push_back({j.id, j.deadline});
  }
  return report;
}

}  // namespace powersched
