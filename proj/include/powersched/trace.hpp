#pragma once

#include <string>
#include <vector>

#include "powersched/job.hpp"

namespace powersched {

enum class SegmentState { Off, Standby, Busy };

const char* to_string(SegmentState s);
SegmentState segment_state_from_string(const std::string& s);

// Half-open run of ticks [start, end) in one state. Busy segments carry the
// job id; others keep job == -1.
struct Segment {
  Tick start = 0;
  Tick end = 0;
  SegmentState state = SegmentState::Off;
  int job = -1;
};

struct WakeEvent {
  int proc = 0;
  Tick t = 0;
};

struct ScheduleTrace {
  Tick horizon = 0;
  std::vector<std::vector<Segment>> segments;  // one timeline per processor
  std::vector<WakeEvent> wakes;

  int processors() const { return static_cast<int>(segments.size()); }

  // Segments must tile [0, horizon) per processor, busy segments must name a
  // job, and wakes must line up 1:1 with off-to-on transitions.
  void validate() const;
};

// Accumulates per-tick processor states and coalesces them into segments.
// Processors unknown before their first recorded tick count as off.
class TraceBuilder {
 public:
  void record(int proc, Tick t, SegmentState state, int job = -1);
  void record_wake(int proc, Tick t);
  ScheduleTrace finish(Tick horizon);

 private:
  std::vector<std::vector<Segment>> segments_;
  std::vector<Tick> next_tick_;
  std::vector<WakeEvent> wakes_;
};

std::string trace_to_json(const ScheduleTrace& trace);
ScheduleTrace trace_from_json(const std::string& text);
void save_trace_file(const std::string& path, const ScheduleTrace& trace);
ScheduleTrace load_trace_file(const std::string& path);

}  // namespace powersched
