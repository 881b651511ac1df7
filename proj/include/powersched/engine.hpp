#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "powersched/analysis.hpp"
#include "powersched/energy.hpp"
#include "powersched/job.hpp"
#include "powersched/trace.hpp"

namespace powersched {

// Processor state as of the end of the previous tick.
struct ProcView {
  bool on = false;
  int running = -1;  // job id busy last tick, -1 when idle or off
};

struct PolicyInput {
  Tick now = 0;
  // Arrived, unfinished jobs in id order. Remaining counts are live.
  const std::vector<JobRuntime>& queue;
  const std::vector<ProcView>& procs;
};

struct TurnOn {
  int proc = 0;  // == procs.size() grows the machine by one processor
};
struct TurnOff {
  int proc = 0;
};
struct Assign {
  int proc = 0;
  int job = 0;
};
struct Idle {
  int proc = 0;
};
using Command = std::variant<TurnOn, TurnOff, Assign, Idle>;

// Scheduling policy driven one tick at a time. plan() is called once per tick
// with the queue after arrivals; commands take effect for that tick. An on
// processor with no assignment idles on standby.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void plan(const PolicyInput& in, std::vector<Command>& out) = 0;
  virtual std::string name() const = 0;
};

// What a reactive job source may observe: everything through the previous
// tick, never the current one.
class EngineHistory {
 public:
  bool all_off_during(Tick t) const;  // no processor was on during tick t
  std::optional<Tick> first_run_of(int job) const;
  Tick ticks_recorded() const { return static_cast<Tick>(all_off_.size()); }

 private:
  friend struct Engine;
  std::vector<bool> all_off_;
  std::unordered_map<int, Tick> first_run_;
};

class JobSource {
 public:
  virtual ~JobSource() = default;
  // Jobs with arrival == t, called once per tick in order.
  virtual std::vector<Job> arrivals(Tick t, const EngineHistory& history) = 0;
};

class VectorJobSource : public JobSource {
 public:
  explicit VectorJobSource(std::vector<Job> jobs);
  std::vector<Job> arrivals(Tick t, const EngineHistory& history) override;

 private:
  std::vector<Job> jobs_;  // sorted by arrival
  size_t next_ = 0;
};

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(Tick t, const std::string& what);
};

struct SimulateOptions {
  EnergyParams params;
  Tick horizon = 0;
  int max_processors = 1024;
};

struct SimulationResult {
  ScheduleTrace trace;
  TraceCheckReport report;  // misses with exact timing; violations from
                            // horizon truncation only
  EnergyBreakdown energy;
  std::vector<Job> jobs;  // every job the source delivered
};

SimulationResult simulate(Policy& policy, JobSource& source,
                          const SimulateOptions& opts);

// Convenience wrapper for a fixed job set.
SimulationResult simulate_jobs(Policy& policy, std::span<const Job> jobs,
                               const SimulateOptions& opts);

}  // namespace powersched
