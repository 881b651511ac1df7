#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "powersched/engine.hpp"
#include "powersched/rational.hpp"

namespace powersched {

// Earliest tick at which waking for this job still leaves at most
// lambda * break_even ticks of standby before its deadline:
// max(arrival, floor(deadline - lambda * B)).
Tick anchor_tick(const Job& job, const Rational& lambda, const Rational& B);

// Smallest deadline t# among queued jobs whose window is already full:
// pending work due by t# is at least t# - t. Returns nothing when every
// deadline still has slack.
std::optional<Tick> urgency_check(std::span<const JobRuntime> queue, Tick t);

struct AnchorPolicyOptions {
  Rational lambda{1};  // fraction of the break-even time spent on standby
                       // before a deadline at most
  // When the late-arrival queue is clear during a burst, run the two
  // earliest-deadline jobs side by side instead of idling the second
  // processor. Requires unit jobs.
  bool pair_when_queue_clear = false;
  bool require_unit_jobs = false;
};

// Two-processor procrastination policy. Stays off until a job's anchor is
// reached or pending work leaves no slack; handles overload bursts by
// splitting the queue across a second processor; turns off break-even many
// ticks after the awaken interval stops being useful.
class AnchorPolicy : public Policy {
 public:
  AnchorPolicy(const EnergyParams& params, AnchorPolicyOptions opts = {});

  void plan(const PolicyInput& in, std::vector<Command>& out) override;
  std::string name() const override;

  bool burst_active() const { return burst_; }

 private:
  int wake(int other, std::vector<Command>& out);
  void turn_off(int& role, std::vector<Command>& out);

  EnergyParams params_;
  Rational break_even_;
  AnchorPolicyOptions opts_;

  bool proc_on_[2] = {false, false};
  int created_ = 0;
  int main_ = -1;  // processor running the backlog, -1 when off
  int aux_ = -1;   // second processor during a burst
  bool burst_ = false;
  Tick burst_start_ = 0;     // t*: arrivals before it form the backlog
  Tick interval_start_ = 0;  // first tick of the current awaken interval
};

// Default split parameter for the paired-execution variant: the exact
// rational tuned so the per-interval overhead bound is minimized (within
// 1e-14 of the real-valued optimum).
Rational default_pair_lambda();

// Runs every job as late as possible: a job executes only when its slack is
// zero, waking as many processors as there are forced jobs; idle processors
// power off after break-even many standby ticks.
class LatestStartPolicy : public Policy {
 public:
  explicit LatestStartPolicy(const EnergyParams& params);

  void plan(const PolicyInput& in, std::vector<Command>& out) override;
  std::string name() const override;

 private:
  EnergyParams params_;
  Rational break_even_;
  struct Proc {
    bool on = false;
    Tick idle_since = 0;
  };
  std::vector<Proc> procs_;
};

// k independent job streams on a budget of h > k processors. With h >= 2k
// every stream gets its own two-processor AnchorPolicy. Otherwise streams
// are split round-robin into h-k groups, each group sharing one spill
// processor: arrivals go to the shared queue when it has room, else wake the
// stream's own processor.
class MultiStreamPolicy : public Policy {
 public:
  MultiStreamPolicy(const EnergyParams& params, int streams, int processors);
  ~MultiStreamPolicy() override;

  void plan(const PolicyInput& in, std::vector<Command>& out) override;
  std::string name() const override;

 private:
  struct Child;
  int streams_ = 0;
  std::vector<std::unique_ptr<Child>> children_;
  std::vector<int> child_of_stream_;
  int engine_procs_ = 0;
};

}  // namespace powersched
