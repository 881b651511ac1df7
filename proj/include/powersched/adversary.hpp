#pragma once

#include <optional>
#include <span>
#include <vector>

#include "powersched/engine.hpp"
#include "powersched/rational.hpp"

namespace powersched {

// Scale-k duel setup: wake energy k, both powers 1, so the break-even time is
// k ticks. x places the overload batch, eta and chi size the two follow-up
// observation windows.
struct AdversaryParams {
  long long k = 10000;
  Rational x{1218, 10000};
  Rational eta{2206, 10000};
  Rational chi{4852, 10000};

  // k >= 10, 0 <= x <= 2/5, eta >= 0, chi >= 0, and (1/2 - x) * k must not
  // land exactly on a half tick
  void validate() const;

  EnergyParams energy() const;  // {k, 1, 1}

  Tick first_deadline() const;     // B = k
  Tick exec_threshold() const;     // round((1/2 - x) B)
  Tick case1_monitor_end() const;  // round(3B/2)
  Tick window1_end() const;        // round((3/2 + eta) B)
  Tick window2_end() const;        // round((3/2 + eta + chi) B)
  Tick duel_horizon() const;       // window2_end + B + 2
  Tick batch_size() const;         // round((1/2 + x) B) - 1
};

// Nearest tick, halves round up.
Tick round_tick(const Rational& r);

// One observation step: a fully-off tick inside [t0, t1] answers with an
// urgent unit job one tick later, anything else answers with nothing. The
// window is inclusive at both ends.
std::optional<Job> monitor_step(std::optional<Tick> observed_all_off_at,
                                Tick t0, Tick t1);

// Reactive source that opens with one unit job due at break-even and then
// watches the processors. Early execution of the opener starts a punishment
// window where every fully-off tick costs the policy a fresh wake (case 1).
// If the opener is still waiting at the threshold, the source floods the rest
// of its window so tightly that a second processor is unavoidable, then runs
// two more punishment windows (case 2).
class AdversarySource : public JobSource {
 public:
  explicit AdversarySource(const AdversaryParams& params);

  std::vector<Job> arrivals(Tick t, const EngineHistory& history) override;

  int case_id() const { return case_id_; }  // 0 until decided
  int released_case1() const { return m_; }
  int released_window1() const { return m1_; }
  int released_window2() const { return m2_; }
  const std::vector<Job>& released() const { return log_; }
  bool done() const { return phase_ == Phase::Done; }

 private:
  enum class Phase {
    WaitingFirstExec,
    Case1Monitor,
    Case2Monitor1,
    Case2Monitor2,
    Done
  };

  Job emit(Tick arrival, Tick deadline, Tick exec);

  AdversaryParams params_;
  Phase phase_ = Phase::WaitingFirstExec;
  int case_id_ = 0;
  Tick monitor_start_ = 0;  // case 1: tick the opener first ran
  int m_ = 0;   // case 1: everything released, opener included
  int m1_ = 0;  // case 2: urgent jobs for off ticks in [B, window1_end]
  int m2_ = 0;  // case 2: urgent jobs for off ticks in (window1_end, window2_end]
  std::vector<Job> log_;
  int next_id_ = 0;
};

// Cheapest hand-built single-processor schedules for the jobs the source
// actually released. Both verify themselves feasible before returning, so
// their energy is a true upper bound on the offline optimum.
ScheduleTrace baseline_case1(std::span<const Job> released,
                             const AdversaryParams& params);
ScheduleTrace baseline_case2(std::span<const Job> released,
                             const AdversaryParams& params);

struct DuelReport {
  int case_id = 0;
  int m = 0;           // case 1 release count
  int m1 = 0, m2 = 0;  // case 2 urgent counts per window
  std::vector<Job> released;
  SimulationResult policy_run;
  ScheduleTrace baseline;
  Rational policy_energy;
  Rational baseline_energy;
  Rational ratio;  // policy / baseline
};

// Simulates the policy against a fresh adversary and prices both sides.
// Throws if the policy misses a deadline; the ratio is only meaningful for
// feasible schedules.
DuelReport run_duel(Policy& policy, const AdversaryParams& params);

// Job families that trap latest-start scheduling.

// One long job plus k-1 units that all go critical in the same tick.
std::vector<Job> gen_J_edf(long long k);

// n staggered units j_1..j_n plus n/2 echo units, each echo sharing its
// deadline with an even j.
std::vector<Job> gen_J_six(long long n, long long B);

// Hand schedule for gen_J_six on one processor: n/2 + 1 short awake
// intervals, each catching up to three neighbouring jobs. Total energy is at
// most (n/2 + 1) * (E_w + 4 * psi_b), enforced before returning.
ScheduleTrace baseline_F(long long n, long long B, const EnergyParams& params);

}  // namespace powersched
