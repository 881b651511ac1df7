#include "powersched/policies.hpp"

#include <algorithm>
#include <stdexcept>

namespace powersched {

Tick anchor_tick(const Job& job, const Rational& lambda, const Rational& B) {
  Rational latest = Rational(job.deadline) - lambda * B;
  return std::max(job.arrival, latest.floor());
}

namespace {

// Deadlines of queued jobs, ascending and unique, paired with the total
// remaining work due by each deadline.
std::vector<std::pair<Tick, Tick>> demand_steps(
    std::span<const JobRuntime> queue) {
  std::vector<std::pair<Tick, Tick>> steps;  // (deadline, work due by it)
  std::vector<const JobRuntime*> by_deadline;
  for (const JobRuntime& jr : queue) by_deadline.push_back(&jr);
  std::sort(by_deadline.begin(), by_deadline.end(),
            [](const JobRuntime* a, const JobRuntime* b) {
              return a->job.deadline < b->job.deadline;
            });
  Tick work = 0;
  for (const JobRuntime* jr : by_deadline) {
    work += jr->remaining;
    if (!steps.empty() && steps.back().first == jr->job.deadline)
      steps.back().second = work;
    else
      steps.push_back({jr->job.deadline, work});
  }
  return steps;
}

const JobRuntime* earliest_deadline(std::span<const JobRuntime> queue,
                                    bool (*take)(const JobRuntime&, Tick),
                                    Tick split) {
  const JobRuntime* pick = nullptr;
  for (const JobRuntime& jr : queue) {
    if (!take(jr, split)) continue;
    if (!pick || jr.job.deadline < pick->job.deadline) pick = &jr;
  }
  return pick;
}

bool before_split(const JobRuntime& jr, Tick split) {
  return jr.job.arrival < split;
}
bool from_split(const JobRuntime& jr, Tick split) {
  return jr.job.arrival >= split;
}
bool any_job(const JobRuntime&, Tick) { return true; }

}  // namespace

std::optional<Tick> urgency_check(std::span<const JobRuntime> queue, Tick t) {
  for (const auto& [deadline, work] : demand_steps(queue))
    if (deadline > t && work >= deadline - t) return deadline;
  return std::nullopt;
}

AnchorPolicy::AnchorPolicy(const EnergyParams& params,
                           AnchorPolicyOptions opts)
    : params_(params), opts_(std::move(opts)) {
  params_.validate();
  break_even_ = params_.break_even();
  if (opts_.lambda < Rational(0) || opts_.lambda > Rational(1))
    throw std::invalid_argument("lambda must lie in [0, 1]");
  if (opts_.pair_when_queue_clear && !opts_.require_unit_jobs)
    throw std::invalid_argument(
        "paired execution is only sound for unit jobs");
}

std::string AnchorPolicy::name() const {
  return opts_.pair_when_queue_clear ? "anchor-pair" : "anchor";
}

int AnchorPolicy::wake(int other, std::vector<Command>& out) {
  for (int p = 0; p < created_; ++p) {
    if (p == other || proc_on_[p]) continue;
    proc_on_[p] = true;
    out.push_back(TurnOn{p});
    return p;
  }
  if (created_ >= 2) throw std::logic_error("both processors already in use");
  int p = created_++;
  proc_on_[p] = true;
  out.push_back(TurnOn{p});
  return p;
}

void AnchorPolicy::turn_off(int& role, std::vector<Command>& out) {
  if (role < 0) return;
  proc_on_[role] = false;
  out.push_back(TurnOff{role});
  role = -1;
}

void AnchorPolicy::plan(const PolicyInput& in, std::vector<Command>& out) {
  const Tick t = in.now;

  for (const JobRuntime& jr : in.queue) {
    if (opts_.require_unit_jobs && jr.job.exec != 1)
      throw std::invalid_argument("job " + std::to_string(jr.job.id) +
                                  " is not a unit job");
    if (jr.remaining > jr.job.deadline - t)
      throw std::logic_error("pending job " + std::to_string(jr.job.id) +
                             " can no longer meet its deadline");
  }

  // A burst ends when its backlog is drained; the second processor carries
  // on alone with whatever arrived since.
  if (burst_) {
    bool backlog_empty = true;
    for (const JobRuntime& jr : in.queue)
      if (jr.job.arrival < burst_start_) backlog_empty = false;
    if (backlog_empty) {
      turn_off(main_, out);
      main_ = aux_;
      aux_ = -1;
      burst_ = false;
    }
  }

  if (!burst_) {
    bool was_off = main_ < 0;
    Tick interval_left = was_off ? t : interval_start_;

    // Deadlines whose window is completely full of pending work, and
    // whether any window is overfull (more work than ticks).
    Tick latest_full = -1;
    bool overfull = false;
    for (const auto& [deadline, work] : demand_steps(in.queue)) {
      if (deadline > t && work >= deadline - t) {
        latest_full = deadline;
        if (work > deadline - t) overfull = true;
      }
    }

    // Two ways in: a job carried over from before this awaken interval is
    // due inside a full window, or some window is overfull outright. An
    // overfull window always hides a contributor that arrived strictly
    // earlier (a same-tick batch overfilling it would be unschedulable),
    // so the backlog queue below is never empty. A window that is exactly
    // full of same-interval work still fits one processor under EDF.
    bool carried = overfull;
    if (latest_full >= 0)
      for (const JobRuntime& jr : in.queue)
        if (jr.job.arrival < interval_left && jr.job.deadline <= latest_full)
          carried = true;

    if (carried) {
      if (was_off) {
        main_ = wake(-1, out);
        interval_start_ = t;
      }
      aux_ = wake(main_, out);
      burst_ = true;
      burst_start_ = t;
    } else if (was_off) {
      bool anchor_met = latest_full >= 0;  // full window: start now
      for (const JobRuntime& jr : in.queue)
        if (t >= anchor_tick(jr.job, opts_.lambda, break_even_))
          anchor_met = true;
      if (anchor_met) {
        main_ = wake(-1, out);
        interval_start_ = t;
      }
    }
  }

  // Power down once the queue is empty and the interval has paid for its
  // wake: standby beyond that point would cost more than waking afresh.
  if (!burst_ && main_ >= 0 && in.queue.empty() &&
      Rational(t - interval_start_) >= break_even_) {
    turn_off(aux_, out);
    turn_off(main_, out);
    return;
  }

  if (main_ < 0) return;

  if (burst_) {
    const JobRuntime* forth =
        earliest_deadline(in.queue, from_split, burst_start_);
    if (opts_.pair_when_queue_clear && !forth) {
      // Backlog only: drain it two jobs per tick.
      std::vector<const JobRuntime*> order;
      for (const JobRuntime& jr : in.queue) order.push_back(&jr);
      std::sort(order.begin(), order.end(),
                [](const JobRuntime* a, const JobRuntime* b) {
                  return std::pair(a->job.deadline, a->job.id) <
                         std::pair(b->job.deadline, b->job.id);
                });
      out.push_back(Assign{main_, order[0]->job.id});
      if (order.size() > 1) out.push_back(Assign{aux_, order[1]->job.id});
    } else {
      const JobRuntime* backlog =
          earliest_deadline(in.queue, before_split, burst_start_);
      if (backlog) out.push_back(Assign{main_, backlog->job.id});
      if (forth) out.push_back(Assign{aux_, forth->job.id});
    }
  } else if (const JobRuntime* pick =
                 earliest_deadline(in.queue, any_job, 0)) {
    out.push_back(Assign{main_, pick->job.id});
  }
}

Rational default_pair_lambda() {
  // Continued-fraction convergent of the optimum; denominators this size
  // keep every downstream product within 64 bits.
  return Rational(10458821, 12484830);
}

LatestStartPolicy::LatestStartPolicy(const EnergyParams& params)
    : params_(params) {
  params_.validate();
  break_even_ = params_.break_even();
}

std::string LatestStartPolicy::name() const { return "latest-start"; }

void LatestStartPolicy::plan(const PolicyInput& in,
                             std::vector<Command>& out) {
  const Tick t = in.now;

  std::vector<const JobRuntime*> forced;
  for (const JobRuntime& jr : in.queue) {
    if (jr.remaining > jr.job.deadline - t)
      throw std::logic_error("pending job " + std::to_string(jr.job.id) +
                             " can no longer meet its deadline");
    if (jr.remaining == jr.job.deadline - t) forced.push_back(&jr);
  }
  std::sort(forced.begin(), forced.end(),
            [](const JobRuntime* a, const JobRuntime* b) {
              return std::pair(a->job.deadline, a->job.id) <
                     std::pair(b->job.deadline, b->job.id);
            });

  for (size_t p = 0; p < forced.size(); ++p) {
    if (p >= procs_.size()) procs_.push_back({});
    if (!procs_[p].on) {
      procs_[p].on = true;
      out.push_back(TurnOn{static_cast<int>(p)});
    }
    out.push_back(Assign{static_cast<int>(p), forced[p]->job.id});
    procs_[p].idle_since = t + 1;
  }
  for (size_t p = forced.size(); p < procs_.size(); ++p) {
    if (!procs_[p].on) continue;
    if (Rational(t - procs_[p].idle_since) >= break_even_) {
      procs_[p].on = false;
      out.push_back(TurnOff{static_cast<int>(p)});
    }
  }
}

}  // namespace powersched
