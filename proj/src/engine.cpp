#include "powersched/engine.hpp"

#include <algorithm>
#include <unordered_set>

namespace powersched {

bool EngineHistory::all_off_during(Tick t) const {
  if (t < 0 || static_cast<size_t>(t) >= all_off_.size())
    throw std::out_of_range("tick " + std::to_string(t) +
                            " not yet simulated");
  return all_off_[t];
}

std::optional<Tick> EngineHistory::first_run_of(int job) const {
  auto it = first_run_.find(job);
  if (it == first_run_.end()) return std::nullopt;
  return it->second;
}

VectorJobSource::VectorJobSource(std::vector<Job> jobs)
    : jobs_(std::move(jobs)) {
  validate_job_set(jobs_);
  std::stable_sort(jobs_.begin(), jobs_.end(),
                   [](const Job& a, const Job& b) {
                     return a.arrival < b.arrival;
                   });
}

std::vector<Job> VectorJobSource::arrivals(Tick t, const EngineHistory&) {
  std::vector<Job> out;
  while (next_ < jobs_.size() && jobs_[next_].arrival == t)
    out.push_back(jobs_[next_++]);
  return out;
}

ProtocolError::ProtocolError(Tick t, const std::string& what)
    : std::runtime_error("tick " + std::to_string(t) + ": " + what) {}

namespace {

struct TickScratch {
  std::vector<int> assigned;        // per proc, job id or -1
  std::vector<bool> transitioned;   // power state already changed this tick
  std::unordered_set<int> claimed;  // jobs assigned somewhere this tick
};

}  // namespace

struct Engine {
  SimulationResult run(Policy& policy, JobSource& source,
                       const SimulateOptions& opts) {
    opts.params.validate();
    if (opts.horizon < 0) throw std::invalid_argument("negative horizon");

    TraceBuilder builder;
    EngineHistory history;
    std::vector<ProcView> procs;
    std::vector<JobRuntime> queue;  // id order
    SimulationResult result;
    std::unordered_set<int> seen_ids;
    std::vector<Command> commands;

    for (Tick t = 0; t < opts.horizon; ++t) {
      for (Job& j : source.arrivals(t, history)) {
        j.validate();
        if (j.arrival != t)
          throw ProtocolError(t, "source emitted job " + std::to_string(j.id) +
                                     " with arrival " +
                                     std::to_string(j.arrival));
        if (!seen_ids.insert(j.id).second)
          throw ProtocolError(t, "duplicate job id " + std::to_string(j.id));
        result.jobs.push_back(j);
        queue.insert(std::lower_bound(queue.begin(), queue.end(), j.id,
                                      [](const JobRuntime& jr, int id) {
                                        return jr.job.id < id;
                                      }),
                     {j, j.exec});
      }

      commands.clear();
      policy.plan({t, queue, procs}, commands);

      TickScratch scratch;
      scratch.assigned.assign(procs.size(), -1);
      scratch.transitioned.assign(procs.size(), false);
      for (const Command& cmd : commands)
        apply(t, cmd, procs, queue, scratch, builder, opts);

      // Advance one tick: busy processors decrement their job, the rest of
      // the on processors sit on standby.
      bool any_on = false;
      for (size_t p = 0; p < procs.size(); ++p) {
        if (!procs[p].on) {
          procs[p].running = -1;
          continue;
        }
        any_on = true;
        int job = scratch.assigned[p];
        procs[p].running = job;
        if (job < 0) {
          builder.record(static_cast<int>(p), t, SegmentState::Standby);
          continue;
        }
        builder.record(static_cast<int>(p), t, SegmentState::Busy, job);
        history.first_run_.try_emplace(job, t);
        auto it = std::lower_bound(queue.begin(), queue.end(), job,
                                   [](const JobRuntime& jr, int id) {
                                     return jr.job.id < id;
                                   });
        if (--it->remaining == 0) queue.erase(it);
      }
      history.all_off_.push_back(!any_on);

      // Anything still unfinished at its deadline is a miss; drop it.
      std::erase_if(queue, [&](const JobRuntime& jr) {
        if (jr.job.deadline <= t + 1 && jr.remaining > 0) {
          result.report.misses.push_back({jr.job.id, t + 1});
          return true;
        }
        return false;
      });
    }

    for (const JobRuntime& jr : queue)
      result.report.violations.push_back(
          "job " + std::to_string(jr.job.id) + " still pending at horizon " +
          std::to_string(opts.horizon));

    result.trace = builder.finish(opts.horizon);
    result.energy = energy_of_trace(result.trace, opts.params);
    return result;
  }

  void apply(Tick t, const Command& cmd, std::vector<ProcView>& procs,
             const std::vector<JobRuntime>& queue, TickScratch& scratch,
             TraceBuilder& builder, const SimulateOptions& opts) {
    auto check_range = [&](int p, bool allow_grow) {
      if (p < 0 || p > static_cast<int>(procs.size()) ||
          (!allow_grow && p == static_cast<int>(procs.size())))
        throw ProtocolError(t, "processor " + std::to_string(p) +
                                   " out of range");
    };
    if (const TurnOn* on = std::get_if<TurnOn>(&cmd)) {
      check_range(on->proc, true);
      if (on->proc == static_cast<int>(procs.size())) {
        if (static_cast<int>(procs.size()) >= opts.max_processors)
          throw ProtocolError(t, "processor limit reached");
        procs.push_back({});
        scratch.assigned.push_back(-1);
        scratch.transitioned.push_back(false);
      }
      if (procs[on->proc].on)
        throw ProtocolError(t, "turn-on of running processor " +
                                   std::to_string(on->proc));
      if (scratch.transitioned[on->proc])
        throw ProtocolError(t, "second power transition on processor " +
                                   std::to_string(on->proc));
      procs[on->proc].on = true;
      scratch.transitioned[on->proc] = true;
      builder.record_wake(on->proc, t);
    } else if (const TurnOff* off = std::get_if<TurnOff>(&cmd)) {
      check_range(off->proc, false);
      if (!procs[off->proc].on)
        throw ProtocolError(t, "turn-off of off processor " +
                                   std::to_string(off->proc));
      if (scratch.transitioned[off->proc])
        throw ProtocolError(t, "second power transition on processor " +
                                   std::to_string(off->proc));
      if (scratch.assigned[off->proc] >= 0)
        throw ProtocolError(t, "turn-off of assigned processor " +
                                   std::to_string(off->proc));
      procs[off->proc].on = false;
      scratch.transitioned[off->proc] = true;
    } else if (const Assign* as = std::get_if<Assign>(&cmd)) {
      check_range(as->proc, false);
      if (!procs[as->proc].on)
        throw ProtocolError(t, "assignment to off processor " +
                                   std::to_string(as->proc));
      if (scratch.assigned[as->proc] >= 0)
        throw ProtocolError(t, "double assignment to processor " +
                                   std::to_string(as->proc));
      auto it = std::lower_bound(queue.begin(), queue.end(), as->job,
                                 [](const JobRuntime& jr, int id) {
                                   return jr.job.id < id;
                                 });
      if (it == queue.end() || it->job.id != as->job)
        throw ProtocolError(t, "assignment of job " + std::to_string(as->job) +
                                   " not in queue");
      if (!scratch.claimed.insert(as->job).second)
        throw ProtocolError(t, "job " + std::to_string(as->job) +
                                   " assigned to two processors");
      scratch.assigned[as->proc] = as->job;
    } else if (const Idle* idle = std::get_if<Idle>(&cmd)) {
      check_range(idle->proc, false);
      if (!procs[idle->proc].on)
        throw ProtocolError(t, "idle command to off processor " +
                                   std::to_string(idle->proc));
    }
  }
};

SimulationResult simulate(Policy& policy, JobSource& source,
                          const SimulateOptions& opts) {
  Engine engine;
  return engine.run(policy, source, opts);
}

SimulationResult simulate_jobs(Policy& policy, std::span<const Job> jobs,
                               const SimulateOptions& opts) {
  VectorJobSource source(std::vector<Job>(jobs.begin(), jobs.end()));
  return simulate(policy, source, opts);
}

}  // namespace powersched
