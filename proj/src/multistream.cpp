#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "powersched/policies.hpp"

namespace powersched {

namespace {

// One group of streams sharing a spill processor. Local processor indices
// are allocated on demand; role bookkeeping maps them back to the shared
// processor or a member stream's own processor.
class SharedSpillPolicy : public Policy {
 public:
  SharedSpillPolicy(const EnergyParams& params, std::vector<int> members)
      : params_(params), members_(std::move(members)) {
    params_.validate();
    break_even_ = params_.break_even();
    for (size_t s = 0; s < members_.size(); ++s) slot_of_[members_[s]] = s;
    member_proc_.assign(members_.size(), -1);
    member_on_.assign(members_.size(), false);
  }

  std::string name() const override { return "shared-spill"; }

  void plan(const PolicyInput& in, std::vector<Command>& out) override {
    const Tick t = in.now;

    for (const JobRuntime& jr : in.queue) {
      if (!slot_of_.count(jr.job.stream))
        throw std::invalid_argument("job " + std::to_string(jr.job.id) +
                                    " belongs to a foreign stream");
      if (jr.remaining > jr.job.deadline - t)
        throw std::logic_error("pending job " + std::to_string(jr.job.id) +
                               " can no longer meet its deadline");
    }

    // Route arrivals: spill to the shared queue when its windows keep slack
    // for the newcomer, otherwise the stream pays for its own processor.
    // Admission must see the whole current shared queue, so settled jobs are
    // collected before any newcomer is placed.
    std::vector<const JobRuntime*> shared;
    std::vector<std::vector<const JobRuntime*>> per_slot(members_.size());
    std::vector<const JobRuntime*> newcomers;
    for (const JobRuntime& jr : in.queue) {
      auto route = routed_.find(jr.job.id);
      if (route == routed_.end())
        newcomers.push_back(&jr);
      else if (route->second == 0)
        shared.push_back(&jr);
      else
        per_slot[route->second - 1].push_back(&jr);
    }
    for (const JobRuntime* jr : newcomers) {
      int slot = slot_of_.at(jr->job.stream);
      int target;
      if (member_on_[slot]) {
        target = 1 + slot;
      } else if (fits_shared(shared, *jr, t)) {
        target = 0;
      } else {
        target = 1 + slot;
        wake_member(slot, out);
        if (!shared_on_) wake_shared(t, out);
      }
      routed_.emplace(jr->job.id, target);
      if (target == 0)
        shared.push_back(jr);
      else
        per_slot[slot].push_back(jr);
    }

    if (!shared_on_ && wants_shared_wake(shared, t)) wake_shared(t, out);

    if (shared_on_ && shared.empty() &&
        Rational(t - shared_wake_) >= break_even_) {
      shared_on_ = false;
      out.push_back(TurnOff{shared_proc_});
    }
    for (size_t s = 0; s < members_.size(); ++s)
      if (member_on_[s] && per_slot[s].empty() && !shared_on_) {
        member_on_[s] = false;
        out.push_back(TurnOff{member_proc_[s]});
      }

    if (shared_on_)
      if (const JobRuntime* pick = earliest(shared))
        out.push_back(Assign{shared_proc_, pick->job.id});
    for (size_t s = 0; s < members_.size(); ++s)
      if (member_on_[s])
        if (const JobRuntime* pick = earliest(per_slot[s]))
          out.push_back(Assign{member_proc_[s], pick->job.id});
  }

 private:
  static const JobRuntime* earliest(
      const std::vector<const JobRuntime*>& jobs) {
    const JobRuntime* pick = nullptr;
    for (const JobRuntime* jr : jobs)
      if (!pick || jr->job.deadline < pick->job.deadline) pick = jr;
    return pick;
  }

  // Admission test: with the newcomer added, every deadline in the shared
  // queue must still fit its pending work on one processor.
  bool fits_shared(const std::vector<const JobRuntime*>& shared,
                   const JobRuntime& jr, Tick t) const {
    std::vector<std::pair<Tick, Tick>> due;  // (deadline, remaining)
    for (const JobRuntime* q : shared) due.push_back({q->job.deadline,
                                                      q->remaining});
    due.push_back({jr.job.deadline, jr.remaining});
    std::sort(due.begin(), due.end());
    Tick work = 0;
    for (const auto& [deadline, rem] : due) {
      work += rem;
      if (deadline < jr.job.deadline) continue;  // windows before it bind
                                                 // earlier arrivals only
      if (work > deadline - t) return false;
    }
    return true;
  }

  bool wants_shared_wake(const std::vector<const JobRuntime*>& shared,
                         Tick t) const {
    for (const JobRuntime* jr : shared)
      if (t >= anchor_tick(jr->job, Rational(1), break_even_)) return true;
    std::vector<JobRuntime> copy;
    for (const JobRuntime* jr : shared) copy.push_back(*jr);
    return urgency_check(copy, t).has_value();
  }

  void wake_shared(Tick t, std::vector<Command>& out) {
    if (shared_proc_ < 0) shared_proc_ = local_created_++;
    shared_on_ = true;
    shared_wake_ = t;
    out.push_back(TurnOn{shared_proc_});
  }

  void wake_member(size_t slot, std::vector<Command>& out) {
    if (member_proc_[slot] < 0) member_proc_[slot] = local_created_++;
    member_on_[slot] = true;
    out.push_back(TurnOn{member_proc_[slot]});
  }

  EnergyParams params_;
  Rational break_even_;
  std::vector<int> members_;  // global stream ids in this group
  std::unordered_map<int, int> slot_of_;
  std::unordered_map<int, int> routed_;  // job id -> 0 shared, 1+slot member

  int local_created_ = 0;
  int shared_proc_ = -1;
  bool shared_on_ = false;
  Tick shared_wake_ = 0;
  std::vector<int> member_proc_;
  std::vector<bool> member_on_;
};

}  // namespace

struct MultiStreamPolicy::Child {
  std::unique_ptr<Policy> policy;
  std::vector<int> proc_map;  // local processor index -> engine index
};

MultiStreamPolicy::MultiStreamPolicy(const EnergyParams& params, int streams,
                                     int processors)
    : streams_(streams) {
  params.validate();
  if (streams < 1) throw std::invalid_argument("need at least one stream");
  if (processors <= streams)
    throw std::invalid_argument(
        "processor budget must exceed the stream count");
  child_of_stream_.resize(streams);
  if (processors >= 2 * streams) {
    // Budget is rich enough for a private two-processor policy per stream.
    for (int s = 0; s < streams; ++s) {
      child_of_stream_[s] = s;
      auto child = std::make_unique<Child>();
      child->policy = std::make_unique<AnchorPolicy>(params);
      children_.push_back(std::move(child));
    }
  } else {
    int groups = processors - streams;
    std::vector<std::vector<int>> members(groups);
    for (int s = 0; s < streams; ++s) {
      child_of_stream_[s] = s % groups;
      members[s % groups].push_back(s);
    }
    for (int g = 0; g < groups; ++g) {
      auto child = std::make_unique<Child>();
      child->policy =
          std::make_unique<SharedSpillPolicy>(params, std::move(members[g]));
      children_.push_back(std::move(child));
    }
  }
}

MultiStreamPolicy::~MultiStreamPolicy() = default;

std::string MultiStreamPolicy::name() const { return "multi-stream"; }

void MultiStreamPolicy::plan(const PolicyInput& in,
                             std::vector<Command>& out) {
  for (const JobRuntime& jr : in.queue)
    if (jr.job.stream < 0 || jr.job.stream >= streams_)
      throw std::invalid_argument("job " + std::to_string(jr.job.id) +
                                  " names stream " +
                                  std::to_string(jr.job.stream) +
                                  " outside [0, " + std::to_string(streams_) +
                                  ")");

  std::vector<Command> local_cmds;
  std::vector<JobRuntime> local_queue;
  std::vector<ProcView> local_procs;
  for (size_t c = 0; c < children_.size(); ++c) {
    Child& child = *children_[c];
    local_queue.clear();
    for (const JobRuntime& jr : in.queue)
      if (child_of_stream_[jr.job.stream] == static_cast<int>(c))
        local_queue.push_back(jr);
    local_procs.clear();
    for (int engine_idx : child.proc_map)
      local_procs.push_back(in.procs[engine_idx]);

    local_cmds.clear();
    child.policy->plan({in.now, local_queue, local_procs}, local_cmds);

    for (const Command& cmd : local_cmds) {
      if (const TurnOn* on = std::get_if<TurnOn>(&cmd)) {
        if (on->proc == static_cast<int>(child.proc_map.size())) {
          child.proc_map.push_back(engine_procs_++);
          out.push_back(TurnOn{child.proc_map.back()});
        } else {
          out.push_back(TurnOn{child.proc_map.at(on->proc)});
        }
      } else if (const TurnOff* off = std::get_if<TurnOff>(&cmd)) {
        out.push_back(TurnOff{child.proc_map.at(off->proc)});
      } else if (const Assign* as = std::get_if<Assign>(&cmd)) {
        out.push_back(Assign{child.proc_map.at(as->proc), as->job});
      } else if (const Idle* idle = std::get_if<Idle>(&cmd)) {
        out.push_back(Idle{child.proc_map.at(idle->proc)});
      }
    }
  }
}

}  // namespace powersched
