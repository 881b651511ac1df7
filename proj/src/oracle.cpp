#include "powersched/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "powersched/feasibility.hpp"

namespace powersched {

namespace {

// Per-tick decision, encoded: 0 = off, 1 = standby, 2+i = run jobs[i].
struct Entry {
  Rational cost;
  int action = -1;
  std::uint64_t prev = 0;
  bool seeded = false;
};

int action_rank(int action) { return action; }

}  // namespace

OracleResult opt_energy_exact(std::span<const Job> jobs_in,
                              const EnergyParams& params,
                              const OracleLimits& limits) {
  params.validate();
  validate_job_set(jobs_in);
  if (static_cast<int>(jobs_in.size()) > limits.max_jobs)
    throw std::invalid_argument("instance has " +
                                std::to_string(jobs_in.size()) +
                                " jobs, oracle limit is " +
                                std::to_string(limits.max_jobs));
  auto cond = condition_edf(jobs_in);
  if (!cond.ok) throw InfeasibleError(cond.worst);

  std::vector<Job> jobs(jobs_in.begin(), jobs_in.end());
  std::sort(jobs.begin(), jobs.end(),
            [](const Job& a, const Job& b) { return a.id < b.id; });
  const Tick horizon = max_deadline(jobs);
  if (horizon > limits.max_horizon)
    throw std::invalid_argument("instance horizon " + std::to_string(horizon) +
                                " exceeds oracle limit " +
                                std::to_string(limits.max_horizon));
  if (jobs.empty()) {
    ScheduleTrace trace;
    trace.horizon = 0;
    return {Rational(0), trace};
  }

  // State key: bit 0 = processor was on during the previous tick, the rest
  // a mixed-radix packing of per-job remaining work.
  const int n = static_cast<int>(jobs.size());
  std::vector<std::uint64_t> place(n);
  std::uint64_t radix = 2;
  for (int i = 0; i < n; ++i) {
    place[i] = radix;
    radix *= static_cast<std::uint64_t>(jobs[i].exec) + 1;
  }
  auto remaining_of = [&](std::uint64_t key, int i) {
    return static_cast<Tick>(
        (key / place[i]) %
        (static_cast<std::uint64_t>(jobs[i].exec) + 1));
  };

  std::vector<std::unordered_map<std::uint64_t, Entry>> layer(horizon + 1);

  auto relax = [&](Tick t, std::uint64_t key, const Entry& cand) {
    // A state is dead once some unfinished job has less window than work.
    for (int i = 0; i < n; ++i) {
      Tick rem = remaining_of(key, i);
      if (rem == 0) continue;
      if (rem > jobs[i].deadline - std::max(t, jobs[i].arrival)) return;
    }
    auto [it, inserted] = layer[t].try_emplace(key, cand);
    if (inserted) return;
    Entry& have = it->second;
    auto key_of = [](const Entry& e) {
      return std::pair(action_rank(e.action), e.prev);
    };
    if (cand.cost < have.cost ||
        (cand.cost == have.cost && key_of(cand) < key_of(have)))
      have = cand;
  };

  std::uint64_t start = 0;
  for (int i = 0; i < n; ++i)
    start += place[i] * static_cast<std::uint64_t>(jobs[i].exec);
  layer[0].emplace(start, Entry{Rational(0), -1, 0, false});

  for (Tick t = 0; t < horizon; ++t) {
    // Keep each layer a Pareto front: a state with componentwise >=
    // remaining work, the same power bit, and >= cost can be dropped. The
    // sweep is quadratic, so it only runs on small layers; bigger layers
    // still converge through the per-key cost minimum.
    if (layer[t].size() > 1 && layer[t].size() <= 4096) {
      std::vector<std::pair<std::uint64_t, Entry>> states(layer[t].begin(),
                                                          layer[t].end());
      std::sort(states.begin(), states.end(),
                [](const auto& a, const auto& b) {
                  return a.second.cost != b.second.cost
                             ? a.second.cost < b.second.cost
                             : a.first < b.first;
                });
      std::vector<std::uint64_t> kept;
      std::unordered_map<std::uint64_t, Entry> pruned;
      for (const auto& [key, entry] : states) {
        bool dominated = false;
        for (std::uint64_t k : kept) {
          if ((k & 1) != (key & 1)) continue;
          bool leq = true;
          for (int i = 0; leq && i < n; ++i)
            if (remaining_of(k, i) > remaining_of(key, i)) leq = false;
          if (leq) {
            dominated = true;
            break;
          }
        }
        if (!dominated) {
          kept.push_back(key);
          pruned.emplace(key, entry);
        }
      }
      layer[t] = std::move(pruned);
    }

    for (const auto& [key, entry] : layer[t]) {
      const bool on = key & 1;
      const std::uint64_t rems = key & ~std::uint64_t{1};
      const Rational wake = on ? Rational(0) : params.wake_energy;

      relax(t + 1, rems, Entry{entry.cost, 0, key, true});
      relax(t + 1, rems | 1,
            Entry{entry.cost + wake + params.standby_power, 1, key, true});
      for (int i = 0; i < n; ++i) {
        if (jobs[i].arrival > t || jobs[i].deadline <= t) continue;
        if (remaining_of(key, i) == 0) continue;
        relax(t + 1, (rems - place[i]) | 1,
              Entry{entry.cost + wake + params.busy_power, 2 + i, key, true});
      }
    }
  }

  const Entry* best = nullptr;
  std::uint64_t best_key = 0;
  for (std::uint64_t key : {std::uint64_t{0}, std::uint64_t{1}}) {
    auto it = layer[horizon].find(key);
    if (it == layer[horizon].end()) continue;
    if (!best || it->second.cost < best->cost) {
      best = &it->second;
      best_key = key;
    }
  }
  if (!best)
    throw std::logic_error("exact search found no schedule on a feasible "
                           "instance");

  std::vector<int> actions(horizon);
  std::uint64_t cur = best_key;
  for (Tick t = horizon; t > 0; --t) {
    const Entry& e = layer[t].at(cur);
    actions[t - 1] = e.action;
    cur = e.prev;
  }

  TraceBuilder builder;
  bool prev_on = false;
  for (Tick t = 0; t < horizon; ++t) {
    if (actions[t] == 0) {
      builder.record(0, t, SegmentState::Off);
      prev_on = false;
      continue;
    }
    if (!prev_on) builder.record_wake(0, t);
    if (actions[t] == 1)
      builder.record(0, t, SegmentState::Standby);
    else
      builder.record(0, t, SegmentState::Busy, jobs[actions[t] - 2].id);
    prev_on = true;
  }
  return {best->cost, builder.finish(horizon)};
}

Rational opt_lower_bound(std::span<const Job> jobs,
                         const EnergyParams& params) {
  if (jobs.empty()) return Rational(0);
  Rational work(0);
  for (const Job& j : jobs) work += Rational(j.exec);
  return params.busy_power * work + params.wake_energy;
}

}  // namespace powersched
