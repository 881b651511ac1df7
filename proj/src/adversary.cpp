#include "powersched/adversary.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "powersched/analysis.hpp"

namespace powersched {

Tick round_tick(const Rational& r) {
  return (r + Rational(1, 2)).floor();
}

void AdversaryParams::validate() const {
  if (k < 10)
    throw std::invalid_argument("adversary scale k must be at least 10");
  if (x < Rational(0) || x > Rational(2, 5))
    throw std::invalid_argument("x must lie in [0, 2/5]");
  if (eta < Rational(0)) throw std::invalid_argument("eta must be >= 0");
  if (chi < Rational(0)) throw std::invalid_argument("chi must be >= 0");
  // A half tick at the threshold would round the batch one past its window.
  Rational h = (Rational(1, 2) - x) * Rational(k);
  if (h - Rational(h.floor()) == Rational(1, 2))
    throw std::invalid_argument("(1/2 - x) * k lands on a half tick");
}

EnergyParams AdversaryParams::energy() const {
  return EnergyParams{Rational(k), Rational(1), Rational(1)};
}

Tick AdversaryParams::first_deadline() const { return k; }

Tick AdversaryParams::exec_threshold() const {
  return round_tick((Rational(1, 2) - x) * Rational(k));
}

Tick AdversaryParams::case1_monitor_end() const {
  return round_tick(Rational(3, 2) * Rational(k));
}

Tick AdversaryParams::window1_end() const {
  return round_tick((Rational(3, 2) + eta) * Rational(k));
}

Tick AdversaryParams::window2_end() const {
  return round_tick((Rational(3, 2) + eta + chi) * Rational(k));
}

Tick AdversaryParams::duel_horizon() const { return window2_end() + k + 2; }

Tick AdversaryParams::batch_size() const {
  return round_tick((Rational(1, 2) + x) * Rational(k)) - 1;
}

std::optional<Job> monitor_step(std::optional<Tick> observed_all_off_at,
                                Tick t0, Tick t1) {
  if (t0 > t1) throw std::invalid_argument("empty observation window");
  if (!observed_all_off_at) return std::nullopt;
  Tick q = *observed_all_off_at;
  if (q < t0 || q > t1) return std::nullopt;
  return Job{-1, q + 1, q + 2, 1};
}

AdversarySource::AdversarySource(const AdversaryParams& params)
    : params_(params) {
  params_.validate();
}

Job AdversarySource::emit(Tick arrival, Tick deadline, Tick exec) {
  Job j{next_id_++, arrival, deadline, exec};
  log_.push_back(j);
  return j;
}

std::vector<Job> AdversarySource::arrivals(Tick t, const EngineHistory& history) {
  std::vector<Job> out;
  if (phase_ == Phase::Done) return out;
  const Tick B = params_.first_deadline();

  if (t == 0) {
    out.push_back(emit(0, B, 1));
    m_ = 1;
    return out;
  }
  const Tick q = t - 1;  // newest tick the source may observe

  if (phase_ == Phase::WaitingFirstExec) {
    if (auto t_exec = history.first_run_of(0)) {
      // polled every tick, so the opener can only be seen within threshold
      case_id_ = 1;
      monitor_start_ = *t_exec;
      phase_ = Phase::Case1Monitor;
    } else if (t == params_.exec_threshold() + 1) {
      case_id_ = 2;
      for (Tick i = 0; i < params_.batch_size(); ++i)
        out.push_back(emit(t, B, 1));
      phase_ = Phase::Case2Monitor1;
      return out;
    } else {
      return out;
    }
  }

  if (phase_ == Phase::Case1Monitor) {
    const Tick end = params_.case1_monitor_end();
    std::optional<Tick> off =
        history.all_off_during(q) ? std::optional<Tick>(q) : std::nullopt;
    if (auto j = monitor_step(off, monitor_start_, end)) {
      out.push_back(emit(j->arrival, j->deadline, j->exec));
      ++m_;
    }
    if (q >= end) phase_ = Phase::Done;
    return out;
  }

  if (phase_ == Phase::Case2Monitor1) {
    const Tick end = params_.window1_end();
    if (q >= B) {
      std::optional<Tick> off =
          history.all_off_during(q) ? std::optional<Tick>(q) : std::nullopt;
      if (auto j = monitor_step(off, B, end)) {
        out.push_back(emit(j->arrival, j->deadline, j->exec));
        ++m1_;
      }
    }
    if (q >= end) phase_ = m1_ >= 1 ? Phase::Case2Monitor2 : Phase::Done;
    return out;
  }

  // Case2Monitor2
  const Tick end = params_.window2_end();
  std::optional<Tick> off =
      history.all_off_during(q) ? std::optional<Tick>(q) : std::nullopt;
  if (auto j = monitor_step(off, params_.window1_end() + 1, end)) {
    out.push_back(emit(j->arrival, j->deadline, j->exec));
    ++m2_;
  }
  if (q >= end) phase_ = Phase::Done;
  return out;
}

namespace {

// One awake interval on processor 0: wake at `on`, run the listed ticks,
// standby in between, off from `off` on.
void awake_span(TraceBuilder& tb, Tick on, Tick off,
                const std::map<Tick, int>& busy) {
  tb.record_wake(0, on);
  for (Tick t = on; t < off; ++t) {
    auto it = busy.find(t);
    if (it != busy.end())
      tb.record(0, t, SegmentState::Busy, it->second);
    else
      tb.record(0, t, SegmentState::Standby);
  }
}

ScheduleTrace finish_checked(TraceBuilder& tb, Tick horizon,
                             std::span<const Job> released) {
  ScheduleTrace trace = tb.finish(horizon);
  trace.validate();
  TraceCheckReport rep = check_trace_against_jobs(trace, released);
  if (!rep.feasible())
    throw std::logic_error("reference schedule failed its own feasibility check");
  return trace;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

ScheduleTrace baseline_case1(std::span<const Job> released,
                             const AdversaryParams& params) {
  params.validate();
  const Tick B = params.first_deadline();
  require(!released.empty(), "empty release log");
  require(released[0].arrival == 0 && released[0].deadline == B &&
              released[0].exec == 1,
          "log does not open with the break-even unit job");
  const int m = static_cast<int>(released.size());
  std::vector<Tick> a;  // urgent arrivals, ascending
  for (int i = 1; i < m; ++i) {
    const Job& j = released[i];
    require(j.exec == 1 && j.deadline == j.arrival + 1, "non-urgent follow-up");
    require(j.arrival > (i >= 2 ? a.back() : Tick{0}), "arrivals not ascending");
    a.push_back(j.arrival);
  }

  TraceBuilder tb;
  const int opener = released[0].id;
  if (m == 1) {
    awake_span(tb, 0, 1, {{0, opener}});
  } else if (m == 2) {
    if (a[0] <= B)
      awake_span(tb, a[0] - 1, a[0] + 1,
                 {{a[0] - 1, opener}, {a[0], released[1].id}});
    else
      awake_span(tb, B - 1, a[0] + 1, {{B - 1, opener}, {a[0], released[1].id}});
  } else if (m == 3) {
    if (a[1] - a[0] > B) {
      // far apart: pay a second wake rather than idle through the gap
      awake_span(tb, a[0] - 1, a[0] + 1,
                 {{a[0] - 1, opener}, {a[0], released[1].id}});
      awake_span(tb, a[1], a[1] + 1, {{a[1], released[2].id}});
    } else {
      Tick t1;
      if (a[0] > B)
        t1 = B - 1;
      else if (a[0] <= B - 2 && a[1] > a[0] + 1)
        t1 = a[0] + 1;
      else
        t1 = a[0] - 1;
      awake_span(tb, std::min(t1, a[0]), a[1] + 1,
                 {{t1, opener}, {a[0], released[1].id}, {a[1], released[2].id}});
    }
  } else {
    const Tick s = std::min(a[0] - 1, B - 1);
    std::map<Tick, int> busy{{s, opener}};
    for (int i = 1; i < m; ++i) busy.emplace(released[i].arrival, released[i].id);
    awake_span(tb, s, a.back() + 1, busy);
  }
  return finish_checked(tb, params.duel_horizon(), released);
}

ScheduleTrace baseline_case2(std::span<const Job> released,
                             const AdversaryParams& params) {
  params.validate();
  const Tick B = params.first_deadline();
  const Tick start = params.exec_threshold();
  const Tick batch = params.batch_size();
  require(static_cast<Tick>(released.size()) >= 1 + batch,
          "log shorter than the overload batch");
  require(released[0].arrival == 0 && released[0].deadline == B &&
              released[0].exec == 1,
          "log does not open with the break-even unit job");
  for (Tick i = 0; i < batch; ++i) {
    const Job& j = released[static_cast<size_t>(1 + i)];
    require(j.arrival == start + 1 && j.deadline == B && j.exec == 1,
            "malformed overload batch");
  }
  // batch fills [start+1, B) exactly; the opener takes the tick before it
  if (start + 1 + batch != B)
    throw std::logic_error("batch does not tile its window");

  std::map<Tick, int> busy{{start, released[0].id}};
  for (Tick i = 0; i < batch; ++i)
    busy.emplace(start + 1 + i, released[static_cast<size_t>(1 + i)].id);

  int m1 = 0, m2 = 0;
  Tick last = 0;
  for (size_t i = static_cast<size_t>(1 + batch); i < released.size(); ++i) {
    const Job& j = released[i];
    require(j.exec == 1 && j.deadline == j.arrival + 1, "non-urgent follow-up");
    require(j.arrival > B && j.arrival > last, "follow-up out of order");
    require(j.arrival <= params.window2_end() + 1, "follow-up past the last window");
    if (j.arrival <= params.window1_end() + 1)
      ++m1;
    else
      ++m2;
    busy.emplace(j.arrival, j.id);
    last = j.arrival;
  }
  require(m1 >= 1 || m2 == 0, "second-window job without a first-window one");

  Tick off;
  if (m1 == 0)
    off = B;
  else if (m2 == 0)
    off = std::max(params.window1_end(), last + 1);
  else
    off = std::max(params.window2_end(), last + 1);

  TraceBuilder tb;
  awake_span(tb, start, off, busy);
  return finish_checked(tb, params.duel_horizon(), released);
}

DuelReport run_duel(Policy& policy, const AdversaryParams& params) {
  params.validate();
  AdversarySource source(params);
  SimulateOptions opts;
  opts.params = params.energy();
  opts.horizon = params.duel_horizon();
  opts.max_processors =
      static_cast<int>(std::max<long long>(1024, 2 * params.k));

  DuelReport rep;
  rep.policy_run = simulate(policy, source, opts);
  if (!rep.policy_run.report.misses.empty())
    throw std::runtime_error("policy missed a deadline under the adversary");
  rep.case_id = source.case_id();
  rep.m = source.released_case1();
  rep.m1 = source.released_window1();
  rep.m2 = source.released_window2();
  rep.released = source.released();
  rep.baseline = rep.case_id == 1 ? baseline_case1(rep.released, params)
                                  : baseline_case2(rep.released, params);
  rep.policy_energy = rep.policy_run.energy.total();
  rep.baseline_energy = energy_of_trace(rep.baseline, params.energy()).total();
  rep.ratio = rep.policy_energy / rep.baseline_energy;
  return rep;
}

std::vector<Job> gen_J_edf(long long k) {
  if (k < 2) throw std::invalid_argument("need k >= 2");
  std::vector<Job> jobs;
  jobs.push_back(Job{0, 0, 4 * k, 3 * k});
  for (long long i = 1; i < k; ++i)
    jobs.push_back(Job{static_cast<int>(i), k, 4 * k - 1, 1});
  return jobs;
}

std::vector<Job> gen_J_six(long long n, long long B) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("need even n >= 2");
  if (B < 6) throw std::invalid_argument("need B >= 6");
  std::vector<Job> jobs;
  for (long long i = 1; i <= n; ++i)
    jobs.push_back(
        Job{static_cast<int>(i - 1), (i - 1) * B + 2 * i, i * B + 2 * i + 1, 1});
  for (long long k = 1; k <= n / 2; ++k)
    jobs.push_back(Job{static_cast<int>(n + k - 1), 2 * k * B + 4 * k,
                       2 * k * B + 4 * k + 1, 1});
  return jobs;
}

ScheduleTrace baseline_F(long long n, long long B, const EnergyParams& params) {
  params.validate();
  std::vector<Job> jobs = gen_J_six(n, B);

  TraceBuilder tb;
  for (long long k = 1; k <= n / 2; ++k) {
    // the first interval only preps j_1; later ones also catch the previous
    // pair j_{2k-2}, j'_{k-1} whose deadlines sit just inside
    std::map<Tick, int> busy;
    const Tick on = std::max<Tick>(0, (2 * k - 2) * B + 4 * k - 5);
    const Tick off = (2 * k - 2) * B + 4 * k - 1;
    if (k >= 2) {
      busy.emplace((2 * k - 2) * B + 4 * k - 5, static_cast<int>(2 * k - 3));
      busy.emplace((2 * k - 2) * B + 4 * k - 4,
                   static_cast<int>(n + k - 2));
    }
    busy.emplace((2 * k - 2) * B + 4 * k - 2, static_cast<int>(2 * k - 2));
    awake_span(tb, on, off, busy);
  }
  awake_span(tb, n * B + 2 * n - 1, n * B + 2 * n + 1,
             {{n * B + 2 * n - 1, static_cast<int>(n - 1)},
              {n * B + 2 * n, static_cast<int>(n + n / 2 - 1)}});

  ScheduleTrace trace = tb.finish(n * B + 2 * n + 1);
  trace.validate();
  TraceCheckReport rep = check_trace_against_jobs(trace, jobs);
  if (!rep.feasible())
    throw std::logic_error("reference schedule failed its own feasibility check");
  EnergyBreakdown eb = energy_of_trace(trace, params);
  Rational bound = Rational(n / 2 + 1) *
                   (params.wake_energy + Rational(4) * params.busy_power);
  if (eb.total() > bound)
    throw std::logic_error("reference schedule exceeds its energy bound");
  return trace;
}

}  // namespace powersched
