#include "powersched/harness.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

#include "powersched/analysis.hpp"
#include "powersched/feasibility.hpp"
#include "powersched/invariants.hpp"
#include "powersched/policies.hpp"

namespace powersched {

namespace {

// mt19937_64 output is pinned by the standard, so modulo draws keep the
// generator reproducible across platforms. The slight modulo bias is fine
// for workload generation.
struct Draw {
  std::mt19937_64 rng;
  explicit Draw(std::uint64_t seed) : rng(seed) {}
  Tick operator()(Tick lo, Tick hi) {
    if (hi <= lo) return lo;
    return lo + static_cast<Tick>(rng() %
                                  static_cast<std::uint64_t>(hi - lo + 1));
  }
};

}  // namespace

GeneratedInstance generate_feasible(int n, Tick horizon, const Rational& slack,
                                    bool unit, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one job");
  if (horizon < n)
    throw std::invalid_argument("horizon " + std::to_string(horizon) +
                                " cannot fit " + std::to_string(n) +
                                " jobs");
  if (slack < Rational(0))
    throw std::invalid_argument("slack must be nonnegative");

  Draw draw(seed);

  std::vector<Tick> exec(n, 1);
  Tick spare = horizon - n;
  if (!unit) {
    const Tick cap = std::max<Tick>(0, horizon / (2 * n));
    for (int i = 0; i < n; ++i) {
      Tick extra = draw(0, std::min(spare, cap));
      exec[i] += extra;
      spare -= extra;
    }
  }

  // Disjoint slots left to right; leftover spare becomes trailing idle time.
  std::vector<Tick> start(n);
  Tick cursor = 0;
  for (int i = 0; i < n; ++i) {
    Tick gap = draw(0, spare / (n - i));
    spare -= gap;
    cursor += gap;
    start[i] = cursor;
    cursor += exec[i];
  }

  Rational widen_r = slack * Rational(horizon);
  Tick widen = widen_r.floor();
  std::vector<Job> jobs(n);
  for (int i = 0; i < n; ++i) {
    Tick end = start[i] + exec[i];
    Job& j = jobs[i];
    j.id = i;
    j.arrival = start[i] - draw(0, std::min(start[i], widen));
    j.deadline = end + draw(0, std::min(horizon - end, widen));
    j.exec = exec[i];
  }
  validate_job_set(jobs);

  TraceBuilder tb;
  Tick prev_end = -1;
  for (int i = 0; i < n; ++i) {
    if (start[i] > prev_end) tb.record_wake(0, start[i]);
    for (Tick t = start[i]; t < start[i] + exec[i]; ++t)
      tb.record(0, t, SegmentState::Busy, i);
    prev_end = start[i] + exec[i];
  }

  GeneratedInstance out{std::move(jobs), tb.finish(horizon)};
  if (!check_trace_against_jobs(out.witness, out.jobs).feasible())
    throw std::logic_error("generated witness does not meet its deadlines");
  return out;
}

GeneratedStreams generate_feasible_streams(int streams, int jobs_per_stream,
                                           Tick horizon, const Rational& slack,
                                           bool unit, std::uint64_t seed) {
  if (streams < 1) throw std::invalid_argument("need at least one stream");
  GeneratedStreams out;
  for (int s = 0; s < streams; ++s) {
    GeneratedInstance part = generate_feasible(jobs_per_stream, horizon, slack,
                                               unit, seed + std::uint64_t(s));
    for (const Job& j : part.jobs) {
      Job tagged = j;
      tagged.id = s * jobs_per_stream + j.id;
      tagged.stream = s;
      out.jobs.push_back(tagged);
    }
    out.parts.push_back(std::move(part));
  }
  return out;
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec,
                                    const EnergyParams& params) {
  if (spec.name == "S") {
    AnchorPolicyOptions opts;
    opts.lambda = spec.lambda;
    return std::make_unique<AnchorPolicy>(params, opts);
  }
  if (spec.name == "Sdagger") {
    AnchorPolicyOptions opts;
    opts.lambda = spec.lambda;
    opts.pair_when_queue_clear = true;
    opts.require_unit_jobs = true;
    return std::make_unique<AnchorPolicy>(params, opts);
  }
  if (spec.name == "L") return std::make_unique<LatestStartPolicy>(params);
  if (spec.name == "MS")
    return std::make_unique<MultiStreamPolicy>(params, spec.streams,
                                               spec.processors);
  throw std::invalid_argument("unknown policy \"" + spec.name + "\"");
}

OracleMode oracle_mode_from_string(const std::string& s) {
  if (s == "exact") return OracleMode::Exact;
  if (s == "baseline") return OracleMode::Baseline;
  if (s == "lower_bound") return OracleMode::LowerBound;
  throw std::invalid_argument("unknown oracle mode \"" + s + "\"");
}

std::string to_string(OracleMode mode) {
  switch (mode) {
    case OracleMode::Exact: return "exact";
    case OracleMode::Baseline: return "baseline";
    case OracleMode::LowerBound: return "lower_bound";
  }
  throw std::logic_error("bad oracle mode");
}

namespace {

std::vector<Job> released_by(std::span<const Job> jobs, Tick cut) {
  std::vector<Job> out;
  for (const Job& j : jobs)
    if (j.arrival <= cut) out.push_back(j);
  return out;
}

// Reference cost is per stream: each stream alone is single-processor
// feasible, the merged set need not be.
Rational reference_energy(const ExperimentConfig& cfg,
                          std::span<const Job> merged,
                          const std::vector<GeneratedInstance>& parts) {
  if (cfg.oracle == OracleMode::LowerBound) {
    std::vector<Job> jobs(merged.begin(), merged.end());
    if (cfg.at_time) jobs = released_by(jobs, *cfg.at_time);
    return opt_lower_bound(jobs, cfg.params);
  }
  Rational total{0};
  for (const GeneratedInstance& part : parts) {
    std::vector<Job> jobs = part.jobs;
    if (cfg.at_time) jobs = released_by(jobs, *cfg.at_time);
    if (jobs.empty()) continue;
    if (cfg.oracle == OracleMode::Exact)
      total += opt_energy_exact(jobs, cfg.params, cfg.limits).energy;
    else
      total += energy_of_trace(edf_schedule(jobs), cfg.params).total();
  }
  return total;
}

RatioRow run_one(const ExperimentConfig& cfg, int index) {
  RatioRow row;
  row.instance = index;
  std::uint64_t seed = cfg.seed + std::uint64_t(index);

  std::vector<Job> jobs;
  std::vector<GeneratedInstance> parts;
  if (cfg.workload.streams > 1) {
    GeneratedStreams gs = generate_feasible_streams(
        cfg.workload.streams, cfg.workload.jobs, cfg.workload.horizon,
        cfg.workload.slack, cfg.workload.unit, seed);
    jobs = std::move(gs.jobs);
    parts = std::move(gs.parts);
  } else {
    GeneratedInstance gi =
        generate_feasible(cfg.workload.jobs, cfg.workload.horizon,
                          cfg.workload.slack, cfg.workload.unit, seed);
    jobs = gi.jobs;
    parts.push_back(std::move(gi));
  }

  auto policy = make_policy(cfg.policy, cfg.params);
  SimulateOptions opts;
  opts.params = cfg.params;
  opts.horizon =
      max_deadline(jobs) + cfg.params.break_even().ceil() + 2;
  opts.max_processors =
      std::max<int>(64, static_cast<int>(jobs.size()) + 2);
  SimulationResult sim = simulate_jobs(*policy, jobs, opts);

  sim.trace.validate();
  TraceCheckReport check = check_trace_against_jobs(sim.trace, jobs);
  if (!check.feasible()) {
    row.error = "policy missed " + std::to_string(check.misses.size()) +
                " deadline(s)";
    return row;
  }

  if (cfg.policy.name == "S" || cfg.policy.name == "Sdagger") {
    InvariantOptions iopts;
    iopts.lambda = cfg.policy.lambda;
    iopts.paired_units = cfg.policy.name == "Sdagger";
    row.violations = static_cast<int>(
        check_anchor_invariants(sim.trace, jobs, cfg.params, iopts).size());
  } else if (cfg.policy.name == "MS" &&
             sim.trace.processors() > cfg.policy.processors) {
    row.violations = 1;
  }

  if (cfg.at_time) {
    Tick cut = std::min(*cfg.at_time, sim.trace.horizon);
    row.policy_energy = energy_in_window(sim.trace, cfg.params, 0, cut).total();
  } else {
    row.policy_energy = sim.energy.total();
  }
  row.opt_energy = reference_energy(cfg, jobs, parts);
  if (row.opt_energy == Rational(0)) {
    if (row.policy_energy == Rational(0)) {
      row.ratio = Rational(1);
    } else {
      row.error = "reference energy is zero";
    }
    return row;
  }
  row.ratio = row.policy_energy / row.opt_energy;
  return row;
}

}  // namespace

std::vector<RatioRow> run_ratio_experiment(const ExperimentConfig& config) {
  config.params.validate();
  if (config.workload.instances < 0)
    throw std::invalid_argument("instance count must be nonnegative");
  if (config.workload.streams < 1)
    throw std::invalid_argument("need at least one stream");
  if (config.policy.name == "MS" &&
      config.workload.streams != config.policy.streams)
    throw std::invalid_argument(
        "workload streams must match the multi-stream policy");

  std::vector<RatioRow> rows;
  rows.reserve(config.workload.instances);
  for (int i = 0; i < config.workload.instances; ++i) {
    try {
      rows.push_back(run_one(config, i));
    } catch (const std::exception& e) {
      RatioRow row;
      row.instance = i;
      row.error = e.what();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.empty()) return s;
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

}  // namespace

std::string ratio_rows_to_csv(std::span<const RatioRow> rows) {
  std::ostringstream out;
  out << "instance,policy_energy,opt_energy,ratio,invariant_violations,error\n";
  for (const RatioRow& row : rows) {
    out << row.instance << ',' << row.policy_energy.str() << ','
        << row.opt_energy.str() << ',' << row.ratio.str() << ','
        << row.violations << ',' << csv_field(row.error) << '\n';
  }
  return out.str();
}

}  // namespace powersched
