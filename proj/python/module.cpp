#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "powersched/adversary.hpp"
#include "powersched/analysis.hpp"
#include "powersched/feasibility.hpp"
#include "powersched/harness.hpp"
#include "powersched/invariants.hpp"
#include "powersched/oracle.hpp"
#include "powersched/policies.hpp"
#include "powersched/trace.hpp"

namespace py = pybind11;
using namespace powersched;
using namespace pybind11::literals;

namespace {

EnergyParams params_from(const std::string& ew, const std::string& psi_b,
                         const std::string& psi_s) {
  EnergyParams p;
  p.wake_energy = Rational::parse(ew);
  p.busy_power = Rational::parse(psi_b);
  p.standby_power = Rational::parse(psi_s);
  p.validate();
  return p;
}

PolicySpec spec_from(const std::string& policy, const std::string& lambda,
                     int streams, int processors) {
  PolicySpec spec;
  spec.name = policy;
  if (!lambda.empty())
    spec.lambda = Rational::parse(lambda);
  else if (policy == "Sdagger")
    spec.lambda = default_pair_lambda();
  spec.streams = streams;
  spec.processors = processors;
  return spec;
}

py::dict witness_dict(const ConditionWitness& w) {
  return py::dict("left"_a = w.left, "right"_a = w.right,
                  "demand"_a = w.demand);
}

py::list miss_list(const std::vector<DeadlineMiss>& misses) {
  py::list out;
  for (const DeadlineMiss& m : misses)
    out.append(py::dict("job"_a = m.job, "at"_a = m.at));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Energy-aware scheduling of hard real-time jobs on "
            "sleep-capable processors";

  py::class_<Job>(m, "Job")
      .def(py::init([](int id, Tick arrival, Tick deadline, Tick exec,
                       int stream) {
             return Job{id, arrival, deadline, exec, stream};
           }),
           "id"_a, "arrival"_a, "deadline"_a, "exec"_a, "stream"_a = 0)
      .def_readwrite("id", &Job::id)
      .def_readwrite("arrival", &Job::arrival)
      .def_readwrite("deadline", &Job::deadline)
      .def_readwrite("exec", &Job::exec)
      .def_readwrite("stream", &Job::stream)
      .def("__repr__", [](const Job& j) {
        return "Job(id=" + std::to_string(j.id) +
               ", arrival=" + std::to_string(j.arrival) +
               ", deadline=" + std::to_string(j.deadline) +
               ", exec=" + std::to_string(j.exec) +
               ", stream=" + std::to_string(j.stream) + ")";
      });

  m.attr("DEFAULT_PAIR_LAMBDA") = default_pair_lambda().str();

  m.def(
      "condition_edf",
      [](const std::vector<Job>& jobs) {
        ConditionResult r = condition_edf(jobs);
        return py::dict("ok"_a = r.ok, "witness"_a = witness_dict(r.worst));
      },
      "jobs"_a,
      "Single-processor schedulability: every arrival-to-deadline interval "
      "must fit the work it fully contains.");

  m.def(
      "simulate",
      [](const std::vector<Job>& jobs, const std::string& policy,
         const std::string& lambda_, const std::string& ew,
         const std::string& psi_b, const std::string& psi_s, Tick horizon,
         int max_procs, int streams, int processors) {
        EnergyParams params = params_from(ew, psi_b, psi_s);
        auto pol =
            make_policy(spec_from(policy, lambda_, streams, processors),
                        params);
        SimulateOptions opts;
        opts.params = params;
        opts.horizon = horizon > 0 ? horizon
                                   : max_deadline(jobs) +
                                         params.break_even().ceil() + 2;
        opts.max_processors = max_procs;
        SimulationResult sim = simulate_jobs(*pol, jobs, opts);
        sim.trace.validate();
        return py::dict(
            "policy"_a = pol->name(), "energy"_a = sim.energy.total().str(),
            "wake_count"_a = sim.energy.wake_count,
            "busy_ticks"_a = sim.energy.busy_ticks,
            "standby_ticks"_a = sim.energy.standby_ticks,
            "processors"_a = sim.trace.processors(),
            "misses"_a = miss_list(sim.report.misses),
            "trace"_a = trace_to_json(sim.trace));
      },
      "jobs"_a, "policy"_a = "S", "lambda_"_a = "", "ew"_a = "1",
      "psi_b"_a = "1", "psi_s"_a = "1", "horizon"_a = Tick{0},
      "max_procs"_a = 1024, "streams"_a = 3, "processors"_a = 4,
      "Run a policy over a job set; energies are exact rational strings.");

  m.def(
      "opt_energy_exact",
      [](const std::vector<Job>& jobs, const std::string& ew,
         const std::string& psi_b, const std::string& psi_s, int max_jobs,
         Tick max_horizon) {
        OracleLimits limits;
        limits.max_jobs = max_jobs;
        limits.max_horizon = max_horizon;
        OracleResult r =
            opt_energy_exact(jobs, params_from(ew, psi_b, psi_s), limits);
        return py::dict("energy"_a = r.energy.str(),
                        "trace"_a = trace_to_json(r.trace));
      },
      "jobs"_a, "ew"_a = "1", "psi_b"_a = "1", "psi_s"_a = "1",
      "max_jobs"_a = 8, "max_horizon"_a = Tick{40},
      "Minimum-energy feasible single-processor schedule (exact search).");

  m.def(
      "opt_lower_bound",
      [](const std::vector<Job>& jobs, const std::string& ew,
         const std::string& psi_b, const std::string& psi_s) {
        return opt_lower_bound(jobs, params_from(ew, psi_b, psi_s)).str();
      },
      "jobs"_a, "ew"_a = "1", "psi_b"_a = "1", "psi_s"_a = "1");

  m.def(
      "generate_feasible",
      [](int n, Tick horizon, const std::string& slack, bool unit,
         std::uint64_t seed) {
        GeneratedInstance gi =
            generate_feasible(n, horizon, Rational::parse(slack), unit, seed);
        return py::make_tuple(gi.jobs, trace_to_json(gi.witness));
      },
      "n"_a, "horizon"_a, "slack"_a = "1/2", "unit"_a = false, "seed"_a = 0,
      "Random instance with a feasibility witness; deterministic per seed.");

  m.def(
      "check_trace",
      [](const std::string& trace_json, const std::vector<Job>& jobs) {
        ScheduleTrace trace = trace_from_json(trace_json);
        trace.validate();
        TraceCheckReport rep = check_trace_against_jobs(trace, jobs);
        return py::dict("feasible"_a = rep.feasible(),
                        "misses"_a = miss_list(rep.misses),
                        "violations"_a = rep.violations);
      },
      "trace"_a, "jobs"_a);

  m.def(
      "check_anchor_invariants",
      [](const std::string& trace_json, const std::vector<Job>& jobs,
         const std::string& ew, const std::string& psi_b,
         const std::string& psi_s, const std::string& lambda_,
         bool paired_units) {
        InvariantOptions opts;
        opts.lambda = Rational::parse(lambda_);
        opts.paired_units = paired_units;
        return check_anchor_invariants(trace_from_json(trace_json), jobs,
                                       params_from(ew, psi_b, psi_s), opts);
      },
      "trace"_a, "jobs"_a, "ew"_a = "1", "psi_b"_a = "1", "psi_s"_a = "1",
      "lambda_"_a = "1", "paired_units"_a = false,
      "Per-awake-interval structure checks; returns violation messages.");

  m.def(
      "adversary_duel",
      [](const std::string& policy, const std::string& lambda_, long long k,
         const std::string& x, const std::string& eta,
         const std::string& chi) {
        AdversaryParams params;
        params.k = k;
        params.x = Rational::parse(x);
        params.eta = Rational::parse(eta);
        params.chi = Rational::parse(chi);
        params.validate();
        auto pol = make_policy(spec_from(policy, lambda_, 3, 4),
                               params.energy());
        DuelReport rep = run_duel(*pol, params);
        py::dict out("case"_a = rep.case_id, "policy"_a = pol->name(),
                     "policy_energy"_a = rep.policy_energy.str(),
                     "baseline_energy"_a = rep.baseline_energy.str(),
                     "ratio"_a = rep.ratio.str(),
                     "released"_a = rep.released.size());
        if (rep.case_id == 1) {
          out["m"] = rep.m;
        } else {
          out["m1"] = rep.m1;
          out["m2"] = rep.m2;
        }
        return out;
      },
      "policy"_a = "S", "lambda_"_a = "", "k"_a = 10000, "x"_a = "0.1218",
      "eta"_a = "0.2206", "chi"_a = "0.4852",
      "Duel a policy against the reactive release sequence.");

  m.def(
      "ratio_experiment",
      [](const std::string& policy, const std::string& lambda_, int streams,
         int processors, int instances, int jobs, Tick horizon,
         const std::string& slack, bool unit, int workload_streams,
         const std::string& ew, const std::string& psi_b,
         const std::string& psi_s, const std::string& oracle,
         std::uint64_t seed, Tick at_time) {
        ExperimentConfig cfg;
        cfg.policy = spec_from(policy, lambda_, streams, processors);
        cfg.workload.instances = instances;
        cfg.workload.jobs = jobs;
        cfg.workload.horizon = horizon;
        cfg.workload.slack = Rational::parse(slack);
        cfg.workload.unit = unit;
        cfg.workload.streams = workload_streams;
        cfg.params = params_from(ew, psi_b, psi_s);
        cfg.oracle = oracle_mode_from_string(oracle);
        cfg.seed = seed;
        if (at_time >= 0) cfg.at_time = at_time;
        return ratio_rows_to_csv(run_ratio_experiment(cfg));
      },
      "policy"_a = "S", "lambda_"_a = "", "streams"_a = 3,
      "processors"_a = 4, "instances"_a = 100, "jobs"_a = 5,
      "horizon"_a = Tick{30}, "slack"_a = "1/2", "unit"_a = false,
      "workload_streams"_a = 1, "ew"_a = "1", "psi_b"_a = "1",
      "psi_s"_a = "1", "oracle"_a = "exact", "seed"_a = 0,
      "at_time"_a = Tick{-1},
      "Seeded ratio campaign; returns the CSV text.");
}
