#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "powersched/adversary.hpp"
#include "powersched/analysis.hpp"
#include "powersched/feasibility.hpp"
#include "powersched/harness.hpp"
#include "powersched/oracle.hpp"
#include "powersched/policies.hpp"

using namespace powersched;

namespace {

std::uint64_t seed_with_env(std::uint64_t fallback) {
  const char* s = std::getenv("POWERSCHED_SEED");
  if (!s || !*s) return fallback;
  try {
    size_t used = 0;
    std::uint64_t v = std::stoull(s, &used);
    if (used != std::string(s).size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("POWERSCHED_SEED must be an unsigned integer");
  }
}

std::string canon_policy(std::string name) {
  for (char& c : name) c = static_cast<char>(std::tolower(c));
  if (name == "s") return "S";
  if (name == "sdagger") return "Sdagger";
  if (name == "l") return "L";
  if (name == "ms") return "MS";
  throw std::runtime_error("unknown policy \"" + name +
                           "\" (expected S, Sdagger, L, or MS)");
}

struct EnergyOpts {
  std::string ew = "1";
  std::string psi_b = "1";
  std::string psi_s = "1";

  EnergyParams params() const {
    EnergyParams p;
    p.wake_energy = Rational::parse(ew);
    p.busy_power = Rational::parse(psi_b);
    p.standby_power = Rational::parse(psi_s);
    p.validate();
    return p;
  }
};

void add_energy_opts(CLI::App* cmd, EnergyOpts& opts) {
  cmd->add_option("--ew", opts.ew, "wake energy (rational)");
  cmd->add_option("--psi-b", opts.psi_b, "busy power per tick (rational)");
  cmd->add_option("--psi-s", opts.psi_s, "standby power per tick (rational)");
}

struct PolicyOpts {
  std::string name = "S";
  std::string lambda;  // empty picks the policy's natural default
  int streams = 3;
  int procs = 4;

  PolicySpec spec() const {
    PolicySpec s;
    s.name = canon_policy(name);
    if (!lambda.empty())
      s.lambda = Rational::parse(lambda);
    else if (s.name == "Sdagger")
      s.lambda = default_pair_lambda();
    s.streams = streams;
    s.processors = procs;
    return s;
  }
};

void add_policy_opts(CLI::App* cmd, PolicyOpts& opts) {
  cmd->add_option("--policy", opts.name, "S, Sdagger, L, or MS");
  cmd->add_option("--lambda", opts.lambda,
                  "anchor standby fraction (rational; defaults to 1, or "
                  "4-sqrt(10) for Sdagger)");
  cmd->add_option("--streams", opts.streams, "stream count for MS");
  cmd->add_option("--procs", opts.procs, "processor budget for MS");
}

// Jobs path accepted either as --jobs or as a positional argument.
struct JobsArg {
  std::string flag;
  std::string positional;

  std::vector<Job> load() const {
    std::string path = flag.empty() ? positional : flag;
    if (path.empty()) throw std::runtime_error("no job file given");
    if (!flag.empty() && !positional.empty() && flag != positional)
      throw std::runtime_error("job file given twice");
    return load_jobs_file(path);
  }
};

void add_jobs_arg(CLI::App* cmd, JobsArg& arg) {
  cmd->add_option("--jobs", arg.flag, "job set JSON file");
  cmd->add_option("file", arg.positional, "job set JSON file");
}

void emit(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

int run_check(const JobsArg& jobs_arg) {
  auto jobs = jobs_arg.load();
  ConditionResult res = condition_edf(jobs);
  nlohmann::json out{{"ok", res.ok}};
  if (!res.ok)
    out["witness"] = {{"left", res.worst.left},
                      {"right", res.worst.right},
                      {"demand", res.worst.demand}};
  emit(out);
  return res.ok ? 0 : 1;
}

int run_simulate(const PolicyOpts& policy_opts, const EnergyOpts& energy_opts,
                 const JobsArg& jobs_arg, Tick horizon, int max_procs,
                 const std::string& trace_out, const std::string& csv_out) {
  auto jobs = jobs_arg.load();
  EnergyParams params = energy_opts.params();
  auto policy = make_policy(policy_opts.spec(), params);

  SimulateOptions opts;
  opts.params = params;
  opts.horizon = horizon > 0
                     ? horizon
                     : max_deadline(jobs) + params.break_even().ceil() + 2;
  opts.max_processors = max_procs;
  SimulationResult sim = simulate_jobs(*policy, jobs, opts);
  sim.trace.validate();

  if (!trace_out.empty()) save_trace_file(trace_out, sim.trace);
  if (!csv_out.empty()) {
    std::ofstream f(csv_out);
    if (!f) throw std::runtime_error("cannot write " + csv_out);
    f << "policy,total,wake_count,busy_ticks,standby_ticks,"
         "wake_cost,busy_cost,standby_cost\n"
      << policy->name() << ',' << sim.energy.total().str() << ','
      << sim.energy.wake_count << ',' << sim.energy.busy_ticks << ','
      << sim.energy.standby_ticks << ',' << sim.energy.wake_cost.str() << ','
      << sim.energy.busy_cost.str() << ',' << sim.energy.standby_cost.str()
      << '\n';
  }

  nlohmann::json misses = nlohmann::json::array();
  for (const DeadlineMiss& m : sim.report.misses)
    misses.push_back({{"job", m.job}, {"at", m.at}});
  emit({{"policy", policy->name()},
        {"horizon", sim.trace.horizon},
        {"processors", sim.trace.processors()},
        {"energy", sim.energy.total().str()},
        {"wake_count", sim.energy.wake_count},
        {"busy_ticks", sim.energy.busy_ticks},
        {"standby_ticks", sim.energy.standby_ticks},
        {"misses", misses}});
  return sim.report.feasible() ? 0 : 1;
}

int run_adversary(const PolicyOpts& policy_opts, const std::string& k,
                  const std::string& x, const std::string& eta,
                  const std::string& chi) {
  AdversaryParams params;
  params.k = Rational::parse(k).floor();
  params.x = Rational::parse(x);
  params.eta = Rational::parse(eta);
  params.chi = Rational::parse(chi);
  params.validate();

  auto policy = make_policy(policy_opts.spec(), params.energy());
  DuelReport rep = run_duel(*policy, params);

  nlohmann::json out{{"case", rep.case_id},
                     {"policy", policy->name()},
                     {"policy_energy", rep.policy_energy.str()},
                     {"baseline_energy", rep.baseline_energy.str()},
                     {"ratio", rep.ratio.str()},
                     {"released", rep.released.size()}};
  if (rep.case_id == 1)
    out["m"] = rep.m;
  else {
    out["m1"] = rep.m1;
    out["m2"] = rep.m2;
  }
  emit(out);
  return 0;
}

int run_opt(const JobsArg& jobs_arg, const EnergyOpts& energy_opts,
            int max_jobs, Tick max_horizon, const std::string& trace_out) {
  auto jobs = jobs_arg.load();
  OracleLimits limits;
  limits.max_jobs = max_jobs;
  limits.max_horizon = max_horizon;
  try {
    OracleResult res = opt_energy_exact(jobs, energy_opts.params(), limits);
    if (!trace_out.empty()) save_trace_file(trace_out, res.trace);
    emit({{"energy", res.energy.str()},
          {"trace", nlohmann::json::parse(trace_to_json(res.trace))}});
    return 0;
  } catch (const InfeasibleError& e) {
    emit({{"error", e.what()},
          {"witness",
           {{"left", e.witness.left},
            {"right", e.witness.right},
            {"demand", e.witness.demand}}}});
    return 1;
  }
}

int run_generate(int n, Tick horizon, const std::string& slack, bool unit,
                 int streams, std::uint64_t seed, const std::string& out_path,
                 const std::string& witness_out) {
  seed = seed_with_env(seed);
  Rational slack_r = Rational::parse(slack);
  nlohmann::json summary{{"seed", seed}, {"path", out_path}};
  if (streams > 1) {
    if (!witness_out.empty())
      throw std::runtime_error(
          "witness output covers single-stream instances only");
    GeneratedStreams gs =
        generate_feasible_streams(streams, n, horizon, slack_r, unit, seed);
    save_jobs_file(out_path, gs.jobs);
    summary["jobs"] = gs.jobs.size();
    summary["streams"] = streams;
  } else {
    GeneratedInstance gi = generate_feasible(n, horizon, slack_r, unit, seed);
    save_jobs_file(out_path, gi.jobs);
    if (!witness_out.empty()) save_trace_file(witness_out, gi.witness);
    summary["jobs"] = gi.jobs.size();
  }
  emit(summary);
  return 0;
}

int run_ratio(const PolicyOpts& policy_opts, const EnergyOpts& energy_opts,
              int instances, int n, Tick horizon, const std::string& slack,
              bool unit, int streams, const std::string& oracle,
              std::uint64_t seed, std::optional<Tick> at_time,
              const std::string& csv_out) {
  ExperimentConfig cfg;
  cfg.policy = policy_opts.spec();
  cfg.workload.instances = instances;
  cfg.workload.jobs = n;
  cfg.workload.horizon = horizon;
  cfg.workload.slack = Rational::parse(slack);
  cfg.workload.unit = unit;
  cfg.workload.streams = streams;
  cfg.params = energy_opts.params();
  cfg.oracle = oracle_mode_from_string(oracle);
  cfg.seed = seed_with_env(seed);
  cfg.at_time = at_time;

  std::string csv = ratio_rows_to_csv(run_ratio_experiment(cfg));
  if (csv_out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream f(csv_out);
    if (!f) throw std::runtime_error("cannot write " + csv_out);
    f << csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-aware scheduling of hard real-time jobs"};
  app.require_subcommand(1);
  int rc = 0;

  auto* check = app.add_subcommand(
      "check", "test a job set for single-processor schedulability");
  auto check_jobs = std::make_shared<JobsArg>();
  add_jobs_arg(check, *check_jobs);
  check->callback([&rc, check_jobs] { rc = run_check(*check_jobs); });

  auto* simulate =
      app.add_subcommand("simulate", "run a policy over a job set");
  auto sim_policy = std::make_shared<PolicyOpts>();
  auto sim_energy = std::make_shared<EnergyOpts>();
  auto sim_jobs = std::make_shared<JobsArg>();
  auto sim_horizon = std::make_shared<Tick>(0);
  auto sim_max_procs = std::make_shared<int>(1024);
  auto sim_trace_out = std::make_shared<std::string>();
  auto sim_csv_out = std::make_shared<std::string>();
  add_policy_opts(simulate, *sim_policy);
  add_energy_opts(simulate, *sim_energy);
  add_jobs_arg(simulate, *sim_jobs);
  simulate->add_option("--horizon", *sim_horizon,
                       "simulation length (0 = cover every deadline)");
  simulate->add_option("--max-procs", *sim_max_procs,
                       "processor allocation cap");
  simulate->add_option("--trace-out", *sim_trace_out, "trace JSON path");
  simulate->add_option("--csv-out", *sim_csv_out, "energy breakdown CSV path");
  simulate->callback([=, &rc] {
    rc = run_simulate(*sim_policy, *sim_energy, *sim_jobs, *sim_horizon,
                      *sim_max_procs, *sim_trace_out, *sim_csv_out);
  });

  auto* adversary = app.add_subcommand(
      "adversary", "duel a policy against the reactive release sequence");
  auto adv_policy = std::make_shared<PolicyOpts>();
  auto adv_k = std::make_shared<std::string>("10000");
  auto adv_x = std::make_shared<std::string>("0.1218");
  auto adv_eta = std::make_shared<std::string>("0.2206");
  auto adv_chi = std::make_shared<std::string>("0.4852");
  add_policy_opts(adversary, *adv_policy);
  adversary->add_option("--k", *adv_k, "scale: wake energy and break-even");
  adversary->add_option("--x", *adv_x, "first-deadline offset fraction");
  adversary->add_option("--eta", *adv_eta, "first monitoring window fraction");
  adversary->add_option("--chi", *adv_chi, "second monitoring window fraction");
  adversary->callback([=, &rc] {
    rc = run_adversary(*adv_policy, *adv_k, *adv_x, *adv_eta, *adv_chi);
  });

  auto* opt = app.add_subcommand(
      "opt", "exact minimum-energy schedule for a small job set");
  auto opt_jobs = std::make_shared<JobsArg>();
  auto opt_energy = std::make_shared<EnergyOpts>();
  auto opt_max_jobs = std::make_shared<int>(8);
  auto opt_max_horizon = std::make_shared<Tick>(40);
  auto opt_trace_out = std::make_shared<std::string>();
  add_jobs_arg(opt, *opt_jobs);
  add_energy_opts(opt, *opt_energy);
  opt->add_option("--max-jobs", *opt_max_jobs, "exact search job cap");
  opt->add_option("--max-horizon", *opt_max_horizon,
                  "exact search horizon cap");
  opt->add_option("--trace-out", *opt_trace_out, "trace JSON path");
  opt->callback([=, &rc] {
    rc = run_opt(*opt_jobs, *opt_energy, *opt_max_jobs, *opt_max_horizon,
                 *opt_trace_out);
  });

  auto* generate = app.add_subcommand(
      "generate", "draw a feasible job set with a witness schedule");
  auto gen_n = std::make_shared<int>(5);
  auto gen_horizon = std::make_shared<Tick>(100);
  auto gen_slack = std::make_shared<std::string>("1/2");
  auto gen_unit = std::make_shared<bool>(false);
  auto gen_streams = std::make_shared<int>(1);
  auto gen_seed = std::make_shared<std::uint64_t>(0);
  auto gen_out = std::make_shared<std::string>();
  auto gen_witness = std::make_shared<std::string>();
  generate->add_option("--jobs", *gen_n, "jobs per stream");
  generate->add_option("--horizon", *gen_horizon, "packing horizon");
  generate->add_option("--slack", *gen_slack,
                       "window widening fraction (rational)");
  generate->add_flag("--unit", *gen_unit, "force unit execution times");
  generate->add_option("--streams", *gen_streams, "independent streams");
  generate->add_option("--seed", *gen_seed, "generator seed");
  generate->add_option("out", *gen_out, "output job JSON path")->required();
  generate->add_option("--witness-out", *gen_witness, "witness trace path");
  generate->callback([=, &rc] {
    rc = run_generate(*gen_n, *gen_horizon, *gen_slack, *gen_unit,
                      *gen_streams, *gen_seed, *gen_out, *gen_witness);
  });

  auto* ratio = app.add_subcommand(
      "ratio", "policy-vs-reference energy ratios over seeded workloads");
  auto ratio_policy = std::make_shared<PolicyOpts>();
  auto ratio_energy = std::make_shared<EnergyOpts>();
  auto ratio_instances = std::make_shared<int>(100);
  auto ratio_n = std::make_shared<int>(5);
  auto ratio_horizon = std::make_shared<Tick>(30);
  auto ratio_slack = std::make_shared<std::string>("1/2");
  auto ratio_unit = std::make_shared<bool>(false);
  auto ratio_streams = std::make_shared<int>(1);
  auto ratio_oracle = std::make_shared<std::string>("exact");
  auto ratio_seed = std::make_shared<std::uint64_t>(0);
  auto ratio_at_time = std::make_shared<Tick>(-1);
  auto ratio_csv_out = std::make_shared<std::string>();
  add_policy_opts(ratio, *ratio_policy);
  add_energy_opts(ratio, *ratio_energy);
  ratio->add_option("--instances", *ratio_instances, "instance count");
  ratio->add_option("--jobs", *ratio_n, "jobs per stream");
  ratio->add_option("--horizon", *ratio_horizon, "packing horizon");
  ratio->add_option("--slack", *ratio_slack,
                    "window widening fraction (rational)");
  ratio->add_flag("--unit", *ratio_unit, "force unit execution times");
  ratio->add_option("--workload-streams", *ratio_streams,
                    "streams per instance");
  ratio->add_option("--oracle", *ratio_oracle,
                    "exact, baseline, or lower_bound");
  ratio->add_option("--seed", *ratio_seed, "campaign seed");
  ratio->add_option("--at-time", *ratio_at_time,
                    "compare energy prefixes at this tick");
  ratio->add_option("--csv-out", *ratio_csv_out,
                    "CSV path (default: stdout)");
  ratio->callback([=, &rc] {
    std::optional<Tick> cut;
    if (*ratio_at_time >= 0) cut = *ratio_at_time;
    int streams = *ratio_streams;
    if (ratio_policy->spec().name == "MS" &&
        ratio->count("--workload-streams") == 0)
      streams = ratio_policy->streams;
    rc = run_ratio(*ratio_policy, *ratio_energy, *ratio_instances, *ratio_n,
                   *ratio_horizon, *ratio_slack, *ratio_unit, streams,
                   *ratio_oracle, *ratio_seed, cut, *ratio_csv_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
