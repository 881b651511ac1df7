#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "powersched/energy.hpp"
#include "powersched/engine.hpp"
#include "powersched/job.hpp"
#include "powersched/oracle.hpp"
#include "powersched/rational.hpp"
#include "powersched/trace.hpp"

namespace powersched {

struct GeneratedInstance {
  std::vector<Job> jobs;
  ScheduleTrace witness;  // single-processor schedule meeting every deadline
};

// Random instance that provably admits a feasible single-processor schedule:
// jobs are packed into disjoint execution slots inside [0, horizon) first,
// then each window is widened by up to slack * horizon per side. The witness
// runs the packing. Same seed, same instance, on any platform. Throws
// std::invalid_argument when n jobs cannot fit in the horizon.
GeneratedInstance generate_feasible(int n, Tick horizon, const Rational& slack,
                                    bool unit, std::uint64_t seed);

struct GeneratedStreams {
  std::vector<Job> jobs;                 // merged set, ids renumbered, stream tags set
  std::vector<GeneratedInstance> parts;  // per-stream instances with local ids
};

// One independent feasible instance per stream, merged into a single tagged
// job set. Stream s draws from seed + s.
GeneratedStreams generate_feasible_streams(int streams, int jobs_per_stream,
                                           Tick horizon, const Rational& slack,
                                           bool unit, std::uint64_t seed);

struct PolicySpec {
  std::string name = "S";  // "S" | "Sdagger" | "L" | "MS"
  Rational lambda{1};
  int streams = 3;     // MS only
  int processors = 4;  // MS only
};

std::unique_ptr<Policy> make_policy(const PolicySpec& spec,
                                    const EnergyParams& params);

// Reference energy per instance: exact search, the plain EDF single-wake
// schedule, or the work + one-wake lower bound.
enum class OracleMode { Exact, Baseline, LowerBound };

OracleMode oracle_mode_from_string(const std::string& s);
std::string to_string(OracleMode mode);

struct WorkloadSpec {
  int instances = 100;
  int jobs = 5;
  Tick horizon = 30;
  Rational slack{1, 2};
  bool unit = false;
  int streams = 1;  // >1 produces tagged multi-stream instances
};

struct ExperimentConfig {
  PolicySpec policy;
  WorkloadSpec workload;
  EnergyParams params;
  OracleMode oracle = OracleMode::Exact;
  OracleLimits limits;  // forwarded to the exact search
  std::uint64_t seed = 0;
  // When set, compare energy spent in [0, at_time) against the reference on
  // the jobs released before at_time instead of whole-run totals.
  std::optional<Tick> at_time;
};

struct RatioRow {
  int instance = 0;
  Rational policy_energy{0};
  Rational opt_energy{0};
  Rational ratio{0};
  int violations = 0;
  std::string error;  // nonempty when this instance failed; other fields zero
};

// Runs the configured policy over instances drawn from seed, seed+1, ...
// Each trace is validated and checked against its job set before energy is
// reported; anchor policies are additionally checked against their
// per-interval invariants. A failing instance becomes an error row and the
// campaign continues. Output is deterministic byte for byte given the config.
std::vector<RatioRow> run_ratio_experiment(const ExperimentConfig& config);

std::string ratio_rows_to_csv(std::span<const RatioRow> rows);

}  // namespace powersched
