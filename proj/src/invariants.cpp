#include "powersched/invariants.hpp"

#include <stdexcept>
#include <unordered_map>

#include "powersched/analysis.hpp"

namespace powersched {

namespace {

std::string interval_tag(const AwakeInterval& iv) {
  return "interval [" + std::to_string(iv.left) + "," +
         std::to_string(iv.right) + ")";
}

}  // namespace

std::vector<std::string> check_anchor_invariants(const ScheduleTrace& trace,
                                                 std::span<const Job> jobs,
                                                 const EnergyParams& params,
                                                 const InvariantOptions& opts) {
  params.validate();
  if (opts.lambda <= Rational(0) || opts.lambda > Rational(1))
    throw std::invalid_argument("lambda must be in (0, 1]");

  std::unordered_map<int, Tick> exec_of;
  for (const Job& j : jobs) exec_of[j.id] = j.exec;

  const Rational B = params.break_even();
  std::vector<std::string> out;
  for (const AwakeInterval& iv : awake_intervals(trace)) {
    const std::string tag = interval_tag(iv);

    if (iv.wake_count > 2)
      out.push_back(tag + ": " + std::to_string(iv.wake_count) + " wakes");

    Rational work{0};
    for (int id : iv.executed_jobs) {
      auto it = exec_of.find(id);
      if (it == exec_of.end())
        throw std::invalid_argument("trace runs job " + std::to_string(id) +
                                    " that is not in the job set");
      work += Rational(it->second);
    }

    // Work gating for the second wake only settles once the interval is over;
    // a horizon-truncated burst may still be accumulating work.
    if (iv.completed && iv.wake_count == 2 && work < opts.lambda * B)
      out.push_back(tag + ": second wake backed by less than lambda*B work");

    EnergyBreakdown eb = energy_in_window(trace, params, iv.left, iv.right);
    const Rational overhead = eb.wake_standby();
    if (overhead >
        params.standby_power * work + (Rational(3) - opts.lambda) * params.wake_energy)
      out.push_back(tag + ": wake+standby overhead above general bound");
    if (iv.wake_count == 1 && overhead > Rational(2) * params.wake_energy)
      out.push_back(tag + ": single-wake overhead above 2*E_w");
    if (opts.paired_units &&
        overhead > (Rational(3) - opts.lambda / Rational(2)) * params.wake_energy)
      out.push_back(tag + ": overhead above paired unit-job bound");

    if (iv.completed && Rational(iv.right - iv.left) < B)
      out.push_back(tag + ": shorter than break-even");
  }
  return out;
}

}  // namespace powersched
