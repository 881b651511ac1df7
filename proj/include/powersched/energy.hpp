#pragma once

#include "powersched/rational.hpp"

namespace powersched {

// Power model: a processor is off (draws nothing), on-standby (standby_power
// per tick) or on-busy (busy_power per tick). Waking from off costs
// wake_energy once; powering down is free and instant.
struct EnergyParams {
  Rational wake_energy{1};
  Rational busy_power{1};
  Rational standby_power{1};

  // wake_energy > 0, busy_power >= standby_power > 0
  void validate() const;

  // Ticks of standby that cost as much as one wake.
  Rational break_even() const { return wake_energy / standby_power; }
};

struct EnergyBreakdown {
  long long wake_count = 0;
  long long busy_ticks = 0;
  long long standby_ticks = 0;
  Rational wake_cost;
  Rational busy_cost;
  Rational standby_cost;

  Rational total() const { return wake_cost + busy_cost + standby_cost; }
  // Everything except the busy ticks any schedule must pay for.
  Rational wake_standby() const { return wake_cost + standby_cost; }
};

}  // namespace powersched
