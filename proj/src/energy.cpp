#include "powersched/energy.hpp"

#include <stdexcept>

namespace powersched {

void EnergyParams::validate() const {
  if (!(wake_energy > Rational(0)))
    throw std::invalid_argument("wake_energy must be positive");
  if (!(standby_power > Rational(0)))
    throw std::invalid_argument("standby_power must be positive");
  if (busy_power < standby_power)
    throw std::invalid_argument("busy_power must be >= standby_power");
}

}  // namespace powersched
