#include "fw/errors.hpp"

#include "fw/format.hpp"

namespace fw {

MonotonicityLoss::MonotonicityLoss(std::size_t index, double value, double floor)
    : Error("monotonicity loss: q = " + format_real(value) + " at node " + std::to_string(index) +
            " is at or below q_floor = " + format_real(floor)),
      index_(index),
      value_(value) {}

GuardBreach::GuardBreach(const std::string& what, double time, std::size_t node, int stage)
    : Error(what), time_(time), node_(node), stage_(stage) {}

}  // namespace fw
