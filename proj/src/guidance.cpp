#include "cvsim/guidance.hpp"

namespace cvsim {

std::optional<double> ConstantSpeedAdvisory::command(const Vehicle& vehicle, const Lane& /*lane*/,
                                                     const std::optional<GapState>& leader,
                                                     const SignalView& signal, double /*clock*/) const {
    if (signal.color != Color::Green) return std::nullopt;
    if (leader && leader->dx < range_) return std::nullopt;
    return gain_ * (speed_ - vehicle.velocity);
}

}  // namespace cvsim
