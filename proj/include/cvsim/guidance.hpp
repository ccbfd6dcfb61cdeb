#pragma once

#include <optional>
#include <string>

#include "cvsim/driver_model.hpp"
#include "cvsim/vehicle.hpp"

namespace cvsim {

struct SignalView {
    Color color = Color::Red;
    double time_in_cycle = 0.0;
    double cycle_s = 0.0;
    double stop_line = 0.0;
};

/// User driving policy for equipped vehicles approaching the stop line. The engine asks
/// for every equipped vehicle in q_in on every tick; an empty result means "drive
/// naturally". Returned commands go through the same noise and clamps as natural ones.
class GuidanceStrategy {
public:
    virtual ~GuidanceStrategy() = default;

    virtual std::string name() const = 0;

    /// `leader` is the gap to the vehicle directly ahead in the same lane (including a
    /// q_block tail or an exiting car), if any.
    virtual std::optional<double> command(const Vehicle& vehicle, const Lane& lane,
                                          const std::optional<GapState>& leader, const SignalView& signal,
                                          double clock) const = 0;
};

/// Default: never overrides, so equipped vehicles drive like everyone else.
class PassThroughStrategy final : public GuidanceStrategy {
public:
    std::string name() const override { return "pass-through"; }
    std::optional<double> command(const Vehicle&, const Lane&, const std::optional<GapState>&, const SignalView&,
                                  double) const override {
        return std::nullopt;
    }
};

/// Example policy shipped with the platform (not part of the driving model): hold an
/// advisory speed while the road ahead is clear, hand back to natural driving as soon as
/// a leader is within the interaction range or the signal is not green.
class ConstantSpeedAdvisory final : public GuidanceStrategy {
public:
    ConstantSpeedAdvisory(double advisory_speed, double interaction_range, double gain = 0.8)
        : speed_(advisory_speed), range_(interaction_range), gain_(gain) {}

    std::string name() const override { return "constant-speed-advisory"; }
    std::optional<double> command(const Vehicle& vehicle, const Lane& lane, const std::optional<GapState>& leader,
                                  const SignalView& signal, double clock) const override;

private:
    double speed_;
    double range_;
    double gain_;
};

}  // namespace cvsim
