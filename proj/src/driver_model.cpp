#include "cvsim/driver_model.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace cvsim {

namespace {
constexpr double kMpsToKmh = 3.6;
// Bumper-to-bumper clearance the safe-speed cap keeps at a worst-case standstill.
constexpr double kCapClearance = 0.5;
}  // namespace

double safe_distance(double v_leader, const SimConfig& cfg) noexcept {
    return std::max(cfg.theta * v_leader * kMpsToKmh, cfg.s_headway_min);
}

Regime classify_regime(const std::optional<GapState>& gap, double /*v*/, const SimConfig& cfg) noexcept {
    if (!gap || gap->dx >= cfg.s_reaction) return Regime::Free;
    if (gap->dx <= safe_distance(gap->leader_velocity, cfg)) return Regime::Brake;
    const double signal = gap->dv / (gap->dx * gap->dx);
    if (std::abs(signal) < kPerceptionThreshold) return Regime::Follow;
    return signal > 0 ? Regime::Approach : Regime::Leave;
}

double free_acceleration(double v, const SimConfig& cfg) noexcept {
    return std::clamp(kFreeGain * (cfg.desired_speed() - v), -cfg.a_max, cfg.a_max);
}

double following_acceleration(const GapState& g, double s_safe) noexcept {
    assert(g.dx > s_safe && "following regime requires dx > S_safe");
    const double sign = (g.dv > 0) - (g.dv < 0);
    return -sign * g.dv * g.dv / (2.0 * (g.dx - s_safe)) + g.leader_accel;
}

double following_acceleration(const GapState& g, const SimConfig& cfg) noexcept {
    return following_acceleration(g, safe_distance(g.leader_velocity, cfg));
}

double emergency_brake(const GapState& /*g*/, const SimConfig& cfg) noexcept { return -cfg.a_max; }

double safe_speed_cap(const GapState& g, double v, const SimConfig& cfg) noexcept {
    const double a = cfg.a_max;
    const double dt = cfg.tick_s;
    // Room left if the leader brakes at a_max from now on.
    const double room = g.dx + g.leader_velocity * g.leader_velocity / (2.0 * a) - cfg.vehicle_length - kCapClearance -
                        0.5 * v * dt;
    if (room <= 0.0) return -a;
    // Largest v' with v'^2 / (2a) + v' * dt / 2 <= room.
    const double v_max = -0.5 * a * dt + std::sqrt(0.25 * a * a * dt * dt + 2.0 * a * room);
    return (v_max - v) / dt;
}

namespace {

DrivingDecision regime_law(const std::optional<GapState>& gap, double v, const SimConfig& cfg) noexcept {
    const Regime regime = classify_regime(gap, v, cfg);
    switch (regime) {
        case Regime::Follow:
            // Falling behind: drift back up like Leave; the following law is only second order here.
            if (gap->dv < 0) return {free_acceleration(v, cfg), regime};
            return {std::min(following_acceleration(*gap, cfg), free_acceleration(v, cfg)), regime};
        case Regime::Approach:
            return {std::min(following_acceleration(*gap, cfg), free_acceleration(v, cfg)), regime};
        case Regime::Brake:
            if (gap->dv > 0) return {emergency_brake(*gap, cfg), regime};
            return {std::min(0.0, free_acceleration(v, cfg)), regime};
        default:
            return {free_acceleration(v, cfg), regime};
    }
}

}  // namespace

DrivingDecision natural_acceleration(const std::optional<GapState>& gap, double v, const SimConfig& cfg) noexcept {
    DrivingDecision d = regime_law(gap, v, cfg);
    if (gap) d.accel = std::min(d.accel, safe_speed_cap(*gap, v, cfg));
    return d;
}

}  // namespace cvsim
