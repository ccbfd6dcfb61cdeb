#pragma once

#include <optional>

#include "cvsim/config.hpp"
#include "cvsim/types.hpp"

namespace cvsim {

/// Relative state of a follower with respect to its immediate leader.
struct GapState {
    double dx = 0.0;  // leader head_pos - follower head_pos (> 0)
    double dv = 0.0;  // follower velocity - leader velocity; positive when closing
    double leader_accel = 0.0;
    double leader_velocity = 0.0;
};

/// Perception threshold on |dv / dx^2| separating Follow from Approach/Leave (1/(m*s)).
inline constexpr double kPerceptionThreshold = 6e-4;

/// Gain of the free-driving speed controller (1/s).
inline constexpr double kFreeGain = 0.8;

/// Minimum head-to-head following distance: max(theta * v_leader[km/h], s_headway_min).
double safe_distance(double v_leader, const SimConfig& cfg) noexcept;

Regime classify_regime(const std::optional<GapState>& gap, double v, const SimConfig& cfg) noexcept;

/// Proportional approach to the desired speed (desired_speed_factor * v_limit), clamped
/// to +-a_max.
double free_acceleration(double v, const SimConfig& cfg) noexcept;

/// Psycho-physical following law, braking-consistent sign:
///   a = -sign(dv) * dv^2 / (2 (dx - s_safe)) + leader_accel
/// Requires dx > s_safe.
double following_acceleration(const GapState& g, double s_safe) noexcept;
double following_acceleration(const GapState& g, const SimConfig& cfg) noexcept;

double emergency_brake(const GapState& g, const SimConfig& cfg) noexcept;

/// Largest acceleration after which the follower can still stop vehicle_length + 0.5 m
/// behind the leader if the leader brakes at a_max from now on (one tick of reaction).
double safe_speed_cap(const GapState& g, double v, const SimConfig& cfg) noexcept;

struct DrivingDecision {
    double accel = 0.0;
    Regime regime = Regime::Free;
};

/// Uncontrolled driving against an optional leader: classify, then apply the law of the
/// regime. Approach/Follow are capped by the free law so a follower never pushes past
/// its desired speed. A Follow-regime car that is falling behind (dv < 0) uses the free
/// law. A Brake-regime follower that is not closing holds its speed. Every result with a
/// leader is capped by safe_speed_cap.
DrivingDecision natural_acceleration(const std::optional<GapState>& gap, double v, const SimConfig& cfg) noexcept;

}  // namespace cvsim
