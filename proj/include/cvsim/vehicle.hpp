#pragma once

#include <cstdint>
#include <deque>
#include <optional>

#include "cvsim/types.hpp"

namespace cvsim {

using VehicleId = std::uint64_t;

/// One car. head_pos is measured along its lane from the spawn point (0) toward the stop
/// line (approach_length) and beyond into the exit segment.
struct Vehicle {
    VehicleId id = 0;
    LaneId lane{};
    double head_pos = 0.0;
    double velocity = 0.0;
    double accel_cmd = 0.0;   // pre-noise command of the last tick
    double accel_used = 0.0;  // realized acceleration of the last tick
    bool equipped = false;
    double arrival_time = 0.0;  // exact Poisson arrival timestamp
    double spawn_time = 0.0;    // sim time at generation (start of the tick)
    double init_velocity = 0.0;
    std::optional<double> crossed_time;
    Regime regime = Regime::Free;
    bool in_stop = false;   // inside a stop episode (metrics)
    bool settling = false;  // joined q_block while still moving; brakes to rest under red
};

/// One approach-movement lane. Each sequence is ordered front (closest to, or furthest
/// past, the stop line) to back.
struct Lane {
    LaneId id{};
    std::deque<Vehicle> q_in;
    std::deque<Vehicle> q_block;
    std::deque<Vehicle> exiting;

    bool empty() const noexcept { return q_in.empty() && q_block.empty() && exiting.empty(); }
    std::size_t approach_count() const noexcept { return q_in.size() + q_block.size(); }

    /// Rearmost vehicle still before the stop line, if any.
    const Vehicle* last_approach_vehicle() const noexcept {
        if (!q_in.empty()) return &q_in.back();
        if (!q_block.empty()) return &q_block.back();
        return nullptr;
    }
};

}  // namespace cvsim
