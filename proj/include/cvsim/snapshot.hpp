#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cvsim/engine.hpp"
#include "cvsim/speed_mode.hpp"

namespace cvsim {

struct VehicleState {
    VehicleId id = 0;
    LaneId lane{};
    double head_pos = 0.0;
    double velocity = 0.0;
    bool equipped = false;
    Regime regime = Regime::Free;
};

struct SignalState {
    LaneId lane{};
    Color color = Color::Red;
    double time_in_cycle = 0.0;
};

/// The 12 statistics shown alongside the live view.
struct SnapshotStats {
    std::uint64_t vehicles_in_system = 0;  // placed and not yet across the stop line
    std::uint64_t total_spawned = 0;
    std::uint64_t total_departed = 0;
    std::uint64_t pending_count = 0;
    double avg_delay_s = 0.0;
    std::uint64_t total_stops = 0;
    double avg_stops_per_vehicle = 0.0;
    double total_stop_time_s = 0.0;
    double avg_stop_time_s = 0.0;
    double throughput_veh_per_h = 0.0;
    double equipped_fraction_actual = 0.0;
    double sim_time_s = 0.0;
};

/// Immutable copy of a world between ticks.
struct Snapshot {
    double sim_time = 0.0;
    SpeedMode mode = SpeedMode::Headless;
    WorldStatus status = WorldStatus::Running;
    std::vector<VehicleState> vehicles;  // approach and exit segments
    std::vector<SignalState> signals;    // WL..NR
    SnapshotStats stats;
    SimConfig config;
    SignalPlan plan;
};

Snapshot snapshot_of(const World& world, SpeedMode mode);

/// Wire form: {"v":1,"type":"snapshot",...}. Real values are rounded to 3 decimals.
nlohmann::json to_json(const Snapshot& s);
Snapshot snapshot_from_json(const nlohmann::json& j);

}  // namespace cvsim
