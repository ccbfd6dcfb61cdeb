#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cvsim/arrivals.hpp"
#include "cvsim/config.hpp"
#include "cvsim/guidance.hpp"
#include "cvsim/metrics.hpp"
#include "cvsim/rng.hpp"
#include "cvsim/signal.hpp"
#include "cvsim/vehicle.hpp"

namespace cvsim {

enum class WorldStatus { Running, Ended, Aborted };

std::string_view to_string(WorldStatus s) noexcept;

struct Anomaly {
    enum class Kind { Collision, Overflow };
    Kind kind = Kind::Collision;
    LaneId lane{};
    std::vector<VehicleId> vehicles;
    std::uint64_t tick = 0;
    std::string message;
};

std::string_view to_string(Anomaly::Kind k) noexcept;

/// What happened during one step.
struct StepEvents {
    std::uint64_t tick = 0;  // 1-based index of the completed tick
    std::vector<VehicleId> spawned;
    std::vector<VehicleId> placed;
    std::vector<VehicleId> joined;
    std::vector<CarRecord> completed;
    std::vector<VehicleId> despawned;
    TickRow row;
    std::optional<Anomaly> anomaly;
};

/// Overflow is reported once the queue has sat at the spawn point this long.
inline constexpr double kOverflowHold_s = 60.0;

/// One intersection: 12 lanes, demand, signal plan, random stream and statistics. All
/// mutation happens through step() and the command setters, which must be called from
/// the single thread that owns the world.
class World {
public:
    World(SimConfig cfg, SignalPlan plan, std::shared_ptr<const GuidanceStrategy> strategy = nullptr,
          double warmup_s = 0.0);

    /// Advances one tick. No-op returning an empty event set unless Running.
    StepEvents step();

    void set_flow(Approach a, double veh_per_hour);
    void set_ratio(double ratio);
    void set_plan(SignalPlan plan);  // validated; throws ConfigError and leaves the plan
    void end();

    double clock() const noexcept { return static_cast<double>(tick_) * cfg_.tick_s; }
    std::uint64_t tick() const noexcept { return tick_; }
    const SimConfig& config() const noexcept { return cfg_; }
    const SignalPlan& plan() const noexcept { return plan_; }
    const std::array<Lane, kLaneCount>& lanes() const noexcept { return lanes_; }
    const Lane& lane(LaneId id) const { return lanes_[id.index()]; }
    const PendingQueue& pending() const noexcept { return pending_; }
    const MetricsAccumulator& metrics() const noexcept { return metrics_; }
    const GuidanceStrategy& strategy() const noexcept { return *strategy_; }
    WorldStatus status() const noexcept { return status_; }
    const std::optional<Anomaly>& anomaly() const noexcept { return anomaly_; }
    std::uint64_t despawned() const noexcept { return despawned_; }
    /// Seconds the rearmost vehicle of each lane has continuously been within
    /// s_headway_min of the spawn point.
    const std::array<double, kLaneCount>& overflow_timers() const noexcept { return overflow_s_; }

    /// Scripted-scenario hook: places a vehicle at the back of the lane's q_in (or
    /// q_block when `queued`). Assigns an id when v.id == 0. Counts as spawned and entered.
    VehicleId insert_vehicle(LaneId lane, Vehicle v, bool queued = false);

    /// Invoked for each finalized vehicle and each tick row, in that order within a step.
    std::function<void(const CarRecord&)> on_car;
    std::function<void(const TickRow&)> on_tick_row;

private:
    void spawn_and_place(StepEvents& ev, double t);
    void plan_accelerations(std::array<Color, kLaneCount>& colors, std::vector<char>& stopping, double t);
    void integrate(const std::vector<char>& stopping);
    void update_overflow_timers();

    SimConfig cfg_;
    SignalPlan plan_;
    std::shared_ptr<const GuidanceStrategy> strategy_;
    Rng rng_;
    std::array<ArrivalProcess, kApproachCount> arrivals_;
    PendingQueue pending_;
    std::array<Lane, kLaneCount> lanes_;
    MetricsAccumulator metrics_;
    WorldStatus status_ = WorldStatus::Running;
    std::optional<Anomaly> anomaly_;
    std::uint64_t tick_ = 0;
    VehicleId next_id_ = 1;
    std::uint64_t despawned_ = 0;
    std::array<double, kLaneCount> overflow_s_{};
};

/// Collision: adjacent head-to-head spacing below vehicle_length anywhere in a lane
/// (exit segment, q_block and q_in taken as one ordered file). Overflow: a lane's rear
/// vehicle has been within s_headway_min of the spawn point for more than 60 s.
std::optional<Anomaly> detect_anomalies(const World& world);

/// Per-tick structural checks used by the long-run tests: speed bounds, ordering inside
/// each queue, q_block before the line, and vehicle conservation. Empty means ok.
std::vector<std::string> check_invariants(const World& world);

}  // namespace cvsim
